#include "reach/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "reach/errors.hpp"

namespace reach {

namespace {

// Least squares restricted to the passive columns; dependent columns get the minimum-norm split.
Vec passive_solve(const Mat& A, const Vec& b, const std::vector<int>& passive) {
  Mat Ap(A.rows(), static_cast<Eigen::Index>(passive.size()));
  for (std::size_t j = 0; j < passive.size(); ++j) Ap.col(static_cast<Eigen::Index>(j)) = A.col(passive[j]);
  return Ap.completeOrthogonalDecomposition().solve(b);
}

}  // namespace

NnlsResult nnls(const Mat& A, const Vec& b, int max_iterations) {
  if (A.rows() != b.size()) throw DimensionError("nnls: A and b disagree in row count");
  const auto cols = static_cast<int>(A.cols());
  NnlsResult out;
  out.x = Vec::Zero(cols);
  if (cols == 0) {
    out.residual = b.norm();
    out.converged = true;
    return out;
  }
  if (max_iterations <= 0) max_iterations = 3 * cols;
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * A.cwiseAbs().colwise().sum().maxCoeff() *
                     static_cast<double>(std::max<Eigen::Index>(A.rows(), A.cols()));

  std::vector<char> in_passive(static_cast<std::size_t>(cols), 0);
  // Columns whose entry would be nonpositive right after activation; retried once x changes.
  std::vector<char> excluded(static_cast<std::size_t>(cols), 0);
  std::vector<int> passive;
  Vec& x = out.x;
  Vec w = A.transpose() * (b - A * x);
  int iter = 0;
  while (true) {
    int best = -1;
    double wmax = tol;
    for (int j = 0; j < cols; ++j) {
      if (!in_passive[j] && !excluded[j] && w[j] > wmax) {
        wmax = w[j];
        best = j;
      }
    }
    if (best < 0) {
      out.converged = true;
      break;
    }
    if (iter >= max_iterations) break;
    in_passive[best] = 1;
    passive.push_back(best);

    bool first = true;
    while (true) {
      ++iter;
      Vec z = passive_solve(A, b, passive);
      if (first && z[z.size() - 1] <= tol) {
        passive.pop_back();
        in_passive[best] = 0;
        excluded[best] = 1;
        break;
      }
      first = false;
      bool feasible = true;
      for (Eigen::Index j = 0; j < z.size(); ++j) {
        if (z[j] <= tol) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        for (std::size_t j = 0; j < passive.size(); ++j) x[passive[j]] = z[static_cast<Eigen::Index>(j)];
        std::fill(excluded.begin(), excluded.end(), 0);
        break;
      }
      // Step from x toward z until the first passive variable hits zero.
      double step = 1.0;
      for (std::size_t j = 0; j < passive.size(); ++j) {
        const double zj = z[static_cast<Eigen::Index>(j)];
        if (zj <= tol) {
          const double xj = x[passive[j]];
          const double denom = xj - zj;
          if (denom > 0.0) step = std::min(step, xj / denom);
        }
      }
      for (std::size_t j = 0; j < passive.size(); ++j) {
        const int c = passive[j];
        x[c] += step * (z[static_cast<Eigen::Index>(j)] - x[c]);
      }
      std::vector<int> keep;
      for (int c : passive) {
        if (x[c] > tol) {
          keep.push_back(c);
        } else {
          x[c] = 0.0;
          in_passive[c] = 0;
        }
      }
      passive.swap(keep);
      if (passive.empty() || iter >= max_iterations) break;
    }
    w = A.transpose() * (b - A * x);
    if (iter >= max_iterations) break;
  }
  out.iterations = iter;
  out.residual = (A * x - b).norm();
  return out;
}

}  // namespace reach
