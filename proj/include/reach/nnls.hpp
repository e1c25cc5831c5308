#pragma once

#include "reach/expr.hpp"

namespace reach {

struct NnlsResult {
  Vec x;
  /// ||A x - b||.
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// min ||A x - b|| subject to x >= 0, by the Lawson-Hanson active-set method.
/// max_iterations <= 0 selects 3 * cols.
NnlsResult nnls(const Mat& A, const Vec& b, int max_iterations = 0);

}  // namespace reach
