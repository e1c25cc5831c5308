#include "reach/averaging.hpp"

#include <algorithm>
#include <cmath>

#include "reach/errors.hpp"

namespace reach {

namespace {

std::vector<double> pieces(const std::vector<double>& breaks, double a, double b) {
  std::vector<double> out{a};
  const double eps = 1e-13 * std::max(1.0, std::abs(b));
  for (auto it = std::upper_bound(breaks.begin(), breaks.end(), a); it != breaks.end() && *it < b; ++it) {
    if (*it - out.back() > eps && b - *it > eps) out.push_back(*it);
  }
  out.push_back(b);
  return out;
}

// Composite Simpson of g over [a, b] with an even number of subintervals; endpoints use one-sided limits.
template <class G>
double simpson(const G& g, double a, double b, int sub) {
  if (sub % 2) ++sub;
  const double h = (b - a) / sub;
  double acc = g(a, Side::Right) + g(b, Side::Left);
  for (int i = 1; i < sub; ++i) acc += (i % 2 ? 4.0 : 2.0) * g(a + i * h, Side::Right);
  return acc * h / 3.0;
}

Vec mean_on(const ControlSignal& u, const std::vector<double>& br, double a, double b, int quad_points) {
  if (quad_points < 2) throw std::invalid_argument("quad_points must be >= 2");
  if (!(b > a)) throw std::invalid_argument("interval must have positive length");
  const int m = u.dim();
  const auto knots = pieces(br, a, b);
  Vec acc = Vec::Zero(m);
  Vec tmp(m);
  for (std::size_t p = 0; p + 1 < knots.size(); ++p) {
    for (int i = 0; i < m; ++i) {
      acc[i] += simpson(
          [&](double t, Side side) {
            u.eval_into(t, side, tmp.data());
            return tmp[i];
          },
          knots[p], knots[p + 1], quad_points);
    }
  }
  return acc / (b - a);
}

}  // namespace

Vec interval_mean(const ControlSignal& u, double a, double b, int quad_points) {
  return mean_on(u, u.breakpoints(), a, b, quad_points);
}

ControlSignal average_project(const ControlSignal& u, const Partition& part, int quad_points) {
  if (std::abs(part.horizon() - u.horizon()) > 1e-12 * std::max(1.0, u.horizon())) {
    throw std::invalid_argument("partition horizon does not match the control");
  }
  const auto& t = part.times();
  const auto br = u.breakpoints();
  std::vector<Vec> values;
  values.reserve(t.size() - 1);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) values.push_back(mean_on(u, br, t[i], t[i + 1], quad_points));
  return ControlSignal::piecewise_constant(part, std::move(values));
}

ControlSignal value_sample_project(const ControlSignal& u, const Partition& part, SampleRule rule) {
  const auto& t = part.times();
  std::vector<Vec> values;
  values.reserve(t.size() - 1);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double h = t[i + 1] - t[i];
    const double xi = rule == SampleRule::Midpoint ? t[i] + 0.5 * h : t[i] + h / 3.0;
    values.push_back(u.eval(xi, Side::Right));
  }
  return ControlSignal::piecewise_constant(part, std::move(values));
}

double lp_distance(const ControlSignal& u, const ControlSignal& v, double s, int grid) {
  if (u.dim() != v.dim()) throw DimensionError("lp_distance: dimension mismatch");
  if (!(s >= 1.0)) throw std::invalid_argument("exponent s must be >= 1");
  if (grid < 2) throw std::invalid_argument("grid must be >= 2");
  const double T = std::max(u.horizon(), v.horizon());
  std::vector<double> br = u.breakpoints();
  const auto bv = v.breakpoints();
  br.insert(br.end(), bv.begin(), bv.end());
  br = merge_times(std::move(br), T);
  const auto knots = pieces(br, 0.0, T);
  const int m = u.dim();
  Vec a(m), b(m);
  auto diff = [&](double t, Side side) {
    u.eval_into(t, side, a.data());
    v.eval_into(t, side, b.data());
    return (a - b).norm();
  };
  if (std::isinf(s)) {
    double r = 0.0;
    for (std::size_t p = 0; p + 1 < knots.size(); ++p) {
      const double lo = knots[p];
      const double hi = knots[p + 1];
      for (int i = 0; i <= grid; ++i) {
        const double t = lo + (hi - lo) * i / grid;
        r = std::max(r, diff(t, i == grid ? Side::Left : Side::Right));
      }
    }
    return r;
  }
  double acc = 0.0;
  for (std::size_t p = 0; p + 1 < knots.size(); ++p) {
    acc += simpson([&](double t, Side side) { return std::pow(diff(t, side), s); }, knots[p], knots[p + 1], grid);
  }
  return std::pow(std::max(acc, 0.0), 1.0 / s);
}

double lp_norm(const ControlSignal& u, double s, int grid) {
  return lp_distance(u, ControlSignal::constant(Vec::Zero(u.dim()), u.horizon()), s, grid);
}

}  // namespace reach
