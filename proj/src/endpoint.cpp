#include "reach/endpoint.hpp"

#include <cmath>
#include <limits>

#include "reach/errors.hpp"

namespace reach {

Vec endpoint(const ControlSystem& sys, const ControlSignal& u, int steps_per_unit) {
  return integrate_state(sys, u, steps_per_unit).final_state();
}

Vec differential(const ControlSystem& sys, const ControlSignal& u, const ControlSignal& v, int steps_per_unit) {
  const Trajectory base = integrate_state(sys, u, steps_per_unit);
  return integrate_variational(sys, u, base, &v, 0.0, Vec::Zero(sys.n));
}

VariationMatrix variation_matrix(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base,
                                 const std::vector<ControlSignal>& dictionary) {
  if (dictionary.empty()) throw std::invalid_argument("variation matrix needs a non-empty dictionary");
  VariationMatrix out;
  out.columns.resize(sys.n, static_cast<Eigen::Index>(dictionary.size()));
  for (std::size_t k = 0; k < dictionary.size(); ++k) {
    out.columns.col(static_cast<Eigen::Index>(k)) =
        integrate_variational(sys, u, base, &dictionary[k], 0.0, Vec::Zero(sys.n));
  }
  out.directions = dictionary;
  return out;
}

VariationMatrix variation_matrix(const ControlSystem& sys, const ControlSignal& u,
                                 const std::vector<ControlSignal>& dictionary, int steps_per_unit) {
  return variation_matrix(sys, u, integrate_state(sys, u, steps_per_unit), dictionary);
}

std::vector<ControlSignal> dyadic_dictionary(double horizon, int m, int levels) {
  if (levels < 0 || levels > 16) throw std::invalid_argument("dictionary levels must be in [0, 16]");
  if (m < 1) throw DimensionError("control dimension must be positive");
  std::vector<ControlSignal> out;
  for (int l = 0; l <= levels; ++l) {
    const int pieces = 1 << l;
    for (int k = 0; k < pieces; ++k) {
      const double a = horizon * k / pieces;
      const double b = k + 1 == pieces ? horizon : horizon * (k + 1) / pieces;
      std::vector<double> times{0.0};
      if (a > 0.0) times.push_back(a);
      times.push_back(b);
      if (b < horizon) times.push_back(horizon);
      for (int i = 0; i < m; ++i) {
        Vec e = Vec::Zero(m);
        e[i] = 1.0;
        std::vector<Vec> values;
        if (a > 0.0) values.push_back(Vec::Zero(m));
        values.push_back(e);
        if (b < horizon) values.push_back(Vec::Zero(m));
        out.push_back(ControlSignal::piecewise_constant(Partition(times), std::move(values)));
      }
    }
  }
  return out;
}

std::vector<double> SlopeReport::deviation_ratios() const {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < deviations.size(); ++k) {
    if (std::isfinite(deviations[k]) && std::isfinite(deviations[k + 1]) && deviations[k] > 0.0) {
      out.push_back(deviations[k + 1] / deviations[k]);
    }
  }
  return out;
}

SlopeReport fd_consistency(const ControlSystem& sys, const ControlSignal& u, const ControlSignal& v,
                           const std::vector<double>& alphas, int steps_per_unit) {
  SlopeReport rep;
  const Trajectory base = integrate_state(sys, u, steps_per_unit);
  const Vec e0 = base.final_state();
  rep.prediction = integrate_variational(sys, u, base, &v, 0.0, Vec::Zero(sys.n));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double a : alphas) {
    rep.alphas.push_back(a);
    try {
      const ControlSignal ua = ControlSignal::combination({{1.0, u}, {a, v}});
      const Vec q = (endpoint(sys, ua, steps_per_unit) - e0) / a;
      const double dev = (q - rep.prediction).norm();
      rep.quotients.push_back(q);
      rep.deviations.push_back(dev);
      rep.errors.emplace_back();
      rep.max_deviation = std::max(rep.max_deviation, dev);
    } catch (const Error& e) {
      rep.quotients.push_back(Vec::Constant(sys.n, nan));
      rep.deviations.push_back(nan);
      rep.errors.emplace_back(e.what());
    }
  }
  return rep;
}

}  // namespace reach
