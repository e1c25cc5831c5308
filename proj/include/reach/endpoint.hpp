#pragma once

#include <string>
#include <vector>

#include "reach/ode.hpp"

namespace reach {

/// E(u) = x_u(T).
Vec endpoint(const ControlSystem& sys, const ControlSignal& u, int steps_per_unit = kDefaultStepsPerUnit);

/// DE(u) v = w(T) for w' = fx w + fu v, w(0) = 0.
Vec differential(const ControlSystem& sys, const ControlSignal& u, const ControlSignal& v,
                 int steps_per_unit = kDefaultStepsPerUnit);

struct VariationMatrix {
  /// n x K, column k is DE(u) directions[k].
  Mat columns;
  std::vector<ControlSignal> directions;
};

VariationMatrix variation_matrix(const ControlSystem& sys, const ControlSignal& u,
                                 const std::vector<ControlSignal>& dictionary,
                                 int steps_per_unit = kDefaultStepsPerUnit);
/// Same, reusing an already integrated base trajectory of u.
VariationMatrix variation_matrix(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base,
                                 const std::vector<ControlSignal>& dictionary);

/// Indicators of [k T / 2^l, (k+1) T / 2^l) times each canonical axis e_i, for l = 0..levels.
/// Ordered by level, then interval, then axis.
std::vector<ControlSignal> dyadic_dictionary(double horizon, int m, int levels);

/// Finite-difference quotients compared with a first-order prediction.
struct SlopeReport {
  std::vector<double> alphas;
  std::vector<Vec> quotients;
  /// |quotient - prediction| per alpha; NaN where the perturbed run failed.
  std::vector<double> deviations;
  /// Failure message per alpha, empty on success.
  std::vector<std::string> errors;
  Vec prediction;
  double max_deviation = 0.0;

  /// deviation(alpha_{k+1}) / deviation(alpha_k) for consecutive successful entries.
  std::vector<double> deviation_ratios() const;
};

/// Quotients (E(u + alpha v) - E(u)) / alpha against DE(u) v.
SlopeReport fd_consistency(const ControlSystem& sys, const ControlSignal& u, const ControlSignal& v,
                           const std::vector<double>& alphas, int steps_per_unit = kDefaultStepsPerUnit);

}  // namespace reach
