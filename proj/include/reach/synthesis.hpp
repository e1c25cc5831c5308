#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "reach/averaging.hpp"
#include "reach/regularity.hpp"

namespace reach {

enum class Method { Conic, NeedleFixedPoint };
enum class FailureReason {
  None,
  NoSpanningCertificate,
  MaxIterations,
  AmplitudeBoxExceeded,
  InfeasibleValues,
  InnerSolverFailure,
};

const char* to_string(Method m);
const char* to_string(FailureReason r);
Method method_from_string(const std::string& s);

struct SynthesisOptions {
  int steps_per_unit = kDefaultStepsPerUnit;
  double tol = 1e-8;
  int max_iterations = 100;
  /// First trial step of each damped Gauss-Newton iteration.
  double damping = 1.0;
  /// Outer Picard damping of the needle method.
  double theta = 0.5;
  int dictionary_levels = 4;
  double cone_tol = kDefaultConeTol;
  int tau_count = 32;
  int omega_samples = 8;
  std::uint64_t seed = 0;
  int inner_max_iterations = 50;
  int quad_points = 8;
  /// Verification resolution is steps_per_unit * verify_factor.
  int verify_factor = 4;
};

struct IterationRecord {
  int iter = 0;
  double residual = 0.0;
  double alpha_norm = 0.0;
  /// Outer iterate of the needle method; empty for the conic method.
  Vec z;
};

struct SynthesisReport {
  SynthesisReport(Method m, Partition p) : method(m), partition(std::move(p)) {}

  Method method;
  Partition partition;
  /// Piecewise constant on `partition`; set whenever an iterate was produced.
  std::optional<ControlSignal> control;
  /// ||E(control) - x1|| on the untruncated dynamics at steps_per_unit.
  double residual = std::numeric_limits<double>::infinity();
  /// Same at steps_per_unit * verify_factor.
  double residual_fine = std::numeric_limits<double>::infinity();
  std::vector<IterationRecord> trace;
  bool success = false;
  FailureReason reason = FailureReason::None;
  Vec alpha;
  /// Truncation radius (conic) or amplitude bound beta (needle).
  double scale = 0.0;
  /// Needle package used by the fixed-point method.
  std::optional<NeedlePackage> package;
  std::string message;
};

/// Conic perturbation of the averaged control with truncated dynamics and damped Gauss-Newton.
SynthesisReport synthesize_conic(const ControlSystem& sys, const ControlSignal& u, const Vec& x1, const Partition& part,
                                 const SynthesisOptions& opts = {});

/// Needle package plus damped Picard iteration z <- z + theta (x1 - E(I(V(z)))).
SynthesisReport synthesize_needle_fixed_point(const ControlSystem& sys, const ControlSignal& u, const Vec& x1,
                                              const Partition& part, const SynthesisOptions& opts = {});

SynthesisReport synthesize(Method method, const ControlSystem& sys, const ControlSignal& u, const Vec& x1,
                           const Partition& part, const SynthesisOptions& opts = {});

struct ThresholdEstimate {
  Method method = Method::Conic;
  std::vector<int> intervals;
  std::vector<SynthesisReport> outcomes;
  /// Largest T/N with success at N and every finer N in the family; absent if the finest fails.
  std::optional<double> delta_hat;
};

/// Uniform partitions N = 2, 4, 8, ... <= n_max, run concurrently.
ThresholdEstimate estimate_threshold(const ControlSystem& sys, const ControlSignal& u, const Vec& x1, int n_max,
                                     Method method, const SynthesisOptions& opts = {});

struct IntervalDemoOptions {
  int steps_per_unit = kDefaultStepsPerUnit;
  /// Coarse candidate values per interval before golden-section refinement.
  int grid = 32;
  double tol = 1e-10;
  std::uint64_t seed = 0;
};

struct IntervalDemoReport {
  double hull_min = 0.0;
  double hull_max = 0.0;
  double target = 0.0;
  bool inside = false;
  /// Dynamics independent of x, so per-interval extremes are computed separately.
  bool separable = false;
  std::optional<ControlSignal> min_control;
  std::optional<ControlSignal> max_control;
  std::optional<ControlSignal> control;
  /// Convex-combination weight between the min and max controls.
  double lambda = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  bool success = false;
  std::string message;
};

/// Scalar state, Box or AllSpace U: extremes of E over PC controls on part, then bisection
/// between the extremal controls towards x_u(T).
IntervalDemoReport n1_interval_demo(const ControlSystem& sys, const ControlSignal& u, const Partition& part,
                                    const IntervalDemoOptions& opts = {});

/// sup over grid nodes of ||u(t)||, both one-sided limits.
double control_sup_norm(const ControlSignal& u, const Trajectory& grid);

}  // namespace reach
