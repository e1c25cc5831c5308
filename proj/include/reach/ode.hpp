#pragma once

#include <vector>

#include "reach/control.hpp"
#include "reach/system.hpp"

namespace reach {

inline constexpr int kDefaultStepsPerUnit = 1000;

/// Nodes on [a, b] containing every breakpoint; each span between breakpoints is cut into
/// ceil(length * steps_per_unit) equal steps.
std::vector<double> build_grid(double a, double b, const std::vector<double>& breakpoints, int steps_per_unit);

/// Fixed-step RK4 solution with cubic Hermite dense output.
/// Step k spans [times[k], times[k+1]]; the control never jumps inside a step.
class Trajectory {
 public:
  Trajectory(std::vector<double> times, Mat states, Mat slope_start, Mat slope_end);

  const std::vector<double>& times() const { return times_; }
  int steps() const { return static_cast<int>(times_.size()) - 1; }
  /// n x (steps + 1).
  const Mat& states() const { return states_; }
  Vec state(int k) const { return states_.col(k); }
  Vec final_state() const { return states_.col(states_.cols() - 1); }
  /// f at the start of step k with the right limit of u, and at its end with the left limit.
  const Mat& slope_start() const { return slope_start_; }
  const Mat& slope_end() const { return slope_end_; }

  /// Step index k with t in [t_k, t_{k+1}], favouring the later step at nodes unless `left`.
  int step_of(double t, bool left = false) const;
  /// Hermite interpolant restricted to step k.
  void eval_in_step(int k, double t, double* out) const;
  Vec eval(double t) const;
  /// sup-norm of the state over the nodes.
  double sup_norm() const;

 private:
  std::vector<double> times_;
  Mat states_;
  Mat slope_start_;
  Mat slope_end_;
};

/// Backward solution of p' = -fx^T p with cubic Hermite dense output, stored ascending.
class AdjointArc {
 public:
  AdjointArc(std::vector<double> times, Mat costates, Mat slope_start, Mat slope_end);

  const std::vector<double>& times() const { return times_; }
  const Mat& costates() const { return costates_; }
  Vec costate(int k) const { return costates_.col(k); }
  Vec terminal() const { return costates_.col(costates_.cols() - 1); }
  Vec initial() const { return costates_.col(0); }
  Vec eval(double t) const;

 private:
  std::vector<double> times_;
  Mat costates_;
  Mat slope_start_;
  Mat slope_end_;
};

/// Classical RK4 for x' = f(x, u(t), t) from x0 on [0, T]. Throws IntegrationError on blow-up.
Trajectory integrate_state(const ControlSystem& sys, const ControlSignal& u, int steps_per_unit = kDefaultStepsPerUnit,
                           const std::vector<double>& extra_breakpoints = {});

/// w' = fx w + fu v along `base` from w(start) = w_start; returns w(T).
/// Steps of `base` are split at breakpoints of v and at `start`.
Vec integrate_variational(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base,
                          const ControlSignal* v, double start, const Vec& w_start);

/// p(T) = psi, p' = -fx(x_u, u, t)^T p, on the nodes of `base`.
AdjointArc integrate_adjoint(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base, const Vec& psi);

/// Columns of P(T) = terminal evolved backward together; result[k] is P(t_k).
/// With terminal = I, P(tau)^T is the state transition matrix from tau to T.
std::vector<Mat> integrate_adjoint_matrix(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base,
                                          const Mat& terminal);

/// H(x, u, p, t) = <p, f(x, u, t)>.
double hamiltonian(const ControlSystem& sys, const Vec& x, const Vec& u, const Vec& p, double t);
/// grad_u H = fu^T p.
Vec hamiltonian_control_gradient(const ControlSystem& sys, const Vec& x, const Vec& u, const Vec& p, double t);

}  // namespace reach
