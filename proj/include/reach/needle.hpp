#pragma once

#include <vector>

#include "reach/endpoint.hpp"

namespace reach {

/// Control equal to omega on [tau, tau + alpha) and to u elsewhere.
/// When U is given, omega must belong to it.
ControlSignal single_needle(const ControlSignal& u, double tau, const Vec& omega, double alpha,
                            const ConstraintSet* U = nullptr);

/// jump = f(x_u(tau), omega, tau) - f(x_u(tau), u(tau), tau).
Vec needle_jump(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base, double tau,
                const Vec& omega);

/// First-order endpoint effect of a needle at (tau, omega): the jump transported to T.
Vec strong_variation_vector(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base, double tau,
                            const Vec& omega);

/// Up to `count` interior grid nodes of `base`, evenly spread, each at least one step away from
/// every breakpoint of u.
std::vector<double> needle_times(const Trajectory& base, const ControlSignal& u, int count);

/// Times tau_1 < ... < tau_Q with R_q values each and a common amplitude bound beta.
struct NeedlePackage {
  std::vector<double> taus;
  std::vector<std::vector<Vec>> omegas;
  double beta = 0.0;

  int total() const;
  int max_stack() const;
  /// Throws unless taus are increasing in [0, T), stacked intervals fit, and every omega is in U.
  void validate(double horizon, const ConstraintSet* U = nullptr) const;
};

/// omega^r_q on [tau_q + sum_{l<r} alpha^l_q, tau_q + sum_{l<=r} alpha^l_q), u elsewhere.
/// alpha is ordered lexicographically in (q, r).
ControlSignal apply_package(const ControlSignal& u, const NeedlePackage& chi, const Vec& alpha);

/// n x R matrix of strong variation vectors, lexicographic in (q, r). This is the Jacobian of
/// alpha -> E(u^alpha) at alpha = 0.
Mat package_jacobian(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base,
                     const NeedlePackage& chi);

/// Jacobian of alpha -> E(u^alpha) at a point of the amplitude box, from the boundary jumps of
/// u^alpha transported by the state transition matrix. Also returns E(u^alpha).
Mat package_jacobian_at(const ControlSystem& sys, const ControlSignal& u, const NeedlePackage& chi, const Vec& alpha,
                        int steps_per_unit, Vec* value = nullptr);

/// Quotients (E(u^{alpha dir}) - E(u)) / alpha against package_jacobian * dir.
SlopeReport fd_check_package(const ControlSystem& sys, const ControlSignal& u, const NeedlePackage& chi,
                             const Vec& direction, const std::vector<double>& alphas,
                             int steps_per_unit = kDefaultStepsPerUnit);

}  // namespace reach
