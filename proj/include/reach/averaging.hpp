#pragma once

#include <limits>

#include "reach/control.hpp"

namespace reach {

enum class SampleRule { Midpoint, LeftThird };

/// Piecewise constant control whose value on each interval is the mean of u there.
/// Means use composite Simpson with quad_points subintervals per smooth piece of u.
ControlSignal average_project(const ControlSignal& u, const Partition& part, int quad_points = 8);

/// Mean of u over [a, b], splitting at the breakpoints of u.
Vec interval_mean(const ControlSignal& u, double a, double b, int quad_points = 8);

/// Piecewise constant control taking the value u(xi_i) on [t_i, t_{i+1}), xi_i chosen by the rule.
ControlSignal value_sample_project(const ControlSignal& u, const Partition& part,
                                   SampleRule rule = SampleRule::Midpoint);

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// (int_0^T |u - v|^s)^(1/s) with |.| Euclidean; s = kInfNorm takes the sup over sample points,
/// including both one-sided limits at breakpoints. `grid` subintervals per smooth piece.
double lp_distance(const ControlSignal& u, const ControlSignal& v, double s, int grid = 64);

/// ||u||_{L^s}.
double lp_norm(const ControlSignal& u, double s, int grid = 64);

}  // namespace reach
