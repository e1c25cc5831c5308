#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "reach/expr.hpp"

namespace reach {

/// Control constraint set U in R^m.
class ConstraintSet {
 public:
  struct AllSpace {};
  struct Box {
    Vec lo;
    Vec hi;
  };
  struct Ball {
    Vec center;
    double radius;
  };
  struct FiniteSet {
    std::vector<Vec> points;
  };
  using Variant = std::variant<AllSpace, Box, Ball, FiniteSet>;

  static ConstraintSet all(int m);
  static ConstraintSet box(Vec lo, Vec hi);
  static ConstraintSet ball(Vec center, double radius);
  static ConstraintSet finite(std::vector<Vec> points);

  int dim() const { return m_; }
  bool is_convex() const { return !std::holds_alternative<FiniteSet>(set_); }
  const Variant& variant() const { return set_; }
  const char* kind_name() const;

  /// Euclidean distance from w to U.
  double distance(const Vec& w) const;
  /// True iff dist(w, U) <= tol.
  bool contains(const Vec& w, double tol = 1e-9) const;
  /// Closest point of U (nearest element for FiniteSet).
  Vec project(const Vec& w) const;

  /// Distance from theta to the normal cone N_U[w]. Convex variants only.
  double normal_cone_distance(const Vec& w, const Vec& theta) const;
  /// Feasible part of direction d at w (tangent-cone projection). Convex variants only.
  Vec project_tangent(const Vec& w, const Vec& d) const;

  /// Largest beta >= 0 with w + beta*d in U (infinity when unbounded along d).
  double max_step(const Vec& w, const Vec& d) const;

  /// Distance from w to the boundary of U, zero if w is outside or on it.
  double interior_depth(const Vec& w) const;

  /// Sample of candidate values for needle variations and Hamiltonian maximisation.
  /// Box: corners, per-axis face midpoints, centre, `extra` uniform points.
  /// Ball: centre plus 64 (or `extra` if larger) random boundary points and `extra` interior ones.
  /// FiniteSet: every point. AllSpace: offsets around `anchor` along each axis plus `extra`
  /// Gaussian samples.
  std::vector<Vec> sample(int extra, std::uint64_t seed, const Vec* anchor = nullptr) const;

 private:
  ConstraintSet(int m, Variant v) : m_(m), set_(std::move(v)) {}
  void require_convex(const char* op) const;
  void require_dim(const Vec& w) const;

  int m_ = 0;
  Variant set_;
};

}  // namespace reach
