#pragma once

#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "reach/constraint.hpp"
#include "reach/expr.hpp"

namespace reach {

/// Which one-sided limit to take at a discontinuity.
enum class Side { Right, Left };

/// Strictly increasing sampling times 0 = t_0 < ... < t_N = T.
class Partition {
 public:
  explicit Partition(std::vector<double> times);
  static Partition uniform(double horizon, int intervals);

  const std::vector<double>& times() const { return times_; }
  int intervals() const { return static_cast<int>(times_.size()) - 1; }
  double horizon() const { return times_.back(); }
  double length(int i) const { return times_[i + 1] - times_[i]; }
  /// Largest sampling gap.
  double norm() const;

  /// Index i with t in [t_i, t_{i+1}) (Right) or (t_i, t_{i+1}] (Left), clamped to [0, N-1].
  int interval_of(double t, Side side = Side::Right) const;

 private:
  std::vector<double> times_;
};

enum class Hold { ZeroOrder, Linear };

/// A replacement of the signal by a constant on [start, end).
struct Segment {
  double start;
  double end;
  Vec value;
};

/// Evaluable control u : [0, T] -> R^m. Immutable, cheap to copy.
class ControlSignal {
 public:
  struct PiecewiseConstant {
    Partition partition;
    std::vector<Vec> values;
  };
  struct GridSampled {
    std::vector<double> times;
    std::vector<Vec> values;
    Hold hold;
  };
  struct Analytic {
    std::vector<Expression> exprs;
  };
  struct Spliced;
  struct Projected;
  struct Combination;
  struct Data;

  static ControlSignal piecewise_constant(Partition partition, std::vector<Vec> values);
  static ControlSignal constant(const Vec& value, double horizon);
  static ControlSignal grid_sampled(std::vector<double> times, std::vector<Vec> values, Hold hold = Hold::ZeroOrder);
  /// Expressions parsed with n = m = 0, so only t may appear.
  static ControlSignal analytic(std::vector<Expression> exprs, double horizon);
  static ControlSignal analytic(const std::vector<std::string>& sources, double horizon);
  /// `base` overridden by each segment's constant value on [start, end). Segments must not overlap.
  static ControlSignal spliced(ControlSignal base, std::vector<Segment> segments);
  /// Pointwise tangent-cone projection t -> project_tangent(U, reference(t), direction(t)).
  static ControlSignal tangent_projected(ControlSignal reference, ControlSignal direction, ConstraintSet set);
  /// Pointwise sum of coefficient * signal.
  static ControlSignal combination(std::vector<std::pair<double, ControlSignal>> terms);

  int dim() const;
  double horizon() const;

  Vec eval(double t, Side side = Side::Right) const;
  void eval_into(double t, Side side, double* out) const;

  /// Discontinuity or kink times in the open interval (0, T), sorted and de-duplicated.
  std::vector<double> breakpoints() const;

  /// Non-null iff this signal is stored as piecewise constant data.
  const PiecewiseConstant* as_piecewise_constant() const;
  const char* kind_name() const;

 private:
  explicit ControlSignal(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  void collect_breakpoints(std::vector<double>& out) const;

  std::shared_ptr<const Data> data_;
};

/// Sorted union of breakpoint lists with near-duplicates (relative 1e-12) merged.
std::vector<double> merge_times(std::vector<double> times, double horizon);

}  // namespace reach
