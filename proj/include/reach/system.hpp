#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reach/constraint.hpp"
#include "reach/expr.hpp"

namespace reach {

/// Right-hand side f(x, u, t) of x' = f(x, u, t) together with its partial Jacobians.
class Dynamics {
 public:
  virtual ~Dynamics() = default;

  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;

  /// out has n entries.
  virtual void eval(const double* x, const double* u, double t, double* out) const = 0;
  /// f has n entries; fx is resized to n x n and fu to n x m.
  virtual void jacobian(const double* x, const double* u, double t, double* f, Mat& fx, Mat& fu) const = 0;

  /// Times in (0, T) where f is only piecewise smooth in t. Integration grids include them.
  virtual std::vector<double> time_breakpoints(double /*horizon*/) const { return {}; }

  virtual std::string describe() const = 0;

  Vec eval(const Vec& x, const Vec& u, double t) const;
};

using DynamicsPtr = std::shared_ptr<const Dynamics>;

/// One parsed expression per state component.
class ExpressionDynamics final : public Dynamics {
 public:
  ExpressionDynamics(std::vector<Expression> rows, int n, int m);
  static std::shared_ptr<ExpressionDynamics> parse(const std::vector<std::string>& sources, int n, int m);

  int state_dim() const override { return n_; }
  int control_dim() const override { return m_; }
  using Dynamics::eval;
  void eval(const double* x, const double* u, double t, double* out) const override;
  void jacobian(const double* x, const double* u, double t, double* f, Mat& fx, Mat& fu) const override;
  std::string describe() const override;

  const std::vector<Expression>& rows() const { return rows_; }

 private:
  std::vector<Expression> rows_;
  int n_;
  int m_;
};

/// f(x, u, t) = A x + B u + g.
class LinearDynamics final : public Dynamics {
 public:
  LinearDynamics(Mat A, Mat B, Vec g);

  int state_dim() const override { return static_cast<int>(A_.rows()); }
  int control_dim() const override { return static_cast<int>(B_.cols()); }
  using Dynamics::eval;
  void eval(const double* x, const double* u, double t, double* out) const override;
  void jacobian(const double* x, const double* u, double t, double* f, Mat& fx, Mat& fu) const override;
  std::string describe() const override;

  const Mat& A() const { return A_; }
  const Mat& B() const { return B_; }
  const Vec& g() const { return g_; }

 private:
  Mat A_;
  Mat B_;
  Vec g_;
};

/// Dynamics given by callables, for right-hand sides outside the expression grammar.
class FunctionDynamics final : public Dynamics {
 public:
  using EvalFn = std::function<void(const double* x, const double* u, double t, double* out)>;
  using JacobianFn = std::function<void(const double* x, const double* u, double t, double* f, Mat& fx, Mat& fu)>;

  FunctionDynamics(int n, int m, EvalFn eval, JacobianFn jacobian, std::vector<double> breakpoints = {},
                   std::string label = "function");

  int state_dim() const override { return n_; }
  int control_dim() const override { return m_; }
  using Dynamics::eval;
  void eval(const double* x, const double* u, double t, double* out) const override;
  void jacobian(const double* x, const double* u, double t, double* f, Mat& fx, Mat& fu) const override;
  std::vector<double> time_breakpoints(double horizon) const override;
  std::string describe() const override { return label_; }

 private:
  int n_;
  int m_;
  EvalFn eval_;
  JacobianFn jacobian_;
  std::vector<double> breakpoints_;
  std::string label_;
};

/// Cubic smoothstep profile: 1 on [0, 2M], 0 on [3M, inf), C^1 in between.
double cutoff_profile(double r, double M);
double cutoff_profile_derivative(double r, double M);

/// f^M(x, u, t) = s(|x|) s(|u|) f(x, u, t).
class TruncatedDynamics final : public Dynamics {
 public:
  TruncatedDynamics(DynamicsPtr base, double M);

  int state_dim() const override { return base_->state_dim(); }
  int control_dim() const override { return base_->control_dim(); }
  using Dynamics::eval;
  void eval(const double* x, const double* u, double t, double* out) const override;
  void jacobian(const double* x, const double* u, double t, double* f, Mat& fx, Mat& fu) const override;
  std::vector<double> time_breakpoints(double horizon) const override { return base_->time_breakpoints(horizon); }
  std::string describe() const override;

  double radius() const { return M_; }
  const DynamicsPtr& base() const { return base_; }
  /// Lambda^M(x, u).
  double cutoff(const Vec& x, const Vec& u) const;

 private:
  DynamicsPtr base_;
  double M_;
};

/// f(x, u, t + offset). Used to restart a system from an intermediate time.
class ShiftedDynamics final : public Dynamics {
 public:
  ShiftedDynamics(DynamicsPtr base, double offset, double base_horizon);

  int state_dim() const override { return base_->state_dim(); }
  int control_dim() const override { return base_->control_dim(); }
  using Dynamics::eval;
  void eval(const double* x, const double* u, double t, double* out) const override;
  void jacobian(const double* x, const double* u, double t, double* f, Mat& fx, Mat& fu) const override;
  std::vector<double> time_breakpoints(double horizon) const override;
  std::string describe() const override;

 private:
  DynamicsPtr base_;
  double offset_;
  double base_horizon_;
};

/// x' = f(x, u, t) on [0, T], x(0) = x0, u(t) in U.
struct ControlSystem {
  int n = 0;
  int m = 0;
  double T = 0.0;
  Vec x0;
  DynamicsPtr dynamics;
  ConstraintSet U = ConstraintSet::all(1);

  /// Validates dimensions and horizon.
  static ControlSystem make(double T, Vec x0, DynamicsPtr dynamics, ConstraintSet U);

  ControlSystem with_dynamics(DynamicsPtr d) const;
  ControlSystem with_start(Vec start) const;

  /// Non-null when the dynamics are stored as A x + B u + g.
  const LinearDynamics* as_linear() const { return dynamic_cast<const LinearDynamics*>(dynamics.get()); }
  const ExpressionDynamics* as_expression() const {
    return dynamic_cast<const ExpressionDynamics*>(dynamics.get());
  }
};

/// The system with f replaced by its truncation f^M.
ControlSystem truncate(const ControlSystem& sys, double M);

}  // namespace reach
