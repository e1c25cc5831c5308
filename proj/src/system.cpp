#include "reach/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reach/errors.hpp"

namespace reach {

Vec Dynamics::eval(const Vec& x, const Vec& u, double t) const {
  if (x.size() != state_dim() || u.size() != control_dim()) throw DimensionError("dynamics argument dimension mismatch");
  Vec out(state_dim());
  eval(x.data(), u.data(), t, out.data());
  return out;
}

ExpressionDynamics::ExpressionDynamics(std::vector<Expression> rows, int n, int m)
    : rows_(std::move(rows)), n_(n), m_(m) {
  if (static_cast<int>(rows_.size()) != n_) {
    throw DimensionError("dynamics needs " + std::to_string(n_) + " expressions, got " + std::to_string(rows_.size()));
  }
  if (n_ + m_ + 1 > kMaxDualWidth) throw DimensionError("n + m + 1 exceeds the supported derivative width");
  for (const auto& e : rows_) {
    if (e.state_dim() != n_ || e.control_dim() != m_) throw DimensionError("expression declared with wrong (n, m)");
  }
}

std::shared_ptr<ExpressionDynamics> ExpressionDynamics::parse(const std::vector<std::string>& sources, int n, int m) {
  std::vector<Expression> rows;
  rows.reserve(sources.size());
  for (const auto& s : sources) rows.push_back(Expression::parse(s, n, m));
  return std::make_shared<ExpressionDynamics>(std::move(rows), n, m);
}

void ExpressionDynamics::eval(const double* x, const double* u, double t, double* out) const {
  for (int i = 0; i < n_; ++i) out[i] = rows_[i].eval_raw(x, u, t);
}

void ExpressionDynamics::jacobian(const double* x, const double* u, double t, double* f, Mat& fx, Mat& fu) const {
  fx.resize(n_, n_);
  fu.resize(n_, m_);
  double gx[kMaxDualWidth];
  double gu[kMaxDualWidth];
  double gt;
  for (int i = 0; i < n_; ++i) {
    f[i] = rows_[i].eval_partials_raw(x, u, t, gx, gu, &gt);
    for (int j = 0; j < n_; ++j) fx(i, j) = gx[j];
    for (int j = 0; j < m_; ++j) fu(i, j) = gu[j];
  }
}

std::string ExpressionDynamics::describe() const {
  std::string out = "[";
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (i) out += ", ";
    out += rows_[i].source();
  }
  return out + "]";
}

LinearDynamics::LinearDynamics(Mat A, Mat B, Vec g) : A_(std::move(A)), B_(std::move(B)), g_(std::move(g)) {
  const auto n = A_.rows();
  if (A_.cols() != n || B_.rows() != n || B_.cols() < 1 || n < 1) throw DimensionError("linear dynamics: A must be n x n and B n x m");
  if (g_.size() == 0) g_ = Vec::Zero(n);
  if (g_.size() != n) throw DimensionError("linear dynamics: drift must have length n");
}

void LinearDynamics::eval(const double* x, const double* u, double, double* out) const {
  const int n = state_dim();
  Eigen::Map<const Vec> xm(x, n);
  Eigen::Map<const Vec> um(u, control_dim());
  Eigen::Map<Vec>(out, n) = A_ * xm + B_ * um + g_;
}

void LinearDynamics::jacobian(const double* x, const double* u, double t, double* f, Mat& fx, Mat& fu) const {
  eval(x, u, t, f);
  fx = A_;
  fu = B_;
}

std::string LinearDynamics::describe() const {
  std::ostringstream os;
  os << "linear(n=" << state_dim() << ", m=" << control_dim() << ")";
  return os.str();
}

FunctionDynamics::FunctionDynamics(int n, int m, EvalFn eval, JacobianFn jacobian, std::vector<double> breakpoints,
                                   std::string label)
    : n_(n), m_(m), eval_(std::move(eval)), jacobian_(std::move(jacobian)), breakpoints_(std::move(breakpoints)),
      label_(std::move(label)) {
  if (n_ < 1 || m_ < 1) throw DimensionError("function dynamics needs n, m >= 1");
}

void FunctionDynamics::eval(const double* x, const double* u, double t, double* out) const { eval_(x, u, t, out); }

void FunctionDynamics::jacobian(const double* x, const double* u, double t, double* f, Mat& fx, Mat& fu) const {
  fx.resize(n_, n_);
  fu.resize(n_, m_);
  jacobian_(x, u, t, f, fx, fu);
}

std::vector<double> FunctionDynamics::time_breakpoints(double horizon) const {
  std::vector<double> out;
  for (double b : breakpoints_) {
    if (b > 0.0 && b < horizon) out.push_back(b);
  }
  return out;
}

double cutoff_profile(double r, double M) {
  if (r <= 2.0 * M) return 1.0;
  if (r >= 3.0 * M) return 0.0;
  const double q = (r - 2.0 * M) / M;
  return 1.0 - 3.0 * q * q + 2.0 * q * q * q;
}

double cutoff_profile_derivative(double r, double M) {
  if (r <= 2.0 * M || r >= 3.0 * M) return 0.0;
  const double q = (r - 2.0 * M) / M;
  return (-6.0 * q + 6.0 * q * q) / M;
}

TruncatedDynamics::TruncatedDynamics(DynamicsPtr base, double M) : base_(std::move(base)), M_(M) {
  if (!(M_ > 0.0)) throw std::invalid_argument("truncation radius must be positive");
  if (!base_) throw std::invalid_argument("truncation needs base dynamics");
}

double TruncatedDynamics::cutoff(const Vec& x, const Vec& u) const {
  return cutoff_profile(x.norm(), M_) * cutoff_profile(u.norm(), M_);
}

void TruncatedDynamics::eval(const double* x, const double* u, double t, double* out) const {
  const int n = state_dim();
  const double rx = Eigen::Map<const Vec>(x, n).norm();
  const double ru = Eigen::Map<const Vec>(u, control_dim()).norm();
  const double lam = cutoff_profile(rx, M_) * cutoff_profile(ru, M_);
  if (lam == 0.0) {
    std::fill(out, out + n, 0.0);
    return;
  }
  base_->eval(x, u, t, out);
  for (int i = 0; i < n; ++i) out[i] *= lam;
}

void TruncatedDynamics::jacobian(const double* x, const double* u, double t, double* f, Mat& fx, Mat& fu) const {
  const int n = state_dim();
  const int m = control_dim();
  Eigen::Map<const Vec> xm(x, n);
  Eigen::Map<const Vec> um(u, m);
  const double rx = xm.norm();
  const double ru = um.norm();
  const double sx = cutoff_profile(rx, M_);
  const double su = cutoff_profile(ru, M_);
  const double lam = sx * su;
  if (lam == 0.0) {
    std::fill(f, f + n, 0.0);
    fx = Mat::Zero(n, n);
    fu = Mat::Zero(n, m);
    return;
  }
  base_->jacobian(x, u, t, f, fx, fu);
  Eigen::Map<Vec> fm(f, n);
  // grad of lam: s'(|x|) x/|x| s(|u|), zero at the origin where s is flat.
  Vec glx = Vec::Zero(n);
  Vec glu = Vec::Zero(m);
  if (rx > 0.0) glx = (cutoff_profile_derivative(rx, M_) * su / rx) * xm;
  if (ru > 0.0) glu = (cutoff_profile_derivative(ru, M_) * sx / ru) * um;
  fx = lam * fx + fm * glx.transpose();
  fu = lam * fu + fm * glu.transpose();
  fm *= lam;
}

std::string TruncatedDynamics::describe() const {
  std::ostringstream os;
  os << "truncated(M=" << M_ << ", " << base_->describe() << ")";
  return os.str();
}

ShiftedDynamics::ShiftedDynamics(DynamicsPtr base, double offset, double base_horizon)
    : base_(std::move(base)), offset_(offset), base_horizon_(base_horizon) {}

void ShiftedDynamics::eval(const double* x, const double* u, double t, double* out) const {
  base_->eval(x, u, t + offset_, out);
}

void ShiftedDynamics::jacobian(const double* x, const double* u, double t, double* f, Mat& fx, Mat& fu) const {
  base_->jacobian(x, u, t + offset_, f, fx, fu);
}

std::vector<double> ShiftedDynamics::time_breakpoints(double horizon) const {
  std::vector<double> out;
  for (double b : base_->time_breakpoints(base_horizon_)) {
    const double s = b - offset_;
    if (s > 0.0 && s < horizon) out.push_back(s);
  }
  return out;
}

std::string ShiftedDynamics::describe() const {
  std::ostringstream os;
  os << "shifted(" << offset_ << ", " << base_->describe() << ")";
  return os.str();
}

ControlSystem ControlSystem::make(double T, Vec x0, DynamicsPtr dynamics, ConstraintSet U) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("horizon T must be positive and finite");
  if (!dynamics) throw std::invalid_argument("control system needs dynamics");
  const int n = dynamics->state_dim();
  const int m = dynamics->control_dim();
  if (x0.size() != n) throw DimensionError("x0 has length " + std::to_string(x0.size()) + ", expected " + std::to_string(n));
  if (U.dim() != m) throw DimensionError("constraint set dimension does not match m");
  ControlSystem sys;
  sys.n = n;
  sys.m = m;
  sys.T = T;
  sys.x0 = std::move(x0);
  sys.dynamics = std::move(dynamics);
  sys.U = std::move(U);
  return sys;
}

ControlSystem ControlSystem::with_dynamics(DynamicsPtr d) const { return make(T, x0, std::move(d), U); }

ControlSystem ControlSystem::with_start(Vec start) const { return make(T, std::move(start), dynamics, U); }

ControlSystem truncate(const ControlSystem& sys, double M) {
  return sys.with_dynamics(std::make_shared<TruncatedDynamics>(sys.dynamics, M));
}

}  // namespace reach
