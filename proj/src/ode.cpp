#include "reach/ode.hpp"

#include <algorithm>
#include <cmath>

#include "reach/errors.hpp"

namespace reach {

namespace {

void hermite(double s, double h, const double* x0, const double* x1, const double* d0, const double* d1, int n,
             double* out) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  for (int i = 0; i < n; ++i) out[i] = h00 * x0[i] + h10 * h * d0[i] + h01 * x1[i] + h11 * h * d1[i];
}

int locate(const std::vector<double>& times, double t, bool left) {
  const int steps = static_cast<int>(times.size()) - 1;
  int k;
  if (left) {
    k = static_cast<int>(std::lower_bound(times.begin(), times.end(), t) - times.begin()) - 1;
  } else {
    k = static_cast<int>(std::upper_bound(times.begin(), times.end(), t) - times.begin()) - 1;
  }
  return std::clamp(k, 0, steps - 1);
}

void check_finite(const double* v, int n, double t) {
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(v[i])) throw IntegrationError("non-finite value encountered", t);
  }
}

std::vector<double> grid_breakpoints(const ControlSystem& sys, const ControlSignal& u,
                                     const std::vector<double>& extra) {
  std::vector<double> b = u.breakpoints();
  for (double t : sys.dynamics->time_breakpoints(sys.T)) b.push_back(t);
  b.insert(b.end(), extra.begin(), extra.end());
  return merge_times(std::move(b), sys.T);
}

}  // namespace

std::vector<double> build_grid(double a, double b, const std::vector<double>& breakpoints, int steps_per_unit) {
  if (steps_per_unit < 1) throw std::invalid_argument("steps_per_unit must be >= 1");
  if (!(b > a)) throw std::invalid_argument("grid needs a < b");
  std::vector<double> knots{a};
  const double eps = 1e-12 * std::max(1.0, std::abs(b));
  std::vector<double> inner;
  for (double t : breakpoints) {
    if (t > a + eps && t < b - eps) inner.push_back(t);
  }
  std::sort(inner.begin(), inner.end());
  for (double t : inner) {
    if (t - knots.back() > eps) knots.push_back(t);
  }
  knots.push_back(b);
  std::vector<double> out{a};
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double lo = knots[i - 1];
    const double hi = knots[i];
    const int sub = std::max(1, static_cast<int>(std::ceil((hi - lo) * steps_per_unit - 1e-9)));
    for (int j = 1; j < sub; ++j) out.push_back(lo + (hi - lo) * static_cast<double>(j) / sub);
    out.push_back(hi);
  }
  return out;
}

Trajectory::Trajectory(std::vector<double> times, Mat states, Mat slope_start, Mat slope_end)
    : times_(std::move(times)), states_(std::move(states)), slope_start_(std::move(slope_start)),
      slope_end_(std::move(slope_end)) {}

int Trajectory::step_of(double t, bool left) const { return locate(times_, t, left); }

void Trajectory::eval_in_step(int k, double t, double* out) const {
  const double h = times_[k + 1] - times_[k];
  const double s = (t - times_[k]) / h;
  hermite(s, h, states_.col(k).data(), states_.col(k + 1).data(), slope_start_.col(k).data(),
          slope_end_.col(k).data(), static_cast<int>(states_.rows()), out);
}

Vec Trajectory::eval(double t) const {
  Vec out(states_.rows());
  eval_in_step(step_of(t), t, out.data());
  return out;
}

double Trajectory::sup_norm() const {
  double r = 0.0;
  for (Eigen::Index k = 0; k < states_.cols(); ++k) r = std::max(r, states_.col(k).norm());
  return r;
}

AdjointArc::AdjointArc(std::vector<double> times, Mat costates, Mat slope_start, Mat slope_end)
    : times_(std::move(times)), costates_(std::move(costates)), slope_start_(std::move(slope_start)),
      slope_end_(std::move(slope_end)) {}

Vec AdjointArc::eval(double t) const {
  const int k = locate(times_, t, false);
  const double h = times_[k + 1] - times_[k];
  Vec out(costates_.rows());
  hermite((t - times_[k]) / h, h, costates_.col(k).data(), costates_.col(k + 1).data(), slope_start_.col(k).data(),
          slope_end_.col(k).data(), static_cast<int>(costates_.rows()), out.data());
  return out;
}

Trajectory integrate_state(const ControlSystem& sys, const ControlSignal& u, int steps_per_unit,
                           const std::vector<double>& extra_breakpoints) {
  if (u.dim() != sys.m) throw DimensionError("control dimension does not match m");
  std::vector<double> times = build_grid(0.0, sys.T, grid_breakpoints(sys, u, extra_breakpoints), steps_per_unit);
  const int n = sys.n;
  const int steps = static_cast<int>(times.size()) - 1;
  Mat X(n, steps + 1);
  Mat D0(n, steps);
  Mat D1(n, steps);
  X.col(0) = sys.x0;
  Vec k1(n), k2(n), k3(n), k4(n), tmp(n);
  Vec ua(sys.m), um(sys.m), ub(sys.m);
  const Dynamics& f = *sys.dynamics;
  for (int k = 0; k < steps; ++k) {
    const double a = times[k];
    const double b = times[k + 1];
    const double h = b - a;
    const double mid = a + 0.5 * h;
    u.eval_into(a, Side::Right, ua.data());
    u.eval_into(mid, Side::Right, um.data());
    u.eval_into(b, Side::Left, ub.data());
    const double* x = X.col(k).data();
    f.eval(x, ua.data(), a, k1.data());
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    f.eval(tmp.data(), um.data(), mid, k2.data());
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    f.eval(tmp.data(), um.data(), mid, k3.data());
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    f.eval(tmp.data(), ub.data(), b, k4.data());
    double* xn = X.col(k + 1).data();
    for (int i = 0; i < n; ++i) xn[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    check_finite(xn, n, b);
    D0.col(k) = k1;
    f.eval(xn, ub.data(), b, D1.col(k).data());
  }
  return Trajectory(std::move(times), std::move(X), std::move(D0), std::move(D1));
}

Vec integrate_variational(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base,
                          const ControlSignal* v, double start, const Vec& w_start) {
  const int n = sys.n;
  const int m = sys.m;
  if (w_start.size() != n) throw DimensionError("variational initial value has wrong length");
  if (v && v->dim() != m) throw DimensionError("direction dimension does not match m");
  if (start < 0.0 || start >= sys.T) throw std::invalid_argument("variational start must lie in [0, T)");
  const auto& bt = base.times();
  std::vector<double> nodes{start};
  for (double t : bt) {
    if (t > start) nodes.push_back(t);
  }
  if (v) {
    for (double t : v->breakpoints()) {
      if (t > start) nodes.push_back(t);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  const double eps = 1e-12 * std::max(1.0, sys.T);
  std::vector<double> grid;
  for (double t : nodes) {
    if (grid.empty() || t - grid.back() > eps) grid.push_back(t);
  }
  if (sys.T - grid.back() > eps) grid.push_back(sys.T);
  grid.back() = sys.T;

  Vec w = w_start;
  Vec x(n), ua(m), um(m), ub(m), va(m), vm(m), vb(m), f(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
  Mat fx, fu;
  const Dynamics& dyn = *sys.dynamics;
  auto rhs = [&](double t, const Vec& uu, const Vec& vv, const Vec& ww, Vec& out, int step) {
    base.eval_in_step(step, t, x.data());
    dyn.jacobian(x.data(), uu.data(), t, f.data(), fx, fu);
    out.noalias() = fx * ww;
    if (v) out.noalias() += fu * vv;
  };
  va.setZero();
  vm.setZero();
  vb.setZero();
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const double a = grid[j];
    const double b = grid[j + 1];
    const double h = b - a;
    const double mid = a + 0.5 * h;
    const int step = base.step_of(mid);
    u.eval_into(a, Side::Right, ua.data());
    u.eval_into(mid, Side::Right, um.data());
    u.eval_into(b, Side::Left, ub.data());
    if (v) {
      v->eval_into(a, Side::Right, va.data());
      v->eval_into(mid, Side::Right, vm.data());
      v->eval_into(b, Side::Left, vb.data());
    }
    rhs(a, ua, va, w, k1, step);
    tmp = w + 0.5 * h * k1;
    rhs(mid, um, vm, tmp, k2, step);
    tmp = w + 0.5 * h * k2;
    rhs(mid, um, vm, tmp, k3, step);
    tmp = w + h * k3;
    rhs(b, ub, vb, tmp, k4, step);
    w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check_finite(w.data(), n, b);
  }
  return w;
}

std::vector<Mat> integrate_adjoint_matrix(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base,
                                          const Mat& terminal) {
  const int n = sys.n;
  const int m = sys.m;
  if (terminal.rows() != n) throw DimensionError("adjoint terminal value has wrong row count");
  const auto& bt = base.times();
  const int steps = base.steps();
  std::vector<Mat> P(static_cast<std::size_t>(steps) + 1);
  P[steps] = terminal;
  Vec x(n), f(n), ua(m), um(m), ub(m);
  Mat fa, fm, fb, fu;
  const Dynamics& dyn = *sys.dynamics;
  for (int k = steps - 1; k >= 0; --k) {
    const double a = bt[k];
    const double b = bt[k + 1];
    const double h = b - a;
    const double mid = a + 0.5 * h;
    u.eval_into(a, Side::Right, ua.data());
    u.eval_into(mid, Side::Right, um.data());
    u.eval_into(b, Side::Left, ub.data());
    dyn.jacobian(base.states().col(k + 1).data(), ub.data(), b, f.data(), fb, fu);
    base.eval_in_step(k, mid, x.data());
    dyn.jacobian(x.data(), um.data(), mid, f.data(), fm, fu);
    dyn.jacobian(base.states().col(k).data(), ua.data(), a, f.data(), fa, fu);
    const Mat& Pb = P[k + 1];
    const Mat K1 = fb.transpose() * Pb;
    const Mat K2 = fm.transpose() * (Pb + 0.5 * h * K1);
    const Mat K3 = fm.transpose() * (Pb + 0.5 * h * K2);
    const Mat K4 = fa.transpose() * (Pb + h * K3);
    P[k] = Pb + h / 6.0 * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
    check_finite(P[k].data(), static_cast<int>(P[k].size()), a);
  }
  return P;
}

AdjointArc integrate_adjoint(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base, const Vec& psi) {
  if (psi.size() != sys.n) throw DimensionError("psi has wrong length");
  const auto P = integrate_adjoint_matrix(sys, u, base, Mat(psi));
  const int n = sys.n;
  const int m = sys.m;
  const int steps = base.steps();
  const auto& bt = base.times();
  Mat C(n, steps + 1);
  Mat S0(n, steps);
  Mat S1(n, steps);
  Vec f(n), ua(m), ub(m);
  Mat fx, fu;
  const Dynamics& dyn = *sys.dynamics;
  for (int k = 0; k <= steps; ++k) C.col(k) = P[k].col(0);
  for (int k = 0; k < steps; ++k) {
    u.eval_into(bt[k], Side::Right, ua.data());
    u.eval_into(bt[k + 1], Side::Left, ub.data());
    dyn.jacobian(base.states().col(k).data(), ua.data(), bt[k], f.data(), fx, fu);
    S0.col(k) = -fx.transpose() * C.col(k);
    dyn.jacobian(base.states().col(k + 1).data(), ub.data(), bt[k + 1], f.data(), fx, fu);
    S1.col(k) = -fx.transpose() * C.col(k + 1);
  }
  return AdjointArc(bt, std::move(C), std::move(S0), std::move(S1));
}

double hamiltonian(const ControlSystem& sys, const Vec& x, const Vec& u, const Vec& p, double t) {
  return p.dot(sys.dynamics->eval(x, u, t));
}

Vec hamiltonian_control_gradient(const ControlSystem& sys, const Vec& x, const Vec& u, const Vec& p, double t) {
  Vec f(sys.n);
  Mat fx, fu;
  sys.dynamics->jacobian(x.data(), u.data(), t, f.data(), fx, fu);
  return fu.transpose() * p;
}

}  // namespace reach
