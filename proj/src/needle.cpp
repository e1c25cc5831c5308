#include "reach/needle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reach/errors.hpp"

namespace reach {

namespace {

int nearest_node(const std::vector<double>& times, double t) {
  auto it = std::lower_bound(times.begin(), times.end(), t);
  int k = static_cast<int>(it - times.begin());
  if (k >= static_cast<int>(times.size())) return static_cast<int>(times.size()) - 1;
  if (k > 0 && std::abs(times[k - 1] - t) < std::abs(times[k] - t)) --k;
  return k;
}

}  // namespace

ControlSignal single_needle(const ControlSignal& u, double tau, const Vec& omega, double alpha,
                            const ConstraintSet* U) {
  if (omega.size() != u.dim()) throw DimensionError("needle value has wrong dimension");
  if (alpha < 0.0) throw std::invalid_argument("needle amplitude must be nonnegative");
  if (tau < 0.0 || tau >= u.horizon()) throw std::invalid_argument("needle time must lie in [0, T)");
  if (tau + alpha > u.horizon() * (1.0 + 1e-12)) throw std::invalid_argument("needle extends past T");
  if (U && !U->contains(omega)) throw std::invalid_argument("needle value is not in U");
  if (alpha == 0.0) return u;
  return ControlSignal::spliced(u, {Segment{tau, std::min(tau + alpha, u.horizon()), omega}});
}

Vec needle_jump(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base, double tau,
                const Vec& omega) {
  const Vec x = base.eval(tau);
  const Vec ut = u.eval(tau, Side::Right);
  return sys.dynamics->eval(x, omega, tau) - sys.dynamics->eval(x, ut, tau);
}

Vec strong_variation_vector(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base, double tau,
                            const Vec& omega) {
  return integrate_variational(sys, u, base, nullptr, tau, needle_jump(sys, u, base, tau, omega));
}

std::vector<double> needle_times(const Trajectory& base, const ControlSignal& u, int count) {
  const auto& t = base.times();
  const auto breaks = u.breakpoints();
  std::vector<double> eligible;
  for (int k = 1; k + 1 < static_cast<int>(t.size()); ++k) {
    const double h = std::max(t[k] - t[k - 1], t[k + 1] - t[k]);
    bool ok = true;
    auto it = std::lower_bound(breaks.begin(), breaks.end(), t[k] - h * (1.0 + 1e-9));
    if (it != breaks.end() && *it <= t[k] + h * (1.0 + 1e-9)) ok = false;
    if (ok) eligible.push_back(t[k]);
  }
  if (count <= 0 || eligible.empty()) return {};
  if (static_cast<int>(eligible.size()) <= count) return eligible;
  std::vector<double> out;
  const double stride = static_cast<double>(eligible.size()) / count;
  for (int i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>((i + 0.5) * stride);
    out.push_back(eligible[std::min(idx, eligible.size() - 1)]);
  }
  return out;
}

int NeedlePackage::total() const {
  int r = 0;
  for (const auto& o : omegas) r += static_cast<int>(o.size());
  return r;
}

int NeedlePackage::max_stack() const {
  int r = 0;
  for (const auto& o : omegas) r = std::max(r, static_cast<int>(o.size()));
  return r;
}

void NeedlePackage::validate(double horizon, const ConstraintSet* U) const {
  if (taus.size() != omegas.size()) throw std::invalid_argument("package needs one value list per time");
  if (!(beta >= 0.0)) throw std::invalid_argument("package amplitude bound must be nonnegative");
  const double slack = 1e-12 * std::max(1.0, horizon);
  for (std::size_t q = 0; q < taus.size(); ++q) {
    if (taus[q] < 0.0 || taus[q] >= horizon) throw std::invalid_argument("package time outside [0, T)");
    if (q > 0 && !(taus[q] > taus[q - 1])) throw std::invalid_argument("package times must be strictly increasing");
    const double next = q + 1 < taus.size() ? taus[q + 1] : horizon;
    if (taus[q] + static_cast<double>(omegas[q].size()) * beta > next + slack) {
      throw std::invalid_argument("package intervals overlap: beta too large");
    }
    if (U) {
      for (const auto& w : omegas[q]) {
        if (!U->contains(w)) throw std::invalid_argument("package value is not in U");
      }
    }
  }
}

ControlSignal apply_package(const ControlSignal& u, const NeedlePackage& chi, const Vec& alpha) {
  if (alpha.size() != chi.total()) throw DimensionError("amplitude vector has wrong length");
  const double slack = 1e-12 * std::max(1.0, chi.beta);
  std::vector<Segment> segments;
  int idx = 0;
  for (std::size_t q = 0; q < chi.taus.size(); ++q) {
    double cursor = chi.taus[q];
    for (const auto& w : chi.omegas[q]) {
      const double a = alpha[idx++];
      if (a < -slack || a > chi.beta + slack) throw std::invalid_argument("amplitude outside the package box");
      if (a > 0.0) {
        segments.push_back(Segment{cursor, cursor + a, w});
        cursor += a;
      }
    }
    const double next = q + 1 < chi.taus.size() ? chi.taus[q + 1] : u.horizon();
    if (cursor > next * (1.0 + 1e-12)) throw std::invalid_argument("package intervals overlap");
  }
  if (segments.empty()) return u;
  return ControlSignal::spliced(u, std::move(segments));
}

Mat package_jacobian(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base,
                     const NeedlePackage& chi) {
  Mat J(sys.n, chi.total());
  int col = 0;
  for (std::size_t q = 0; q < chi.taus.size(); ++q) {
    for (const auto& w : chi.omegas[q]) J.col(col++) = strong_variation_vector(sys, u, base, chi.taus[q], w);
  }
  return J;
}

Mat package_jacobian_at(const ControlSystem& sys, const ControlSignal& u, const NeedlePackage& chi, const Vec& alpha,
                        int steps_per_unit, Vec* value) {
  const ControlSignal ua = apply_package(u, chi, alpha);
  std::vector<double> bounds;
  std::vector<std::vector<double>> s(chi.taus.size());
  int idx = 0;
  for (std::size_t q = 0; q < chi.taus.size(); ++q) {
    double cursor = chi.taus[q];
    s[q].push_back(cursor);
    for (std::size_t r = 0; r < chi.omegas[q].size(); ++r) {
      cursor += std::max(0.0, alpha[idx++]);
      s[q].push_back(cursor);
    }
    bounds.insert(bounds.end(), s[q].begin(), s[q].end());
  }
  const Trajectory traj = integrate_state(sys, ua, steps_per_unit, bounds);
  if (value) *value = traj.final_state();
  const auto P = integrate_adjoint_matrix(sys, ua, traj, Mat::Identity(sys.n, sys.n));
  const auto& times = traj.times();
  Mat J(sys.n, chi.total());
  int col = 0;
  for (std::size_t q = 0; q < chi.taus.size(); ++q) {
    const auto& om = chi.omegas[q];
    const int R = static_cast<int>(om.size());
    // transported[j] is the effect of pushing boundary s_j (1-based) to the right.
    std::vector<Vec> transported(static_cast<std::size_t>(R) + 1);
    for (int j = 1; j <= R; ++j) {
      const double sj = s[q][j];
      const int k = nearest_node(times, sj);
      const Vec x = traj.state(k);
      const Vec right = j < R ? om[j] : u.eval(sj, Side::Right);
      const Vec jump = sys.dynamics->eval(x, om[j - 1], sj) - sys.dynamics->eval(x, right, sj);
      transported[j] = P[k].transpose() * jump;
    }
    Vec acc = Vec::Zero(sys.n);
    std::vector<Vec> cols(static_cast<std::size_t>(R));
    for (int j = R; j >= 1; --j) {
      acc += transported[j];
      cols[j - 1] = acc;
    }
    for (int r = 0; r < R; ++r) J.col(col++) = cols[r];
  }
  return J;
}

SlopeReport fd_check_package(const ControlSystem& sys, const ControlSignal& u, const NeedlePackage& chi,
                             const Vec& direction, const std::vector<double>& alphas, int steps_per_unit) {
  SlopeReport rep;
  const Trajectory base = integrate_state(sys, u, steps_per_unit, chi.taus);
  const Vec e0 = base.final_state();
  rep.prediction = package_jacobian(sys, u, base, chi) * direction;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double a : alphas) {
    rep.alphas.push_back(a);
    try {
      const ControlSignal ua = apply_package(u, chi, a * direction);
      const Vec q = (endpoint(sys, ua, steps_per_unit) - e0) / a;
      const double dev = (q - rep.prediction).norm();
      rep.quotients.push_back(q);
      rep.deviations.push_back(dev);
      rep.errors.emplace_back();
      rep.max_deviation = std::max(rep.max_deviation, dev);
    } catch (const std::exception& e) {
      rep.quotients.push_back(Vec::Constant(sys.n, nan));
      rep.deviations.push_back(nan);
      rep.errors.emplace_back(e.what());
    }
  }
  return rep;
}

}  // namespace reach
