#include "reach/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "reach/errors.hpp"

namespace reach {

const char* to_string(RegularityKind k) {
  switch (k) {
    case RegularityKind::StronglyRegular: return "strongly-regular";
    case RegularityKind::StronglyURegular: return "strongly-U-regular";
    case RegularityKind::WeaklyURegular: return "weakly-U-regular";
  }
  return "?";
}

const char* to_string(Verdict v) { return v == Verdict::Regular ? "regular" : "not-detected"; }

const char* to_string(LiftKind k) {
  switch (k) {
    case LiftKind::NHG: return "NHG";
    case LiftKind::HG: return "HG";
    case LiftKind::HM: return "HM";
  }
  return "?";
}

RegularityKind regularity_kind_from_string(const std::string& s) {
  if (s == "strong" || s == "strongly-regular") return RegularityKind::StronglyRegular;
  if (s == "strong-U" || s == "strongly-U-regular") return RegularityKind::StronglyURegular;
  if (s == "weak-U" || s == "weakly-U-regular") return RegularityKind::WeaklyURegular;
  throw std::invalid_argument("unknown regularity kind \"" + s + "\" (strong | strong-U | weak-U)");
}

LiftKind lift_kind_from_string(const std::string& s) {
  if (s == "NHG" || s == "nhg") return LiftKind::NHG;
  if (s == "HG" || s == "hg") return LiftKind::HG;
  if (s == "HM" || s == "hm") return LiftKind::HM;
  throw std::invalid_argument("unknown lift kind \"" + s + "\" (NHG | HG | HM)");
}

SpanResult cone_spans(const std::vector<Vec>& vectors, int n, double tol) {
  SpanResult out;
  std::vector<int> kept;
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (vectors[k].size() != n) throw DimensionError("cone sample vector has wrong length");
    if (vectors[k].allFinite() && vectors[k].norm() > 1e-9) kept.push_back(static_cast<int>(k));
  }
  Mat Z(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    Z.col(static_cast<Eigen::Index>(j)) = vectors[kept[j]].normalized();
  }
  double worst = -1.0;
  Vec worst_residual;
  double max_weight_sum = 0.0;
  for (int j = 0; j < n; ++j) {
    for (double sign : {1.0, -1.0}) {
      Vec d = Vec::Zero(n);
      d[j] = sign;
      Vec full = Vec::Zero(static_cast<Eigen::Index>(vectors.size()));
      double res = 1.0;
      Vec r = d;
      if (!kept.empty()) {
        const NnlsResult sol = nnls(Z, d);
        r = d - Z * sol.x;
        res = sol.residual;
        max_weight_sum = std::max(max_weight_sum, sol.x.sum());
        for (std::size_t k = 0; k < kept.size(); ++k) {
          full[kept[k]] = sol.x[static_cast<Eigen::Index>(k)] / vectors[kept[k]].norm();
        }
      }
      out.weights.push_back(std::move(full));
      out.residuals.push_back(res);
      out.max_residual = std::max(out.max_residual, res);
      if (res > worst) {
        worst = res;
        worst_residual = r;
      }
    }
  }
  out.spans = out.max_residual <= tol;
  if (out.spans) {
    out.margin = max_weight_sum > 0.0 ? 1.0 / (std::sqrt(static_cast<double>(n)) * max_weight_sum) : 0.0;
  } else if (worst_residual.norm() > 0.0) {
    out.separating = worst_residual.normalized();
  }
  return out;
}

RegularityVerdict classify_strongly_regular(const ControlSystem& sys, const ControlSignal& u,
                                            const std::vector<ControlSignal>& dictionary, double tol,
                                            int steps_per_unit) {
  RegularityVerdict v;
  v.kind = RegularityKind::StronglyRegular;
  const VariationMatrix vm = variation_matrix(sys, u, dictionary, steps_per_unit);
  Eigen::JacobiSVD<Mat> svd(vm.columns, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  v.margin = sv.size() >= sys.n ? sv[sys.n - 1] : 0.0;
  v.verdict = v.margin > tol ? Verdict::Regular : Verdict::NotDetected;
  for (Eigen::Index k = 0; k < vm.columns.cols(); ++k) {
    v.sample.vectors.push_back(vm.columns.col(k));
    v.sample.taus.push_back(std::numeric_limits<double>::quiet_NaN());
    v.sample.omegas.emplace_back();
    v.sample.indices.push_back(static_cast<int>(k));
  }
  if (v.verdict == Verdict::Regular) {
    const Mat pinv = svd.solve(Mat::Identity(sys.n, sys.n));
    for (int j = 0; j < sys.n; ++j) {
      v.weights.push_back(pinv.col(j));
      v.weights.push_back(-pinv.col(j));
    }
  } else if (sv.size() > 0) {
    // Left singular vector of the smallest singular value annihilates the range.
    Eigen::JacobiSVD<Mat> full(vm.columns, Eigen::ComputeFullU);
    v.psi = full.matrixU().col(sys.n - 1);
  }
  v.resolution = "dictionary:" + std::to_string(dictionary.size());
  return v;
}

RegularityVerdict classify_strongly_U_regular(const ControlSystem& sys, const ControlSignal& u,
                                              const std::vector<ControlSignal>& dictionary, double tol,
                                              int steps_per_unit) {
  if (!sys.U.is_convex()) throw std::invalid_argument("strong U-regularity requires a convex constraint set");
  RegularityVerdict v;
  v.kind = RegularityKind::StronglyURegular;
  const Trajectory base = integrate_state(sys, u, steps_per_unit);
  for (std::size_t k = 0; k < dictionary.size(); ++k) {
    for (double sign : {1.0, -1.0}) {
      const ControlSignal dir = ControlSignal::combination({{sign, dictionary[k]}});
      const ControlSignal proj = ControlSignal::tangent_projected(u, dir, sys.U);
      v.sample.vectors.push_back(integrate_variational(sys, u, base, &proj, 0.0, Vec::Zero(sys.n)));
      v.sample.taus.push_back(std::numeric_limits<double>::quiet_NaN());
      v.sample.omegas.emplace_back();
      v.sample.indices.push_back(static_cast<int>(k));
    }
  }
  const SpanResult sr = cone_spans(v.sample.vectors, sys.n, tol);
  v.verdict = sr.spans ? Verdict::Regular : Verdict::NotDetected;
  v.margin = sr.margin;
  v.max_residual = sr.max_residual;
  if (sr.spans) v.weights = sr.weights;
  v.psi = sr.separating;
  v.resolution = "dictionary:" + std::to_string(dictionary.size()) + "x2";
  return v;
}

std::vector<Vec> needle_values(const ConstraintSet& U, const Vec& u_tau, int omega_samples, std::uint64_t seed) {
  return U.sample(omega_samples, seed, &u_tau);
}

ConeSample sample_strong_variations(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base,
                                    const std::vector<Mat>& adjoint, const std::vector<double>& taus,
                                    const std::vector<std::vector<Vec>>& omegas) {
  if (taus.size() != omegas.size()) throw std::invalid_argument("need one value list per needle time");
  ConeSample s;
  const auto& times = base.times();
  Vec f0(sys.n), f1(sys.n);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double tau = taus[i];
    auto it = std::lower_bound(times.begin(), times.end(), tau - 1e-12 * std::max(1.0, sys.T));
    if (it == times.end() || std::abs(*it - tau) > 1e-9 * std::max(1.0, sys.T)) {
      throw std::invalid_argument("needle time is not a grid node");
    }
    const auto k = static_cast<std::size_t>(it - times.begin());
    const Vec x = base.state(static_cast<int>(k));
    const Vec ut = u.eval(tau, Side::Right);
    sys.dynamics->eval(x.data(), ut.data(), tau, f0.data());
    for (const auto& w : omegas[i]) {
      sys.dynamics->eval(x.data(), w.data(), tau, f1.data());
      s.vectors.push_back(adjoint[k].transpose() * (f1 - f0));
      s.taus.push_back(tau);
      s.omegas.push_back(w);
      s.indices.push_back(-1);
    }
  }
  return s;
}

RegularityVerdict classify_weakly_U_regular(const ControlSystem& sys, const ControlSignal& u, int tau_count,
                                            int omega_samples, std::uint64_t seed, double tol, int steps_per_unit) {
  RegularityVerdict v;
  v.kind = RegularityKind::WeaklyURegular;
  const Trajectory base = integrate_state(sys, u, steps_per_unit);
  const auto P = integrate_adjoint_matrix(sys, u, base, Mat::Identity(sys.n, sys.n));
  const std::vector<double> taus = needle_times(base, u, tau_count);
  std::vector<std::vector<Vec>> omegas;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    omegas.push_back(needle_values(sys.U, u.eval(taus[i], Side::Right), omega_samples, seed + i));
  }
  v.sample = sample_strong_variations(sys, u, base, P, taus, omegas);
  const SpanResult sr = cone_spans(v.sample.vectors, sys.n, tol);
  v.verdict = sr.spans ? Verdict::Regular : Verdict::NotDetected;
  v.margin = sr.margin;
  v.max_residual = sr.max_residual;
  if (sr.spans) v.weights = sr.weights;
  v.psi = sr.separating;
  v.resolution = "tau:" + std::to_string(taus.size()) + ",omega:" +
                 std::to_string(omegas.empty() ? 0 : omegas.front().size());
  return v;
}

LiftResidual lift_residual(const ControlSystem& sys, const ControlSignal& u, const Vec& psi, LiftKind kind,
                           int steps_per_unit, int omega_samples, std::uint64_t seed) {
  if (psi.size() != sys.n) throw DimensionError("psi has wrong length");
  if (kind == LiftKind::HG && !sys.U.is_convex()) throw std::invalid_argument("HG requires a convex constraint set");
  const Trajectory base = integrate_state(sys, u, steps_per_unit);
  const AdjointArc arc = integrate_adjoint(sys, u, base, psi);
  const auto& times = base.times();
  LiftResidual out;
  out.psi = psi;
  out.kind = kind;
  Vec f(sys.n), fw(sys.n);
  Mat fx, fu;
  std::vector<Vec> fixed_omegas;
  if (kind == LiftKind::HM && !std::holds_alternative<ConstraintSet::AllSpace>(sys.U.variant())) {
    fixed_omegas = sys.U.sample(omega_samples, seed);
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const Vec uk = u.eval(t, k + 1 == times.size() ? Side::Left : Side::Right);
    const Vec x = base.state(static_cast<int>(k));
    const Vec p = arc.costate(static_cast<int>(k));
    double r = 0.0;
    if (kind == LiftKind::HM) {
      sys.dynamics->eval(x.data(), uk.data(), t, f.data());
      const double h0 = p.dot(f);
      const auto& omegas = fixed_omegas.empty() ? needle_values(sys.U, uk, omega_samples, seed) : fixed_omegas;
      for (const auto& w : omegas) {
        sys.dynamics->eval(x.data(), w.data(), t, fw.data());
        r = std::max(r, p.dot(fw) - h0);
      }
    } else {
      sys.dynamics->jacobian(x.data(), uk.data(), t, f.data(), fx, fu);
      const Vec g = fu.transpose() * p;
      r = kind == LiftKind::NHG ? g.norm() : sys.U.normal_cone_distance(sys.U.project(uk), g);
    }
    if (r > out.residual) {
      out.residual = r;
      out.worst_time = t;
    }
  }
  return out;
}

namespace {

// Per-node linear maps psi -> (grad_u H) or psi -> (H(omega) - H(u)), built from the fundamental adjoint.
struct LiftData {
  LiftKind kind;
  int n = 0;
  int m = 0;
  Mat rows;                // HM: one row per (node, omega); NHG/HG: m rows per node.
  std::vector<Vec> u_at;   // HG only.
  const ConstraintSet* U = nullptr;

  double residual(const Vec& psi, int stride = 1) const {
    if (kind == LiftKind::HM) {
      double r = 0.0;
      for (Eigen::Index i = 0; i < rows.rows(); i += stride) r = std::max(r, rows.row(i).dot(psi));
      return r;
    }
    const Eigen::Index nodes = rows.rows() / m;
    double r = 0.0;
    for (Eigen::Index k = 0; k < nodes; k += stride) {
      const Vec g = rows.middleRows(k * m, m) * psi;
      const double c = kind == LiftKind::NHG ? g.norm() : U->normal_cone_distance(u_at[k], g);
      r = std::max(r, c);
    }
    return r;
  }
};

LiftData build_lift_data(const ControlSystem& sys, const ControlSignal& u, LiftKind kind, int steps_per_unit,
                         int omega_samples, std::uint64_t seed) {
  LiftData d;
  d.kind = kind;
  d.n = sys.n;
  d.m = sys.m;
  d.U = &sys.U;
  const Trajectory base = integrate_state(sys, u, steps_per_unit);
  const auto P = integrate_adjoint_matrix(sys, u, base, Mat::Identity(sys.n, sys.n));
  const auto& times = base.times();
  const auto nodes = static_cast<Eigen::Index>(times.size());
  Vec f(sys.n), fw(sys.n);
  Mat fx, fu;
  std::vector<Vec> fixed_omegas;
  if (kind == LiftKind::HM && !std::holds_alternative<ConstraintSet::AllSpace>(sys.U.variant())) {
    fixed_omegas = sys.U.sample(omega_samples, seed);
  }
  std::vector<Vec> hm_rows;
  if (kind != LiftKind::HM) d.rows.resize(nodes * sys.m, sys.n);
  for (Eigen::Index k = 0; k < nodes; ++k) {
    const double t = times[k];
    const Vec uk = u.eval(t, k + 1 == nodes ? Side::Left : Side::Right);
    const Vec x = base.state(static_cast<int>(k));
    if (kind == LiftKind::HM) {
      sys.dynamics->eval(x.data(), uk.data(), t, f.data());
      const auto& omegas = fixed_omegas.empty() ? needle_values(sys.U, uk, omega_samples, seed) : fixed_omegas;
      for (const auto& w : omegas) {
        sys.dynamics->eval(x.data(), w.data(), t, fw.data());
        hm_rows.push_back(P[k].transpose() * (fw - f));
      }
    } else {
      sys.dynamics->jacobian(x.data(), uk.data(), t, f.data(), fx, fu);
      d.rows.middleRows(k * sys.m, sys.m) = fu.transpose() * P[k].transpose();
      if (kind == LiftKind::HG) d.u_at.push_back(sys.U.project(uk));
    }
  }
  if (kind == LiftKind::HM) {
    d.rows.resize(static_cast<Eigen::Index>(hm_rows.size()), sys.n);
    for (std::size_t i = 0; i < hm_rows.size(); ++i) d.rows.row(static_cast<Eigen::Index>(i)) = hm_rows[i].transpose();
  }
  return d;
}

std::vector<Vec> sphere_points(int n, int resolution, std::uint64_t seed) {
  std::vector<Vec> pts;
  if (n == 1) {
    pts.push_back(Vec::Constant(1, 1.0));
    pts.push_back(Vec::Constant(1, -1.0));
  } else if (n == 2) {
    const int res = resolution > 0 ? resolution : 720;
    for (int i = 0; i < res; ++i) {
      const double a = 2.0 * std::numbers::pi * i / res;
      Vec p(2);
      p << std::cos(a), std::sin(a);
      pts.push_back(p);
    }
  } else if (n == 3) {
    const int res = resolution > 0 ? resolution : 10000;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < res; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / res;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vec p(3);
      p << r * std::cos(golden * i), r * std::sin(golden * i), z;
      pts.push_back(p);
    }
  } else {
    const int res = resolution > 0 ? resolution : 64 * n;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < res; ++i) {
      Vec p(n);
      for (int j = 0; j < n; ++j) p[j] = g(rng);
      pts.push_back(p.normalized());
    }
  }
  return pts;
}

}  // namespace

CertificateSearch singular_certificate_search(const ControlSystem& sys, const ControlSignal& u, LiftKind kind,
                                              int resolution, std::uint64_t seed, int steps_per_unit,
                                              int omega_samples) {
  if (kind == LiftKind::HG && !sys.U.is_convex()) throw std::invalid_argument("HG requires a convex constraint set");
  const LiftData data = build_lift_data(sys, u, kind, steps_per_unit, omega_samples, seed);
  const int n = sys.n;
  const Eigen::Index units = kind == LiftKind::HM ? data.rows.rows() : data.rows.rows() / std::max(1, data.m);
  const Eigen::Index budget = n >= 3 ? 20000 : 60000;
  const int stride = static_cast<int>(std::max<Eigen::Index>(1, units / budget));

  CertificateSearch out;
  const auto pts = sphere_points(n, resolution, seed);
  std::vector<std::pair<double, int>> scored;
  scored.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) scored.emplace_back(data.residual(pts[i], stride), static_cast<int>(i));
  out.evaluated = static_cast<int>(pts.size());
  std::sort(scored.begin(), scored.end());

  const double spacing = n == 1 ? 0.0 : (n == 2 ? 2.0 * std::numbers::pi / pts.size() : 2.0 / std::sqrt(pts.size()));
  out.min_residual = std::numeric_limits<double>::infinity();
  const std::size_t starts = std::min<std::size_t>(n == 1 ? 2 : 4, scored.size());
  for (std::size_t s = 0; s < starts; ++s) {
    Vec psi = pts[scored[s].second];
    double best = data.residual(psi);
    ++out.evaluated;
    // Pattern search on the sphere over coordinate directions, shrinking on failure.
    double step = spacing;
    while (n > 1 && step > 1e-10 && out.evaluated < 200000) {
      bool improved = false;
      for (int j = 0; j < n && !improved; ++j) {
        for (double sign : {1.0, -1.0}) {
          Vec trial = psi;
          trial[j] += sign * step;
          trial.normalize();
          const double r = data.residual(trial);
          ++out.evaluated;
          if (r < best) {
            best = r;
            psi = trial;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (best < out.min_residual) {
      out.min_residual = best;
      out.psi = psi;
    }
  }
  return out;
}

bool kalman_check(const Mat& A, const Mat& B) {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n) throw DimensionError("Kalman check: A must be n x n and B n x m");
  const auto m = B.cols();
  Mat K(n, n * m);
  Mat blk = B;
  for (Eigen::Index i = 0; i < n; ++i) {
    K.middleCols(i * m, m) = blk;
    blk = A * blk;
  }
  const Vec sv = Eigen::JacobiSVD<Mat>(K).singularValues();
  if (sv.size() < n || sv[0] == 0.0) return false;
  return sv[n - 1] > 1e-10 * sv[0];
}

namespace {

struct Probe {
  Vec x;
  Vec u;
  double t;
};

std::vector<Probe> random_probes(const ControlSystem& sys, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  std::vector<Probe> out;
  for (int i = 0; i < count; ++i) {
    Probe p{sys.x0, Vec(sys.m), ut(rng) * sys.T};
    for (int j = 0; j < sys.n; ++j) p.x[j] += g(rng);
    for (int j = 0; j < sys.m; ++j) p.u[j] = 2.0 * g(rng);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

AffineStructure control_affine_detect(const ControlSystem& sys, int probes, std::uint64_t seed) {
  AffineStructure out;
  out.affine = true;
  Vec f(sys.n);
  Mat fx, fu1, fu2;
  for (const auto& p : random_probes(sys, probes, seed)) {
    const Vec u2 = p.u * -0.7 + Vec::Constant(sys.m, 0.3);
    try {
      sys.dynamics->jacobian(p.x.data(), p.u.data(), p.t, f.data(), fx, fu1);
      sys.dynamics->jacobian(p.x.data(), u2.data(), p.t, f.data(), fx, fu2);
    } catch (const DomainError&) {
      continue;
    }
    const double scale = 1.0 + fu1.cwiseAbs().maxCoeff();
    const double var = (fu1 - fu2).cwiseAbs().maxCoeff() / scale;
    out.max_variation = std::max(out.max_variation, var);
    if (var > 1e-9) out.affine = false;
  }
  if (out.affine) {
    const Vec zero = Vec::Zero(sys.m);
    out.g = Vec(sys.n);
    sys.dynamics->jacobian(sys.x0.data(), zero.data(), 0.0, out.g.data(), fx, out.B);
  }
  return out;
}

std::optional<std::pair<Mat, Mat>> linear_structure(const ControlSystem& sys, int probes, std::uint64_t seed) {
  if (const auto* lin = sys.as_linear()) return std::make_pair(lin->A(), lin->B());
  Vec f(sys.n);
  Mat fx0, fu0, fx, fu;
  const Vec zero = Vec::Zero(sys.m);
  try {
    sys.dynamics->jacobian(sys.x0.data(), zero.data(), 0.0, f.data(), fx0, fu0);
    for (const auto& p : random_probes(sys, probes, seed)) {
      sys.dynamics->jacobian(p.x.data(), p.u.data(), p.t, f.data(), fx, fu);
      const double scale = 1.0 + std::max(fx0.cwiseAbs().maxCoeff(), fu0.cwiseAbs().maxCoeff());
      if ((fx - fx0).cwiseAbs().maxCoeff() > 1e-9 * scale || (fu - fu0).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        return std::nullopt;
      }
    }
  } catch (const DomainError&) {
    return std::nullopt;
  }
  return std::make_pair(fx0, fu0);
}

LinearInteriorCheck linear_interior_check(const ControlSystem& sys, const ControlSignal& u, double min_depth,
                                          int steps_per_unit) {
  LinearInteriorCheck out;
  const auto lin = linear_structure(sys);
  out.linear = lin.has_value();
  if (out.linear) out.kalman = kalman_check(lin->first, lin->second);
  const auto times = build_grid(0.0, sys.T, u.breakpoints(), steps_per_unit);
  double run_start = -1.0;
  double prev = 0.0;
  for (double t : times) {
    const Vec ut = u.eval(t);
    const bool inside = sys.U.interior_depth(ut) >= min_depth;
    if (inside && run_start < 0.0) run_start = t;
    if (!inside && run_start >= 0.0) {
      out.interior_length = std::max(out.interior_length, prev - run_start);
      run_start = -1.0;
    }
    prev = t;
  }
  if (run_start >= 0.0) out.interior_length = std::max(out.interior_length, prev - run_start);
  out.interior_interval = out.interior_length > 0.0;
  return out;
}

}  // namespace reach
