#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reach/needle.hpp"
#include "reach/nnls.hpp"

namespace reach {

inline constexpr double kDefaultConeTol = 1e-7;

enum class RegularityKind { StronglyRegular, StronglyURegular, WeaklyURegular };
enum class Verdict { Regular, NotDetected };
enum class LiftKind { NHG, HG, HM };

const char* to_string(RegularityKind k);
const char* to_string(Verdict v);
const char* to_string(LiftKind k);
RegularityKind regularity_kind_from_string(const std::string& s);
LiftKind lift_kind_from_string(const std::string& s);

/// Sampled variation endpoints with where each came from.
struct ConeSample {
  std::vector<Vec> vectors;
  /// (tau, omega) for strong variations; tau is NaN for dictionary directions.
  std::vector<double> taus;
  std::vector<Vec> omegas;
  /// Dictionary index for weak variations, -1 for needles.
  std::vector<int> indices;
};

struct SpanResult {
  bool spans = false;
  /// NNLS weights for +e_1, -e_1, ..., +e_n, -e_n, over the original (unnormalised) vectors.
  std::vector<Vec> weights;
  std::vector<double> residuals;
  double max_residual = 0.0;
  /// 1 / (sqrt(n) max_j sum_k lambda_jk) over unit-normalised vectors; 0 when not spanning.
  double margin = 0.0;
  /// Unit psi with <psi, z> <= small for every sample vector z, when a target fails.
  std::optional<Vec> separating;
};

/// Conic hull of the vectors contains every +/-e_j, each target solved by NNLS.
/// Vectors shorter than 1e-9 are ignored.
SpanResult cone_spans(const std::vector<Vec>& vectors, int n, double tol = kDefaultConeTol);

struct RegularityVerdict {
  RegularityKind kind = RegularityKind::StronglyRegular;
  Verdict verdict = Verdict::NotDetected;
  double margin = 0.0;
  double max_residual = 0.0;
  /// Conic weights per target when regular.
  std::vector<Vec> weights;
  /// Separating direction when a target failed.
  std::optional<Vec> psi;
  ConeSample sample;
  /// Human-readable probing resolution (dictionary size or tau x omega count).
  std::string resolution;
};

/// Columns of DE(u) over the dictionary span R^n linearly. Margin is the n-th singular value.
RegularityVerdict classify_strongly_regular(const ControlSystem& sys, const ControlSignal& u,
                                            const std::vector<ControlSignal>& dictionary, double tol = kDefaultConeTol,
                                            int steps_per_unit = kDefaultStepsPerUnit);

/// Cone of DE(u) over tangent-projected +/- dictionary directions equals R^n. U must be convex.
RegularityVerdict classify_strongly_U_regular(const ControlSystem& sys, const ControlSignal& u,
                                              const std::vector<ControlSignal>& dictionary,
                                              double tol = kDefaultConeTol,
                                              int steps_per_unit = kDefaultStepsPerUnit);

/// Cone of strong variation vectors over sampled (tau, omega) equals R^n.
RegularityVerdict classify_weakly_U_regular(const ControlSystem& sys, const ControlSignal& u, int tau_count,
                                            int omega_samples, std::uint64_t seed, double tol = kDefaultConeTol,
                                            int steps_per_unit = kDefaultStepsPerUnit);

/// Strong variation vectors P(tau)^T jump for every tau and every omega in omegas[i] at taus[i],
/// with P the fundamental adjoint on the nodes of `base`. Each tau must be a node.
ConeSample sample_strong_variations(const ControlSystem& sys, const ControlSignal& u, const Trajectory& base,
                                    const std::vector<Mat>& adjoint, const std::vector<double>& taus,
                                    const std::vector<std::vector<Vec>>& omegas);

/// Candidate needle values at tau: U.sample with u(tau) as the anchor for unbounded U.
std::vector<Vec> needle_values(const ConstraintSet& U, const Vec& u_tau, int omega_samples, std::uint64_t seed);

/// (A, B) when f(x, u, t) = A x + B u + g for constant matrices, detected by probing.
std::optional<std::pair<Mat, Mat>> linear_structure(const ControlSystem& sys, int probes = 16, std::uint64_t seed = 3);

struct LiftResidual {
  Vec psi;
  LiftKind kind = LiftKind::NHG;
  double residual = 0.0;
  /// Grid time where the sup is attained.
  double worst_time = 0.0;
};

LiftResidual lift_residual(const ControlSystem& sys, const ControlSignal& u, const Vec& psi, LiftKind kind,
                           int steps_per_unit = kDefaultStepsPerUnit, int omega_samples = 16,
                           std::uint64_t seed = 0);

struct CertificateSearch {
  double min_residual = 0.0;
  Vec psi;
  int evaluated = 0;
};

/// Minimises lift_residual over unit psi: sphere grid for n <= 3 (resolution points), multistart
/// pattern search otherwise, then local polishing.
CertificateSearch singular_certificate_search(const ControlSystem& sys, const ControlSignal& u, LiftKind kind,
                                              int resolution = 0, std::uint64_t seed = 0,
                                              int steps_per_unit = kDefaultStepsPerUnit, int omega_samples = 16);

/// rank [B, AB, ..., A^{n-1} B] = n with relative singular value threshold 1e-10.
bool kalman_check(const Mat& A, const Mat& B);

struct AffineStructure {
  bool affine = false;
  /// g(x0, 0) and B(x0, 0) at the sample point, when affine.
  Vec g;
  Mat B;
  /// Largest change of grad_u f observed between probes.
  double max_variation = 0.0;
};

/// f(x, u, t) = g(x, t) + B(x, t) u, tested by comparing grad_u f at random probes.
AffineStructure control_affine_detect(const ControlSystem& sys, int probes = 32, std::uint64_t seed = 1);

/// Linear autonomous route: Kalman rank plus u interior along a subinterval of positive length.
struct LinearInteriorCheck {
  bool linear = false;
  bool kalman = false;
  bool interior_interval = false;
  /// Longest run of grid nodes with u at depth >= min_depth inside U.
  double interior_length = 0.0;
  bool regular() const { return linear && kalman && interior_interval; }
};

LinearInteriorCheck linear_interior_check(const ControlSystem& sys, const ControlSignal& u, double min_depth = 1e-6,
                                          int steps_per_unit = kDefaultStepsPerUnit);

}  // namespace reach
