#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace reach {

using Rational = boost::multiprecision::cpp_rational;

/// a + b pi with rational a, b. Equality is exact because pi is irrational.
struct ExactTime {
  Rational a = 0;
  Rational b = 0;

  static ExactTime rational(Rational q) { return ExactTime{std::move(q), 0}; }
  static ExactTime pi_multiple(Rational q) { return ExactTime{0, std::move(q)}; }
  double to_double() const;
  std::string to_string() const;

  friend ExactTime operator+(const ExactTime& x, const ExactTime& y) { return {x.a + y.a, x.b + y.b}; }
  friend ExactTime operator-(const ExactTime& x, const ExactTime& y) { return {x.a - y.a, x.b - y.b}; }
  friend bool operator==(const ExactTime& x, const ExactTime& y) { return x.a == y.a && x.b == y.b; }
  friend bool operator<(const ExactTime& x, const ExactTime& y) {
    return x.a < y.a || (x.a == y.a && x.b < y.b);
  }
};

/// |x - y| evaluated with 50 significant digits.
double exact_gap(const ExactTime& x, const ExactTime& y);

using ExactPartition = std::vector<ExactTime>;

ExactPartition exact_uniform_partition(const Rational& horizon, int intervals);

enum class SubsetMode { ExactRational, Float };

struct SubsetSumResult {
  bool reachable = false;
  /// min over subfamilies of |sum of lengths - target|.
  double best_gap = 0.0;
  /// Interval indices of a best subfamily.
  std::vector<int> witness;
  /// Number of distinct subset sums examined.
  std::uint64_t sums = 0;
};

/// Largest number of distinct subset sums the exhaustive search will hold.
inline constexpr std::uint64_t kMaxSubsetSums = 1ull << 24;

/// Does some subfamily of sampling intervals have total length equal to target?
/// Equal lengths are grouped, so uniform partitions cost O(N). Throws std::length_error when
/// the number of distinct sums would exceed kMaxSubsetSums.
SubsetSumResult subset_sum_reachability(const ExactPartition& part, const ExactTime& target,
                                        SubsetMode mode = SubsetMode::ExactRational, double tol = 1e-12);

/// Best rational approximation of x with denominator at most max_den (continued fractions).
Rational best_rational(double x, std::int64_t max_den);

struct SensitivityResult {
  bool found = false;
  ExactPartition witness;
  int candidates_tried = 0;
  std::string message;
};

using ReachabilityOracle = std::function<bool(const ExactPartition&)>;

/// Looks for a partition with rational interior times, each within epsilon of the original,
/// that the oracle declares unreachable. Candidates: continued-fraction approximations of
/// increasing denominator, then seeded random rational shifts.
SensitivityResult sensitivity_probe(const std::vector<double>& times, double epsilon, const ReachabilityOracle& oracle,
                                    int max_candidates = 32, std::uint64_t seed = 0);

}  // namespace reach
