#include "reach/exact.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace reach {

namespace {

using Float50 = boost::multiprecision::cpp_bin_float_50;
using boost::multiprecision::cpp_int;

Float50 to_float50(const Rational& q) {
  return Float50(boost::multiprecision::numerator(q)) / Float50(boost::multiprecision::denominator(q));
}

Float50 to_float50(const ExactTime& x) {
  return to_float50(x.a) + to_float50(x.b) * boost::math::constants::pi<Float50>();
}

// Exact value of a finite double as a rational.
Rational exact_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot convert a non-finite value to a rational");
  if (x == 0.0) return 0;
  int exp = 0;
  const double mant = std::frexp(x, &exp);
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r = Rational(cpp_int(scaled));
  if (exp > 0) {
    r *= Rational(cpp_int(1) << exp);
  } else if (exp < 0) {
    r /= Rational(cpp_int(1) << -exp);
  }
  return r;
}

// Subset sums over groups of equal lengths. Each layer holds the sorted distinct sums after one more group.
template <class V, class Less, class Equal>
struct GroupedSums {
  std::vector<V> lengths;
  std::vector<std::vector<int>> members;
  std::vector<std::vector<V>> layers;

  void build(const Less& less, const Equal& equal) {
    std::uint64_t bound = 1;
    for (const auto& m : members) {
      bound *= static_cast<std::uint64_t>(m.size() + 1);
      if (bound > kMaxSubsetSums) throw std::length_error("subset-sum search exceeds 2^24 distinct sums");
    }
    layers.assign(1, std::vector<V>{V{}});
    for (std::size_t g = 0; g < lengths.size(); ++g) {
      std::vector<V> next;
      const auto& prev = layers.back();
      next.reserve(prev.size() * (members[g].size() + 1));
      for (const auto& s : prev) {
        V acc = s;
        next.push_back(acc);
        for (std::size_t k = 0; k < members[g].size(); ++k) {
          acc = acc + lengths[g];
          next.push_back(acc);
        }
      }
      std::sort(next.begin(), next.end(), less);
      next.erase(std::unique(next.begin(), next.end(), equal), next.end());
      layers.push_back(std::move(next));
    }
  }

  // Interval indices realising `sum`, which must be in the last layer.
  std::vector<int> witness(V sum, const Less& less, const Equal& equal) const {
    std::vector<int> out;
    for (std::size_t g = lengths.size(); g-- > 0;) {
      const auto& prev = layers[g];
      V rest = sum;
      for (std::size_t k = 0; k <= members[g].size(); ++k) {
        auto it = std::lower_bound(prev.begin(), prev.end(), rest, less);
        if (it != prev.end() && equal(*it, rest)) {
          for (std::size_t j = 0; j < k; ++j) out.push_back(members[g][j]);
          sum = rest;
          break;
        }
        rest = rest - lengths[g];
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

}  // namespace

double ExactTime::to_double() const { return static_cast<double>(to_float50(*this)); }

std::string ExactTime::to_string() const {
  std::ostringstream os;
  if (b == 0) {
    os << a;
  } else if (a == 0) {
    os << b << "*pi";
  } else {
    os << a << (b > 0 ? "+" : "") << b << "*pi";
  }
  return os.str();
}

double exact_gap(const ExactTime& x, const ExactTime& y) {
  return static_cast<double>(boost::multiprecision::abs(to_float50(x) - to_float50(y)));
}

ExactPartition exact_uniform_partition(const Rational& horizon, int intervals) {
  if (intervals < 1 || horizon <= 0) throw std::invalid_argument("uniform partition needs N >= 1 and T > 0");
  ExactPartition out;
  for (int i = 0; i <= intervals; ++i) out.push_back(ExactTime::rational(horizon * i / intervals));
  return out;
}

SubsetSumResult subset_sum_reachability(const ExactPartition& part, const ExactTime& target, SubsetMode mode,
                                        double tol) {
  if (part.size() < 2) throw std::invalid_argument("partition needs at least two times");
  for (std::size_t i = 1; i < part.size(); ++i) {
    if (!(part[i - 1] < part[i]) && !(part[i - 1].to_double() < part[i].to_double())) {
      throw std::invalid_argument("partition times must be increasing");
    }
  }
  SubsetSumResult out;
  if (mode == SubsetMode::ExactRational) {
    auto less = [](const ExactTime& x, const ExactTime& y) { return x < y; };
    auto equal = [](const ExactTime& x, const ExactTime& y) { return x == y; };
    GroupedSums<ExactTime, decltype(less), decltype(equal)> gs;
    std::map<ExactTime, std::size_t> index;
    for (std::size_t i = 0; i + 1 < part.size(); ++i) {
      const ExactTime len = part[i + 1] - part[i];
      auto [it, fresh] = index.emplace(len, gs.lengths.size());
      if (fresh) {
        gs.lengths.push_back(len);
        gs.members.emplace_back();
      }
      gs.members[it->second].push_back(static_cast<int>(i));
    }
    gs.build(less, equal);
    const auto& sums = gs.layers.back();
    out.sums = sums.size();
    // Rank by double distance, then settle the closest few in 50-digit arithmetic.
    const double td = target.to_double();
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) ranked.emplace_back(std::abs(sums[i].to_double() - td), i);
    const std::size_t keep = std::min<std::size_t>(8, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end());
    std::size_t best = ranked.front().second;
    double best_gap = exact_gap(sums[best], target);
    for (std::size_t r = 0; r < keep; ++r) {
      const std::size_t i = ranked[r].second;
      if (sums[i] == target) {
        best = i;
        best_gap = 0.0;
        break;
      }
      const double g = exact_gap(sums[i], target);
      if (g < best_gap) {
        best_gap = g;
        best = i;
      }
    }
    out.reachable = sums[best] == target;
    out.best_gap = out.reachable ? 0.0 : best_gap;
    out.witness = gs.witness(sums[best], less, equal);
    return out;
  }

  const double scale = std::max(1.0, std::abs(part.back().to_double()));
  const double merge = 1e-15 * scale;
  auto less = [](double x, double y) { return x < y; };
  auto equal = [merge](double x, double y) { return std::abs(x - y) <= merge; };
  GroupedSums<double, decltype(less), decltype(equal)> gs;
  for (std::size_t i = 0; i + 1 < part.size(); ++i) {
    const double len = part[i + 1].to_double() - part[i].to_double();
    std::size_t g = 0;
    while (g < gs.lengths.size() && !equal(gs.lengths[g], len)) ++g;
    if (g == gs.lengths.size()) {
      gs.lengths.push_back(len);
      gs.members.emplace_back();
    }
    gs.members[g].push_back(static_cast<int>(i));
  }
  gs.build(less, equal);
  const auto& sums = gs.layers.back();
  out.sums = sums.size();
  const double td = target.to_double();
  auto it = std::lower_bound(sums.begin(), sums.end(), td);
  double best = std::numeric_limits<double>::infinity();
  double arg = 0.0;
  for (auto c : {it, it == sums.begin() ? it : std::prev(it)}) {
    if (c == sums.end()) continue;
    const double g = std::abs(*c - td);
    if (g < best) {
      best = g;
      arg = *c;
    }
  }
  out.best_gap = best;
  out.reachable = best <= tol;
  out.witness = gs.witness(arg, less, equal);
  return out;
}

Rational best_rational(double x, std::int64_t max_den) {
  if (max_den < 1) throw std::invalid_argument("max_den must be >= 1");
  const Rational exact = exact_from_double(x);
  cpp_int n = boost::multiprecision::numerator(exact);
  cpp_int d = boost::multiprecision::denominator(exact);
  cpp_int p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  const cpp_int bound = max_den;
  while (d != 0) {
    // Floor division so negative inputs expand correctly.
    cpp_int a = n / d;
    if (n % d != 0 && (n < 0) != (d < 0)) a -= 1;
    const cpp_int q2 = q0 + a * q1;
    if (q2 > bound) break;
    const cpp_int p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const cpp_int r = n - a * d;
    n = d;
    d = r;
  }
  if (d == 0) return Rational(p1, q1);
  const cpp_int k = (bound - q0) / q1;
  const Rational semi(p0 + k * p1, q0 + k * q1);
  const Rational conv(p1, q1);
  const Rational ds = semi > exact ? semi - exact : exact - semi;
  const Rational dc = conv > exact ? conv - exact : exact - conv;
  return dc <= ds ? conv : semi;
}

SensitivityResult sensitivity_probe(const std::vector<double>& times, double epsilon, const ReachabilityOracle& oracle,
                                    int max_candidates, std::uint64_t seed) {
  if (times.size() < 2) throw std::invalid_argument("partition needs at least two times");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  SensitivityResult out;
  const std::size_t N = times.size() - 1;
  auto endpoint = [](double t) {
    const Rational r = best_rational(t, 1000000000);
    return static_cast<double>(r) == t ? r : exact_from_double(t);
  };
  const Rational first = endpoint(times.front());
  const Rational last = endpoint(times.back());
  std::set<std::vector<Rational>> seen;

  auto attempt = [&](std::vector<Rational> interior) -> bool {
    for (std::size_t i = 0; i < interior.size(); ++i) {
      if (std::abs(static_cast<double>(interior[i]) - times[i + 1]) >= epsilon) return false;
    }
    ExactPartition cand{ExactTime::rational(first)};
    for (const auto& q : interior) {
      if (!(cand.back().a < q)) return false;
      cand.push_back(ExactTime::rational(q));
    }
    if (!(cand.back().a < last)) return false;
    cand.push_back(ExactTime::rational(last));
    if (!seen.insert(interior).second) return false;
    ++out.candidates_tried;
    if (!oracle(cand)) {
      out.found = true;
      out.witness = std::move(cand);
      return true;
    }
    return false;
  };

  for (std::int64_t den = 1; den <= 1000000000 && out.candidates_tried < max_candidates; den *= 10) {
    std::vector<Rational> interior;
    for (std::size_t i = 1; i < N; ++i) interior.push_back(best_rational(times[i], den));
    if (attempt(std::move(interior))) return out;
  }
  std::mt19937_64 rng(seed);
  const auto den = static_cast<std::int64_t>(std::pow(10.0, std::ceil(-std::log10(epsilon)) + 2.0));
  const auto span = static_cast<std::int64_t>(std::floor(epsilon * static_cast<double>(den))) - 1;
  std::uniform_int_distribution<std::int64_t> shift(-std::max<std::int64_t>(span, 1), std::max<std::int64_t>(span, 1));
  for (int guard = 0; out.candidates_tried < max_candidates && guard < 50 * max_candidates; ++guard) {
    std::vector<Rational> interior;
    for (std::size_t i = 1; i < N; ++i) interior.push_back(best_rational(times[i], den) + Rational(shift(rng), den));
    if (attempt(std::move(interior))) return out;
  }
  out.message = "no unreachable rational perturbation found among " + std::to_string(out.candidates_tried) +
                " candidates";
  return out;
}

}  // namespace reach
