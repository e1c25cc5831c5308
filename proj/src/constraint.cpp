#include "reach/constraint.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "reach/errors.hpp"

namespace reach {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool at_bound(double w, double bound) { return std::abs(w - bound) <= 1e-12 * (1.0 + std::abs(bound)); }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

ConstraintSet ConstraintSet::all(int m) {
  if (m < 1) throw DimensionError("constraint dimension must be positive");
  return ConstraintSet(m, AllSpace{});
}

ConstraintSet ConstraintSet::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.size() == 0) throw DimensionError("box bounds must have equal positive length");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("box requires lo <= hi componentwise");
  }
  const int m = static_cast<int>(lo.size());
  return ConstraintSet(m, Box{std::move(lo), std::move(hi)});
}

ConstraintSet ConstraintSet::ball(Vec center, double radius) {
  if (center.size() == 0) throw DimensionError("ball centre must be non-empty");
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  const int m = static_cast<int>(center.size());
  return ConstraintSet(m, Ball{std::move(center), radius});
}

ConstraintSet ConstraintSet::finite(std::vector<Vec> points) {
  if (points.empty()) throw std::invalid_argument("finite constraint set must be non-empty");
  const auto m = points.front().size();
  for (const auto& p : points) {
    if (p.size() != m || m == 0) throw DimensionError("finite set points must share a positive dimension");
  }
  return ConstraintSet(static_cast<int>(m), FiniteSet{std::move(points)});
}

const char* ConstraintSet::kind_name() const {
  return std::visit(Overloaded{[](const AllSpace&) { return "all"; }, [](const Box&) { return "box"; },
                               [](const Ball&) { return "ball"; }, [](const FiniteSet&) { return "finite"; }},
                    set_);
}

void ConstraintSet::require_convex(const char* op) const {
  if (!is_convex()) throw std::invalid_argument(std::string(op) + " requires a convex constraint set");
}

void ConstraintSet::require_dim(const Vec& w) const {
  if (w.size() != m_) {
    throw DimensionError("vector of length " + std::to_string(w.size()) + " does not match control dimension " +
                         std::to_string(m_));
  }
}

Vec ConstraintSet::project(const Vec& w) const {
  require_dim(w);
  return std::visit(Overloaded{
                        [&](const AllSpace&) -> Vec { return w; },
                        [&](const Box& b) -> Vec { return w.cwiseMax(b.lo).cwiseMin(b.hi); },
                        [&](const Ball& b) -> Vec {
                          const Vec d = w - b.center;
                          const double r = d.norm();
                          if (r <= b.radius) return w;
                          return b.center + d * (b.radius / r);
                        },
                        [&](const FiniteSet& f) -> Vec {
                          const Vec* best = &f.points.front();
                          double bd = kInf;
                          for (const auto& p : f.points) {
                            const double d = (p - w).norm();
                            if (d < bd) {
                              bd = d;
                              best = &p;
                            }
                          }
                          return *best;
                        },
                    },
                    set_);
}

double ConstraintSet::distance(const Vec& w) const { return (project(w) - w).norm(); }

bool ConstraintSet::contains(const Vec& w, double tol) const { return distance(w) <= tol; }

double ConstraintSet::normal_cone_distance(const Vec& w, const Vec& theta) const {
  require_convex("normal_cone_distance");
  require_dim(w);
  require_dim(theta);
  return std::visit(Overloaded{
                        [&](const AllSpace&) { return theta.norm(); },
                        [&](const Box& b) {
                          double acc = 0.0;
                          for (int i = 0; i < m_; ++i) {
                            const bool up = at_bound(w[i], b.hi[i]);
                            const bool low = at_bound(w[i], b.lo[i]);
                            double c;
                            if (up && low) {
                              c = 0.0;
                            } else if (up) {
                              c = std::max(-theta[i], 0.0);
                            } else if (low) {
                              c = std::max(theta[i], 0.0);
                            } else {
                              c = std::abs(theta[i]);
                            }
                            acc += c * c;
                          }
                          return std::sqrt(acc);
                        },
                        [&](const Ball& b) {
                          const Vec d = w - b.center;
                          const double r = d.norm();
                          if (!at_bound(r, b.radius)) return theta.norm();
                          const Vec nhat = d / r;
                          const double s = std::max(0.0, theta.dot(nhat));
                          return (theta - s * nhat).norm();
                        },
                        [&](const FiniteSet&) { return kInf; },
                    },
                    set_);
}

Vec ConstraintSet::project_tangent(const Vec& w, const Vec& d) const {
  require_convex("project_tangent");
  require_dim(w);
  require_dim(d);
  return std::visit(Overloaded{
                        [&](const AllSpace&) -> Vec { return d; },
                        [&](const Box& b) -> Vec {
                          Vec out = d;
                          for (int i = 0; i < m_; ++i) {
                            if (at_bound(w[i], b.hi[i]) && out[i] > 0.0) out[i] = 0.0;
                            if (at_bound(w[i], b.lo[i]) && out[i] < 0.0) out[i] = 0.0;
                          }
                          return out;
                        },
                        [&](const Ball& b) -> Vec {
                          const Vec r = w - b.center;
                          const double rn = r.norm();
                          if (!at_bound(rn, b.radius)) return d;
                          const Vec nhat = r / rn;
                          const double outward = d.dot(nhat);
                          return outward > 0.0 ? Vec(d - outward * nhat) : d;
                        },
                        [&](const FiniteSet&) -> Vec { return Vec::Zero(m_); },
                    },
                    set_);
}

double ConstraintSet::max_step(const Vec& w, const Vec& d) const {
  require_dim(w);
  require_dim(d);
  if (d.squaredNorm() == 0.0) return kInf;
  return std::visit(Overloaded{
                        [&](const AllSpace&) { return kInf; },
                        [&](const Box& b) {
                          double beta = kInf;
                          for (int i = 0; i < m_; ++i) {
                            if (d[i] > 0.0) beta = std::min(beta, (b.hi[i] - w[i]) / d[i]);
                            if (d[i] < 0.0) beta = std::min(beta, (b.lo[i] - w[i]) / d[i]);
                          }
                          return std::max(beta, 0.0);
                        },
                        [&](const Ball& b) {
                          const Vec r = w - b.center;
                          const double a = d.squaredNorm();
                          const double bb = r.dot(d);
                          const double c = r.squaredNorm() - b.radius * b.radius;
                          const double disc = bb * bb - a * c;
                          if (disc < 0.0) return 0.0;
                          return std::max(0.0, (-bb + std::sqrt(disc)) / a);
                        },
                        [&](const FiniteSet&) { return 0.0; },
                    },
                    set_);
}

double ConstraintSet::interior_depth(const Vec& w) const {
  require_dim(w);
  return std::visit(Overloaded{
                        [&](const AllSpace&) { return kInf; },
                        [&](const Box& b) {
                          double depth = kInf;
                          for (int i = 0; i < m_; ++i) {
                            depth = std::min({depth, w[i] - b.lo[i], b.hi[i] - w[i]});
                          }
                          return std::max(depth, 0.0);
                        },
                        [&](const Ball& b) { return std::max(0.0, b.radius - (w - b.center).norm()); },
                        [&](const FiniteSet&) { return 0.0; },
                    },
                    set_);
}

std::vector<Vec> ConstraintSet::sample(int extra, std::uint64_t seed, const Vec* anchor) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vec> out;
  std::visit(Overloaded{
                 [&](const AllSpace&) {
                   const Vec base = anchor ? *anchor : Vec::Zero(m_);
                   for (double s : {0.5, 1.0, 2.0}) {
                     for (int i = 0; i < m_; ++i) {
                       Vec e = Vec::Zero(m_);
                       e[i] = s;
                       out.push_back(base + e);
                       out.push_back(base - e);
                     }
                   }
                   for (int k = 0; k < extra; ++k) {
                     Vec g(m_);
                     for (int i = 0; i < m_; ++i) g[i] = gauss(rng);
                     out.push_back(base + g);
                   }
                 },
                 [&](const Box& b) {
                   const int corners = m_ <= 12 ? (1 << m_) : 0;
                   for (int mask = 0; mask < corners; ++mask) {
                     Vec c(m_);
                     for (int i = 0; i < m_; ++i) c[i] = (mask >> i) & 1 ? b.hi[i] : b.lo[i];
                     out.push_back(c);
                   }
                   const Vec mid = 0.5 * (b.lo + b.hi);
                   out.push_back(mid);
                   if (m_ > 1) {
                     for (int i = 0; i < m_; ++i) {
                       Vec lo = mid;
                       Vec hi = mid;
                       lo[i] = b.lo[i];
                       hi[i] = b.hi[i];
                       out.push_back(lo);
                       out.push_back(hi);
                     }
                   }
                   for (int k = 0; k < extra; ++k) {
                     Vec p(m_);
                     for (int i = 0; i < m_; ++i) p[i] = b.lo[i] + unif(rng) * (b.hi[i] - b.lo[i]);
                     out.push_back(p);
                   }
                 },
                 [&](const Ball& b) {
                   out.push_back(b.center);
                   const int surface = std::max(64, extra);
                   auto direction = [&] {
                     Vec g(m_);
                     do {
                       for (int i = 0; i < m_; ++i) g[i] = gauss(rng);
                     } while (g.norm() < 1e-12);
                     return Vec(g / g.norm());
                   };
                   for (int k = 0; k < surface; ++k) out.push_back(b.center + b.radius * direction());
                   for (int k = 0; k < extra; ++k) {
                     const double r = b.radius * std::pow(unif(rng), 1.0 / m_);
                     out.push_back(b.center + r * direction());
                   }
                 },
                 [&](const FiniteSet& f) { out = f.points; },
             },
             set_);
  return out;
}

}  // namespace reach
