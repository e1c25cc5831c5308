#include "reach/control.hpp"

#include <algorithm>
#include <cmath>

#include "reach/errors.hpp"

namespace reach {

Partition::Partition(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw std::invalid_argument("partition needs at least two times");
  if (times_.front() != 0.0) throw std::invalid_argument("partition must start at 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw std::invalid_argument("partition times must be strictly increasing");
  }
}

Partition Partition::uniform(double horizon, int intervals) {
  if (intervals < 1 || !(horizon > 0.0)) throw std::invalid_argument("uniform partition needs N >= 1 and T > 0");
  std::vector<double> t(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) t[i] = horizon * static_cast<double>(i) / intervals;
  t.back() = horizon;
  return Partition(std::move(t));
}

double Partition::norm() const {
  double h = 0.0;
  for (int i = 0; i < intervals(); ++i) h = std::max(h, length(i));
  return h;
}

int Partition::interval_of(double t, Side side) const {
  const int n = intervals();
  if (side == Side::Right) {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    int i = static_cast<int>(it - times_.begin()) - 1;
    return std::clamp(i, 0, n - 1);
  }
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  int i = static_cast<int>(it - times_.begin()) - 1;
  return std::clamp(i, 0, n - 1);
}

struct ControlSignal::Spliced {
  ControlSignal base;
  std::vector<Segment> segments;
};

struct ControlSignal::Projected {
  ControlSignal reference;
  ControlSignal direction;
  ConstraintSet set;
};

struct ControlSignal::Combination {
  std::vector<std::pair<double, ControlSignal>> terms;
};

struct ControlSignal::Data {
  int m;
  double horizon;
  std::variant<PiecewiseConstant, GridSampled, Analytic, Spliced, Projected, Combination> rep;
};

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_values(const std::vector<Vec>& values) {
  if (values.empty()) throw std::invalid_argument("control needs at least one value");
  for (const auto& v : values) {
    if (v.size() != values.front().size() || v.size() == 0) throw DimensionError("control values must share a dimension");
  }
}

}  // namespace

ControlSignal ControlSignal::piecewise_constant(Partition partition, std::vector<Vec> values) {
  check_values(values);
  if (static_cast<int>(values.size()) != partition.intervals()) {
    throw std::invalid_argument("piecewise constant control needs one value per sampling interval");
  }
  const int m = static_cast<int>(values.front().size());
  const double T = partition.horizon();
  return ControlSignal(std::make_shared<Data>(Data{m, T, PiecewiseConstant{std::move(partition), std::move(values)}}));
}

ControlSignal ControlSignal::constant(const Vec& value, double horizon) {
  return piecewise_constant(Partition({0.0, horizon}), {value});
}

ControlSignal ControlSignal::grid_sampled(std::vector<double> times, std::vector<Vec> values, Hold hold) {
  check_values(values);
  if (times.size() != values.size() || times.size() < 2) throw std::invalid_argument("grid control needs matching times and values");
  if (times.front() != 0.0) throw std::invalid_argument("grid control must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("grid times must be strictly increasing");
  }
  const int m = static_cast<int>(values.front().size());
  const double T = times.back();
  return ControlSignal(std::make_shared<Data>(Data{m, T, GridSampled{std::move(times), std::move(values), hold}}));
}

ControlSignal ControlSignal::analytic(std::vector<Expression> exprs, double horizon) {
  if (exprs.empty()) throw std::invalid_argument("analytic control needs at least one expression");
  for (const auto& e : exprs) {
    if (e.state_dim() != 0 || e.control_dim() != 0) throw std::invalid_argument("analytic control expressions may only use t");
  }
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  const int m = static_cast<int>(exprs.size());
  return ControlSignal(std::make_shared<Data>(Data{m, horizon, Analytic{std::move(exprs)}}));
}

ControlSignal ControlSignal::analytic(const std::vector<std::string>& sources, double horizon) {
  std::vector<Expression> exprs;
  for (const auto& s : sources) exprs.push_back(Expression::parse(s, 0, 0));
  return analytic(std::move(exprs), horizon);
}

ControlSignal ControlSignal::spliced(ControlSignal base, std::vector<Segment> segments) {
  std::erase_if(segments, [](const Segment& s) { return !(s.end > s.start); });
  std::sort(segments.begin(), segments.end(), [](const Segment& a, const Segment& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].value.size() != base.dim()) throw DimensionError("segment value dimension mismatch");
    if (segments[i].start < 0.0 || segments[i].end > base.horizon() * (1.0 + 1e-12)) {
      throw std::invalid_argument("segment extends outside [0, T]");
    }
    if (i > 0 && segments[i].start < segments[i - 1].end) throw std::invalid_argument("segments overlap");
  }
  const int m = base.dim();
  const double T = base.horizon();
  return ControlSignal(std::make_shared<Data>(Data{m, T, Spliced{std::move(base), std::move(segments)}}));
}

ControlSignal ControlSignal::tangent_projected(ControlSignal reference, ControlSignal direction, ConstraintSet set) {
  if (reference.dim() != direction.dim() || reference.dim() != set.dim()) {
    throw DimensionError("tangent projection dimension mismatch");
  }
  if (!set.is_convex()) throw std::invalid_argument("tangent projection requires a convex constraint set");
  const int m = reference.dim();
  const double T = reference.horizon();
  return ControlSignal(
      std::make_shared<Data>(Data{m, T, Projected{std::move(reference), std::move(direction), std::move(set)}}));
}

ControlSignal ControlSignal::combination(std::vector<std::pair<double, ControlSignal>> terms) {
  if (terms.empty()) throw std::invalid_argument("combination needs at least one term");
  const int m = terms.front().second.dim();
  double T = terms.front().second.horizon();
  for (const auto& [c, s] : terms) {
    if (s.dim() != m) throw DimensionError("combination terms must share a dimension");
    T = std::max(T, s.horizon());
  }
  return ControlSignal(std::make_shared<Data>(Data{m, T, Combination{std::move(terms)}}));
}

int ControlSignal::dim() const { return data_->m; }
double ControlSignal::horizon() const { return data_->horizon; }

const ControlSignal::PiecewiseConstant* ControlSignal::as_piecewise_constant() const {
  return std::get_if<PiecewiseConstant>(&data_->rep);
}

const char* ControlSignal::kind_name() const {
  return std::visit(Overloaded{[](const PiecewiseConstant&) { return "pc"; }, [](const GridSampled&) { return "grid"; },
                               [](const Analytic&) { return "analytic"; }, [](const Spliced&) { return "spliced"; },
                               [](const Projected&) { return "projected"; },
                               [](const Combination&) { return "combination"; }},
                    data_->rep);
}

Vec ControlSignal::eval(double t, Side side) const {
  Vec out(data_->m);
  eval_into(t, side, out.data());
  return out;
}

void ControlSignal::eval_into(double t, Side side, double* out) const {
  const int m = data_->m;
  std::visit(
      Overloaded{
          [&](const PiecewiseConstant& pc) {
            const Vec& v = pc.values[pc.partition.interval_of(t, side)];
            std::copy(v.data(), v.data() + m, out);
          },
          [&](const GridSampled& g) {
            const auto& ts = g.times;
            const int last = static_cast<int>(ts.size()) - 1;
            int k;
            if (side == Side::Right) {
              k = static_cast<int>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin()) - 1;
            } else {
              k = static_cast<int>(std::lower_bound(ts.begin(), ts.end(), t) - ts.begin()) - 1;
            }
            if (g.hold == Hold::ZeroOrder) {
              // The final sample only matters at t = T itself.
              k = std::clamp(k, 0, last);
              if (k == last && last > 0 && side == Side::Left) k = last - 1;
              const Vec& v = g.values[k];
              std::copy(v.data(), v.data() + m, out);
              return;
            }
            k = std::clamp(k, 0, last - 1);
            const double a = ts[k];
            const double b = ts[k + 1];
            const double s = std::clamp((t - a) / (b - a), 0.0, 1.0);
            for (int i = 0; i < m; ++i) out[i] = (1.0 - s) * g.values[k][i] + s * g.values[k + 1][i];
          },
          [&](const Analytic& a) {
            for (int i = 0; i < m; ++i) out[i] = a.exprs[i].eval_raw(nullptr, nullptr, t);
          },
          [&](const Spliced& sp) {
            for (const auto& seg : sp.segments) {
              const bool inside = side == Side::Right ? (t >= seg.start && t < seg.end) : (t > seg.start && t <= seg.end);
              if (inside) {
                std::copy(seg.value.data(), seg.value.data() + m, out);
                return;
              }
            }
            sp.base.eval_into(t, side, out);
          },
          [&](const Projected& p) {
            const Vec ref = p.reference.eval(t, side);
            const Vec dir = p.direction.eval(t, side);
            const Vec proj = p.set.project_tangent(ref, dir);
            std::copy(proj.data(), proj.data() + m, out);
          },
          [&](const Combination& c) {
            std::fill(out, out + m, 0.0);
            Vec tmp(m);
            for (const auto& [coef, s] : c.terms) {
              s.eval_into(t, side, tmp.data());
              for (int i = 0; i < m; ++i) out[i] += coef * tmp[i];
            }
          },
      },
      data_->rep);
}

void ControlSignal::collect_breakpoints(std::vector<double>& out) const {
  std::visit(Overloaded{
                 [&](const PiecewiseConstant& pc) {
                   const auto& ts = pc.partition.times();
                   out.insert(out.end(), ts.begin() + 1, ts.end() - 1);
                 },
                 [&](const GridSampled& g) { out.insert(out.end(), g.times.begin() + 1, g.times.end() - 1); },
                 [&](const Analytic&) {},
                 [&](const Spliced& sp) {
                   sp.base.collect_breakpoints(out);
                   for (const auto& seg : sp.segments) {
                     out.push_back(seg.start);
                     out.push_back(seg.end);
                   }
                 },
                 [&](const Projected& p) {
                   p.reference.collect_breakpoints(out);
                   p.direction.collect_breakpoints(out);
                 },
                 [&](const Combination& c) {
                   for (const auto& [coef, s] : c.terms) s.collect_breakpoints(out);
                 },
             },
             data_->rep);
}

std::vector<double> ControlSignal::breakpoints() const {
  std::vector<double> out;
  collect_breakpoints(out);
  return merge_times(std::move(out), horizon());
}

std::vector<double> merge_times(std::vector<double> times, double horizon) {
  const double eps = 1e-12 * std::max(1.0, horizon);
  std::erase_if(times, [&](double t) { return !(t > eps) || !(t < horizon - eps); });
  std::sort(times.begin(), times.end());
  std::vector<double> out;
  for (double t : times) {
    if (out.empty() || t - out.back() > eps) out.push_back(t);
  }
  return out;
}

}  // namespace reach
