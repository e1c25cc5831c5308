#include "reach/report.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <sstream>

namespace reach {

namespace {

Json vec(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

Json vecs(const std::vector<Vec>& vs) {
  Json a = Json::array();
  for (const auto& v : vs) a.push_back(vec(v));
  return a;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::string inputs_digest(const Json& inputs) {
  const std::string s = inputs.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* s = std::getenv("REACH_SAMPLER_SEED");
  if (!s || !*s) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  return end && *end == '\0' ? static_cast<std::uint64_t>(v) : fallback;
}

Json make_report(const std::string& command, const std::vector<std::string>& argv, const Json& inputs,
                 const Json& settings, const Json& results, double wall_seconds, std::uint64_t seed) {
  Json r;
  r["schema"] = kSchema;
  r["command"] = command;
  r["argv"] = argv;
  r["inputs_digest"] = inputs_digest(inputs);
  r["inputs"] = inputs;
  r["settings"] = settings;
  r["seed"] = seed;
  r["results"] = results;
  r["wall_time_s"] = wall_seconds;
  return r;
}

Json to_json(const Partition& part) {
  Json j;
  j["intervals"] = part.intervals();
  j["norm"] = part.norm();
  j["times"] = part.times();
  return j;
}

Json to_json(const SpanResult& s) {
  Json j;
  j["spans"] = s.spans;
  j["margin"] = number(s.margin);
  j["max_residual"] = number(s.max_residual);
  j["residuals"] = Json::array();
  for (double r : s.residuals) j["residuals"].push_back(number(r));
  j["weights"] = vecs(s.weights);
  j["separating"] = s.separating ? vec(*s.separating) : Json();
  return j;
}

Json to_json(const RegularityVerdict& v) {
  Json j;
  j["kind"] = to_string(v.kind);
  j["verdict"] = to_string(v.verdict);
  j["margin"] = number(v.margin);
  j["max_residual"] = number(v.max_residual);
  j["resolution"] = v.resolution;
  j["psi"] = v.psi ? vec(*v.psi) : Json();
  j["sample_size"] = v.sample.vectors.size();
  j["weights"] = vecs(v.weights);
  return j;
}

Json to_json(const LiftResidual& r) {
  Json j;
  j["kind"] = to_string(r.kind);
  j["psi"] = vec(r.psi);
  j["residual"] = number(r.residual);
  j["worst_time"] = number(r.worst_time);
  return j;
}

Json to_json(const CertificateSearch& c) {
  Json j;
  j["min_residual"] = number(c.min_residual);
  j["psi"] = vec(c.psi);
  j["evaluated"] = c.evaluated;
  return j;
}

Json to_json(const LinearInteriorCheck& c) {
  Json j;
  j["linear"] = c.linear;
  j["kalman"] = c.kalman;
  j["interior_interval"] = c.interior_interval;
  j["interior_length"] = number(c.interior_length);
  j["regular"] = c.regular();
  return j;
}

Json to_json(const SlopeReport& s) {
  Json j;
  j["alphas"] = s.alphas;
  j["prediction"] = vec(s.prediction);
  j["quotients"] = vecs(s.quotients);
  j["deviations"] = Json::array();
  for (double d : s.deviations) j["deviations"].push_back(number(d));
  j["errors"] = s.errors;
  j["max_deviation"] = number(s.max_deviation);
  j["deviation_ratios"] = Json::array();
  for (double r : s.deviation_ratios()) j["deviation_ratios"].push_back(number(r));
  return j;
}

Json to_json(const NeedlePackage& chi) {
  Json j;
  j["taus"] = chi.taus;
  j["omegas"] = Json::array();
  for (const auto& om : chi.omegas) j["omegas"].push_back(vecs(om));
  j["beta"] = number(chi.beta);
  j["total"] = chi.total();
  return j;
}

Json to_json(const SynthesisReport& r) {
  Json j;
  j["method"] = to_string(r.method);
  j["partition"] = to_json(r.partition);
  j["verdict"] = r.success ? "success" : "failure";
  j["reason"] = to_string(r.reason);
  j["message"] = r.message;
  j["residual"] = number(r.residual);
  j["residual_fine"] = number(r.residual_fine);
  j["scale"] = number(r.scale);
  j["alpha"] = r.alpha.size() ? vec(r.alpha) : Json::array();
  if (r.control) {
    const auto* pc = r.control->as_piecewise_constant();
    j["control"] = pc ? vecs(pc->values) : control_to_json(*r.control);
  } else {
    j["control"] = Json();
  }
  j["package"] = r.package ? to_json(*r.package) : Json();
  j["iterations"] = Json::array();
  for (const auto& it : r.trace) {
    Json e;
    e["iter"] = it.iter;
    e["residual"] = number(it.residual);
    e["alpha_norm"] = number(it.alpha_norm);
    if (it.z.size()) e["z"] = vec(it.z);
    j["iterations"].push_back(e);
  }
  return j;
}

Json to_json(const ThresholdEstimate& e) {
  Json j;
  j["method"] = to_string(e.method);
  j["family"] = e.intervals;
  j["delta_hat"] = e.delta_hat ? Json(*e.delta_hat) : Json();
  j["outcomes"] = Json::array();
  for (std::size_t i = 0; i < e.outcomes.size(); ++i) {
    const auto& r = e.outcomes[i];
    Json o;
    o["N"] = e.intervals[i];
    o["norm"] = r.partition.norm();
    o["verdict"] = r.success ? "success" : "failure";
    o["reason"] = to_string(r.reason);
    o["residual"] = number(r.residual);
    o["iterations"] = r.trace.size();
    j["outcomes"].push_back(o);
  }
  return j;
}

Json to_json(const IntervalDemoReport& r) {
  Json j;
  j["hull"] = {number(r.hull_min), number(r.hull_max)};
  j["target"] = number(r.target);
  j["inside"] = r.inside;
  j["separable"] = r.separable;
  j["lambda"] = number(r.lambda);
  j["residual"] = number(r.residual);
  j["verdict"] = r.success ? "success" : "failure";
  j["message"] = r.message;
  auto values = [](const std::optional<ControlSignal>& c) {
    if (!c) return Json();
    const auto* pc = c->as_piecewise_constant();
    return pc ? vecs(pc->values) : Json();
  };
  j["control"] = values(r.control);
  j["min_control"] = values(r.min_control);
  j["max_control"] = values(r.max_control);
  return j;
}

Json to_json(const SubsetSumResult& r) {
  Json j;
  j["reachable"] = r.reachable;
  j["best_gap"] = number(r.best_gap);
  j["witness"] = r.witness;
  j["sums"] = r.sums;
  return j;
}

Json to_json(const ExactPartition& p) {
  Json a = Json::array();
  for (const auto& t : p) a.push_back(t.to_string());
  return a;
}

Json trajectory_to_json(const Trajectory& tr, int stride) {
  stride = std::max(stride, 1);
  Json j;
  j["t"] = Json::array();
  j["x"] = Json::array();
  const int last = tr.steps();
  for (int k = 0; k <= last; k += stride) {
    j["t"].push_back(tr.times()[k]);
    j["x"].push_back(vec(tr.state(k)));
    if (k != last && k + stride > last) k = last - stride;
  }
  j["final_state"] = vec(tr.final_state());
  return j;
}

std::string trace_csv(const SynthesisReport& r) {
  std::ostringstream os;
  const int nz = r.trace.empty() ? 0 : static_cast<int>(r.trace.front().z.size());
  os << "iter,residual,alpha_norm";
  for (int i = 0; i < nz; ++i) os << ",z_" << i + 1;
  os << "\n";
  for (const auto& it : r.trace) {
    os << it.iter << "," << fmt(it.residual) << "," << fmt(it.alpha_norm);
    for (int i = 0; i < it.z.size(); ++i) os << "," << fmt(it.z[i]);
    os << "\n";
  }
  return os.str();
}

std::string profile_csv(const ThresholdEstimate& e) {
  std::ostringstream os;
  os << "N,norm,success,reason,residual\n";
  for (std::size_t i = 0; i < e.outcomes.size(); ++i) {
    const auto& r = e.outcomes[i];
    os << e.intervals[i] << "," << fmt(r.partition.norm()) << "," << (r.success ? 1 : 0) << ","
       << to_string(r.reason) << "," << fmt(r.residual) << "\n";
  }
  return os.str();
}

std::string trajectory_csv(const Trajectory& tr, int stride) {
  stride = std::max(stride, 1);
  std::ostringstream os;
  const int n = static_cast<int>(tr.states().rows());
  os << "t";
  for (int i = 0; i < n; ++i) os << ",x_" << i + 1;
  os << "\n";
  const int last = tr.steps();
  for (int k = 0; k <= last; k += stride) {
    os << fmt(tr.times()[k]);
    for (int i = 0; i < n; ++i) os << "," << fmt(tr.states()(i, k));
    os << "\n";
    if (k != last && k + stride > last) k = last - stride;
  }
  return os.str();
}

}  // namespace reach
