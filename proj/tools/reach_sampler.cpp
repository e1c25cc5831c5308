#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "reach/report.hpp"
#include "reach/scenarios.hpp"

using namespace reach;

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string config;
  std::string control;
  std::string out;
  std::string csv;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int steps = kDefaultStepsPerUnit;
};

struct Loaded {
  Json inputs;
  ControlSystem sys;
  ControlSignal u;
  Vec target;
};

Partition parse_partition(const std::string& text, double T) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--partition", "expected uniform:N or times:t0,t1,...");
  const std::string kind = text.substr(0, colon), rest = text.substr(colon + 1);
  if (kind == "uniform") {
    std::size_t used = 0;
    const int N = std::stoi(rest, &used);
    if (used != rest.size() || N < 1) throw CLI::ValidationError("--partition", "N must be a positive integer");
    return Partition::uniform(T, N);
  }
  if (kind == "times") {
    std::vector<double> t;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) t.push_back(std::stod(item));
    return Partition(t);
  }
  throw CLI::ValidationError("--partition", "unknown partition kind '" + kind + "'");
}

// The system document may carry "control" and "target"; --control overrides the former.
Loaded load(const Common& c) {
  if (c.config.empty()) throw CLI::RequiredError("--config");
  Json doc = load_json_file(c.config);
  ControlSystem sys = system_from_json(doc);
  Json cdoc;
  if (!c.control.empty()) {
    cdoc = load_json_file(c.control);
  } else if (doc.contains("control")) {
    cdoc = doc["control"];
  } else {
    throw ConfigError("no control given: pass --control or add a \"control\" key to the config");
  }
  ControlSignal u = control_from_json(cdoc, sys);
  Vec target = doc.contains("target") ? vec_from_json(doc["target"], "target") : endpoint(sys, u, c.steps);
  Json inputs{{"system", doc}, {"control", cdoc}};
  return Loaded{inputs, std::move(sys), std::move(u), std::move(target)};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

void emit(const Common& c, const Json& report) {
  const std::string text = report.dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_text(c.out, text);
  }
}

void add_common(CLI::App* sub, Common& c, bool needs_control = true) {
  sub->add_option("--config", c.config, "System JSON file")->check(CLI::ExistingFile);
  if (needs_control) sub->add_option("--control", c.control, "Control JSON file")->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "Write the JSON report here instead of stdout");
  sub->add_option("--csv", c.csv, "Also write a CSV table to this path");
  sub->add_option("--steps", c.steps, "RK4 steps per unit time")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "Random seed (default REACH_SAMPLER_SEED or 0)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularity classification and sampled-data control synthesis for nonlinear control systems"};
  app.require_subcommand(1);
  std::vector<std::string> args(argv, argv + argc);
  Common c;

  auto* simulate = app.add_subcommand("simulate", "Integrate the state and report the trajectory");
  add_common(simulate, c);
  int stride = 100;
  simulate->add_option("--stride", stride, "Report every stride-th node")->check(CLI::PositiveNumber);

  auto* classify = app.add_subcommand("classify", "Classify the regularity of a control");
  add_common(classify, c);
  std::string kind = "weak-U";
  int levels = 4, taus = 32, omegas = 8;
  std::string lift;
  classify->add_option("--kind", kind, "strong | strong-U | weak-U")
      ->check(CLI::IsMember({"strong", "strong-U", "weak-U"}));
  classify->add_option("--levels", levels, "Dyadic dictionary depth")->check(CLI::NonNegativeNumber);
  classify->add_option("--taus", taus, "Needle times for weak-U")->check(CLI::PositiveNumber);
  classify->add_option("--omegas", omegas, "Extra needle values per time")->check(CLI::NonNegativeNumber);
  classify->add_option("--lift", lift, "Also search a singular certificate: NHG | HG | HM")
      ->check(CLI::IsMember({"NHG", "HG", "HM"}));

  auto* synth = app.add_subcommand("synthesize", "Synthesize a sampled control reaching the endpoint of u");
  add_common(synth, c);
  std::string method = "conic", partition = "uniform:36";
  double tol = 1e-8;
  synth->add_option("--method", method, "conic | needle")->check(CLI::IsMember({"conic", "needle"}));
  synth->add_option("--partition", partition, "uniform:N or times:t0,...,tN");
  synth->add_option("--tol", tol, "Endpoint residual tolerance")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "Estimate the sampling threshold over uniform partitions");
  add_common(sweep, c);
  int nmax = 256;
  sweep->add_option("--method", method, "conic | needle")->check(CLI::IsMember({"conic", "needle"}));
  sweep->add_option("--nmax", nmax, "Largest N in the family 2, 4, 8, ...")->check(CLI::Range(2, 1 << 16));
  sweep->add_option("--tol", tol, "Endpoint residual tolerance")->check(CLI::PositiveNumber);

  auto* scenario = app.add_subcommand("scenario", "Run a registered scenario against its expectations");
  std::string scenario_name = "all";
  scenario->add_option("name", scenario_name, "Scenario name or 'all'");
  scenario->add_option("--out", c.out, "Write the JSON report here instead of stdout");
  scenario->add_option("--steps", c.steps, "RK4 steps per unit time")->check(CLI::PositiveNumber);
  scenario->add_option("--seed", c.seed, "Random seed (default REACH_SAMPLER_SEED or 0)");

  auto* approx = app.add_subcommand("approx", "Piecewise constant projections and their L^s distances");
  add_common(approx, c);
  std::string rule = "mean";
  std::vector<double> exponents{1.0, 2.0};
  approx->add_option("--partition", partition, "uniform:N or times:t0,...,tN");
  approx->add_option("--rule", rule, "mean | midpoint | left-third")
      ->check(CLI::IsMember({"mean", "midpoint", "left-third"}));
  approx->add_option("--s", exponents, "Exponents s >= 1; use 'inf' for the sup norm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  for (auto* sub : {simulate, classify, synth, sweep, scenario, approx}) {
    if (sub->count("--seed")) c.seed_given = true;
  }
  const std::uint64_t seed = c.seed_given ? c.seed : seed_from_env(0);
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  Json settings{{"integrator", "rk4"}, {"steps_per_unit", c.steps}};

  try {
    if (*scenario) {
      std::vector<std::string> names;
      if (scenario_name == "all") {
        names = scenario_names();
      } else {
        names.push_back(scenario_name);
      }
      Json results = Json::array();
      bool ok = true;
      for (const auto& name : names) {
        ScenarioOptions so;
        so.steps_per_unit = c.steps;
        so.seed = seed;
        ScenarioResult r;
        try {
          r = run_scenario(name, so);
        } catch (const std::out_of_range& e) {
          std::cerr << "error: " << e.what() << "\n";
          return kExitUsage;
        }
        ok = ok && r.passed();
        for (const auto& e : r.checks) {
          if (!e.pass) {
            std::cerr << "MISMATCH " << name << " / " << e.key << ": expected " << e.expected << ", observed "
                      << e.observed << "\n";
          }
        }
        results.push_back(to_json(r));
      }
      emit(c, make_report("scenario", args, Json{{"scenarios", names}}, settings, results, elapsed(), seed));
      return ok ? 0 : kExitMismatch;
    }

    const Loaded in = load(c);
    Json results;
    std::string command;
    if (*simulate) {
      command = "simulate";
      const Trajectory tr = integrate_state(in.sys, in.u, c.steps);
      results = trajectory_to_json(tr, stride);
      if (!c.csv.empty()) write_text(c.csv, trajectory_csv(tr, stride));
    } else if (*classify) {
      command = "classify";
      const double ctol = kDefaultConeTol;
      RegularityVerdict v;
      if (kind == "strong") {
        v = classify_strongly_regular(in.sys, in.u, dyadic_dictionary(in.sys.T, in.sys.m, levels), ctol, c.steps);
      } else if (kind == "strong-U") {
        v = classify_strongly_U_regular(in.sys, in.u, dyadic_dictionary(in.sys.T, in.sys.m, levels), ctol, c.steps);
      } else {
        v = classify_weakly_U_regular(in.sys, in.u, taus, omegas, seed, ctol, c.steps);
      }
      results = to_json(v);
      if (!lift.empty()) {
        const auto cs = singular_certificate_search(in.sys, in.u, lift_kind_from_string(lift), 0, seed, c.steps);
        results["certificate"] = to_json(cs);
      }
      settings["levels"] = levels;
      settings["taus"] = taus;
      settings["omegas"] = omegas;
    } else if (*synth) {
      command = "synthesize";
      SynthesisOptions so;
      so.steps_per_unit = c.steps;
      so.seed = seed;
      so.tol = tol;
      const auto rep =
          synthesize(method_from_string(method), in.sys, in.u, in.target, parse_partition(partition, in.sys.T), so);
      results = to_json(rep);
      if (!c.csv.empty()) write_text(c.csv, trace_csv(rep));
      settings["tol"] = tol;
    } else if (*sweep) {
      command = "sweep";
      SynthesisOptions so;
      so.steps_per_unit = c.steps;
      so.seed = seed;
      so.tol = tol;
      const auto est = estimate_threshold(in.sys, in.u, in.target, nmax, method_from_string(method), so);
      results = to_json(est);
      if (!c.csv.empty()) write_text(c.csv, profile_csv(est));
      settings["tol"] = tol;
    } else if (*approx) {
      command = "approx";
      const Partition part = parse_partition(partition, in.sys.T);
      const ControlSignal v = rule == "mean" ? average_project(in.u, part)
                                             : value_sample_project(in.u, part, rule == "midpoint"
                                                                                   ? SampleRule::Midpoint
                                                                                   : SampleRule::LeftThird);
      results["partition"] = to_json(part);
      results["values"] = Json::array();
      for (const auto& w : v.as_piecewise_constant()->values) results["values"].push_back(vec_to_json(w));
      results["distances"] = Json::array();
      std::ostringstream csv;
      csv << "s,distance\n";
      for (double s : exponents) {
        const double d = lp_distance(in.u, v, s);
        results["distances"].push_back({{"s", number(s)}, {"distance", number(d)}});
        csv << s << "," << d << "\n";
      }
      if (!c.csv.empty()) write_text(c.csv, csv.str());
      settings["rule"] = rule;
    }
    emit(c, make_report(command, args, in.inputs, settings, results, elapsed(), seed));
    return 0;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
