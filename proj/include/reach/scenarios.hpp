#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reach/config.hpp"
#include "reach/synthesis.hpp"

namespace reach {

/// One golden comparison. `basis` is "stated" (the example's own claim), "analytic" (a value
/// worked out by hand from the example) or "trivial".
struct Expectation {
  std::string key;
  std::string expected;
  std::string observed;
  bool pass = false;
  std::string source;
  std::string basis;
};

struct Scenario {
  std::string name;
  std::string source;
  std::string summary;
  ControlSystem system;
  ControlSignal control;
  Vec target;
};

struct ScenarioOptions {
  int steps_per_unit = kDefaultStepsPerUnit;
  std::uint64_t seed = 0;
};

struct ScenarioResult {
  std::string name;
  std::vector<Expectation> checks;
  Json details;
  bool passed() const;
};

const std::vector<std::string>& scenario_names();

/// Throws std::out_of_range for unknown names.
Scenario make_scenario(const std::string& name);

ScenarioResult run_scenario(const std::string& name, const ScenarioOptions& opts = {});

Json to_json(const ScenarioResult& r);

/// u = 1 on (1/(k+1), 1/k] for even k, 0 for odd k, k < K; u = 0 on [0, 1/K].
ControlSignal fuller_control(int K);

/// min over PC controls with values in [0, 1] on N equal intervals of [0, 4] of
/// ||(sum c_i h, sum c_i^2 h) - (pi, pi)||, by a sweep over s = sum c_i.
double ex6_residual_floor(int N);

}  // namespace reach
