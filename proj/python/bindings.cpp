#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "reach/report.hpp"
#include "reach/scenarios.hpp"

namespace py = pybind11;
using namespace reach;

namespace {

// Reports cross the boundary as JSON text; the Python package decodes them.
std::string dump(const Json& j) { return j.dump(); }

ControlSystem system_from_text(const std::string& text) { return system_from_json(Json::parse(text)); }

ControlSignal control_from_text(const ControlSystem& sys, const std::string& text) {
  return control_from_json(Json::parse(text), sys);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Regularity classification and sampled-data control synthesis";
  m.attr("SCHEMA") = kSchema;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ExpressionError", PyExc_ValueError);
  py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_ArithmeticError);

  py::class_<ControlSystem>(m, "ControlSystem")
      .def(py::init(&system_from_text), py::arg("config_json"))
      .def_readonly("n", &ControlSystem::n)
      .def_readonly("m", &ControlSystem::m)
      .def_readonly("T", &ControlSystem::T)
      .def_readonly("x0", &ControlSystem::x0)
      .def("to_json", [](const ControlSystem& s) { return dump(system_to_json(s)); });

  py::class_<ControlSignal>(m, "ControlSignal")
      .def(py::init(&control_from_text), py::arg("system"), py::arg("control_json"))
      .def_property_readonly("dim", &ControlSignal::dim)
      .def_property_readonly("horizon", &ControlSignal::horizon)
      .def(
          "__call__", [](const ControlSignal& u, double t) { return u.eval(t); }, py::arg("t"))
      .def("breakpoints", &ControlSignal::breakpoints);

  py::class_<Partition>(m, "Partition")
      .def(py::init<std::vector<double>>(), py::arg("times"))
      .def_static("uniform", &Partition::uniform, py::arg("horizon"), py::arg("intervals"))
      .def_property_readonly("times", &Partition::times)
      .def_property_readonly("norm", &Partition::norm);

  m.def(
      "endpoint", [](const ControlSystem& s, const ControlSignal& u, int steps) { return endpoint(s, u, steps); },
      py::arg("system"), py::arg("control"), py::arg("steps_per_unit") = kDefaultStepsPerUnit);

  m.def(
      "classify",
      [](const ControlSystem& s, const ControlSignal& u, const std::string& kind, int levels, int taus, int omegas,
         std::uint64_t seed, int steps) {
        const RegularityKind k = regularity_kind_from_string(kind);
        RegularityVerdict v;
        if (k == RegularityKind::StronglyRegular) {
          v = classify_strongly_regular(s, u, dyadic_dictionary(s.T, s.m, levels), kDefaultConeTol, steps);
        } else if (k == RegularityKind::StronglyURegular) {
          v = classify_strongly_U_regular(s, u, dyadic_dictionary(s.T, s.m, levels), kDefaultConeTol, steps);
        } else {
          v = classify_weakly_U_regular(s, u, taus, omegas, seed, kDefaultConeTol, steps);
        }
        return dump(to_json(v));
      },
      py::arg("system"), py::arg("control"), py::arg("kind") = "weak-U", py::arg("levels") = 4, py::arg("taus") = 32,
      py::arg("omegas") = 8, py::arg("seed") = 0, py::arg("steps_per_unit") = kDefaultStepsPerUnit);

  m.def(
      "synthesize",
      [](const ControlSystem& s, const ControlSignal& u, const Vec& x1, const Partition& part, const std::string& method,
         double tol, std::uint64_t seed, int steps) {
        SynthesisOptions o;
        o.tol = tol;
        o.seed = seed;
        o.steps_per_unit = steps;
        py::gil_scoped_release nogil;
        return dump(to_json(synthesize(method_from_string(method), s, u, x1, part, o)));
      },
      py::arg("system"), py::arg("control"), py::arg("target"), py::arg("partition"), py::arg("method") = "conic",
      py::arg("tol") = 1e-8, py::arg("seed") = 0, py::arg("steps_per_unit") = kDefaultStepsPerUnit);

  m.def(
      "estimate_threshold",
      [](const ControlSystem& s, const ControlSignal& u, const Vec& x1, int n_max, const std::string& method,
         std::uint64_t seed) {
        SynthesisOptions o;
        o.seed = seed;
        py::gil_scoped_release nogil;
        return dump(to_json(estimate_threshold(s, u, x1, n_max, method_from_string(method), o)));
      },
      py::arg("system"), py::arg("control"), py::arg("target"), py::arg("n_max"), py::arg("method") = "conic",
      py::arg("seed") = 0);

  m.def(
      "average_project",
      [](const ControlSignal& u, const Partition& part) {
        return average_project(u, part).as_piecewise_constant()->values;
      },
      py::arg("control"), py::arg("partition"));

  m.def("nnls", [](const Mat& A, const Vec& b) { return nnls(A, b).x; }, py::arg("A"), py::arg("b"));

  m.def(
      "subset_sum_gap_uniform",
      [](std::int64_t horizon, int intervals) {
        const auto r = subset_sum_reachability(exact_uniform_partition(horizon, intervals), ExactTime::pi_multiple(1));
        return py::make_tuple(r.reachable, r.best_gap);
      },
      py::arg("horizon"), py::arg("intervals"), "Reachability of pi by interval-length subsums, exact arithmetic.");

  m.def("scenario_names", &scenario_names);
  m.def(
      "run_scenario",
      [](const std::string& name, std::uint64_t seed) {
        ScenarioOptions o;
        o.seed = seed;
        py::gil_scoped_release nogil;
        return dump(to_json(run_scenario(name, o)));
      },
      py::arg("name"), py::arg("seed") = 0);
}
