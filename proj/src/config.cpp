#include "reach/config.hpp"

#include <fstream>

namespace reach {

namespace {

const Json& require(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw ConfigError(std::string("missing key \"") + key + "\"");
  return doc.at(key);
}

Mat mat_from_json(const Json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw ConfigError("\"" + key + "\" must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) {
    // A flat list is read as a column.
    Mat out(rows, 1);
    for (Eigen::Index i = 0; i < rows; ++i) out(i, 0) = j[i].get<double>();
    return out;
  }
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols) throw ConfigError("\"" + key + "\" rows differ in length");
    for (Eigen::Index c = 0; c < cols; ++c) out(i, c) = j[i][c].get<double>();
  }
  return out;
}

std::vector<Vec> values_from_json(const Json& j, int m, const std::string& key) {
  if (!j.is_array()) throw ConfigError("\"" + key + "\" must be an array");
  std::vector<Vec> out;
  for (const auto& v : j) {
    if (v.is_number()) {
      if (m != 1) throw ConfigError("scalar control value given for m = " + std::to_string(m));
      out.push_back(Vec::Constant(1, v.get<double>()));
    } else {
      Vec w = vec_from_json(v, key);
      if (w.size() != m) throw ConfigError("control value in \"" + key + "\" has wrong length");
      out.push_back(std::move(w));
    }
  }
  return out;
}

}  // namespace

Vec vec_from_json(const Json& j, const std::string& key) {
  if (j.is_number()) return Vec::Constant(1, j.get<double>());
  if (!j.is_array()) throw ConfigError("\"" + key + "\" must be a number or an array of numbers");
  Vec out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("\"" + key + "\" must contain only numbers");
    out[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return out;
}

Json vec_to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

ConstraintSet constraint_from_json(const Json& doc, int m) {
  if (doc.is_null() || (doc.is_string() && doc.get<std::string>() == "all")) return ConstraintSet::all(m);
  if (!doc.is_object() || doc.size() != 1) throw ConfigError("constraint must be \"all\" or a one-key object");
  if (doc.contains("box")) {
    const auto& b = doc.at("box");
    Vec lo = vec_from_json(require(b, "lo"), "lo");
    Vec hi = vec_from_json(require(b, "hi"), "hi");
    if (lo.size() == 1 && m > 1) lo = Vec::Constant(m, lo[0]);
    if (hi.size() == 1 && m > 1) hi = Vec::Constant(m, hi[0]);
    return ConstraintSet::box(std::move(lo), std::move(hi));
  }
  if (doc.contains("ball")) {
    const auto& b = doc.at("ball");
    Vec c = b.contains("center") ? vec_from_json(b.at("center"), "center") : Vec::Zero(m);
    return ConstraintSet::ball(std::move(c), require(b, "radius").get<double>());
  }
  if (doc.contains("finite")) return ConstraintSet::finite(values_from_json(doc.at("finite"), m, "finite"));
  throw ConfigError("unknown constraint kind " + doc.begin().key());
}

ControlSystem system_from_json(const Json& doc) {
  const double T = require(doc, "T").get<double>();
  const auto& dyn = require(doc, "dynamics");
  DynamicsPtr dynamics;
  int n = 0;
  int m = 0;
  if (dyn.is_object() && dyn.contains("linear")) {
    const auto& lin = dyn.at("linear");
    Mat A = mat_from_json(require(lin, "A"), "A");
    Mat B = mat_from_json(require(lin, "B"), "B");
    Vec g = lin.contains("g") ? vec_from_json(lin.at("g"), "g") : Vec::Zero(A.rows());
    auto d = std::make_shared<LinearDynamics>(std::move(A), std::move(B), std::move(g));
    n = d->state_dim();
    m = d->control_dim();
    dynamics = std::move(d);
  } else if (dyn.is_array()) {
    n = require(doc, "n").get<int>();
    m = require(doc, "m").get<int>();
    dynamics = ExpressionDynamics::parse(dyn.get<std::vector<std::string>>(), n, m);
  } else {
    throw ConfigError("\"dynamics\" must be a list of expressions or {\"linear\": {A, B, g}}");
  }
  if (doc.contains("n") && doc.at("n").get<int>() != n) throw ConfigError("\"n\" does not match the dynamics");
  if (doc.contains("m") && doc.at("m").get<int>() != m) throw ConfigError("\"m\" does not match the dynamics");
  Vec x0 = doc.contains("x0") ? vec_from_json(doc.at("x0"), "x0") : Vec::Zero(n);
  ConstraintSet U = constraint_from_json(doc.contains("constraint") ? doc.at("constraint") : Json(), m);
  return ControlSystem::make(T, std::move(x0), std::move(dynamics), std::move(U));
}

ControlSignal control_from_json(const Json& doc, const ControlSystem& sys) {
  if (!doc.is_object() || doc.empty()) throw ConfigError("control must be a one-key object");
  if (doc.contains("pc")) {
    const auto& pc = doc.at("pc");
    std::vector<Vec> values = values_from_json(require(pc, "values"), sys.m, "values");
    if (pc.contains("times")) {
      return ControlSignal::piecewise_constant(Partition(pc.at("times").get<std::vector<double>>()), std::move(values));
    }
    const int N = pc.contains("uniform") ? pc.at("uniform").get<int>() : static_cast<int>(values.size());
    return ControlSignal::piecewise_constant(Partition::uniform(sys.T, N), std::move(values));
  }
  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    Hold hold = Hold::ZeroOrder;
    if (g.contains("hold")) {
      const auto h = g.at("hold").get<std::string>();
      if (h == "linear") {
        hold = Hold::Linear;
      } else if (h != "zero" && h != "zero-order") {
        throw ConfigError("hold must be \"zero\" or \"linear\"");
      }
    }
    return ControlSignal::grid_sampled(require(g, "times").get<std::vector<double>>(),
                                       values_from_json(require(g, "values"), sys.m, "values"), hold);
  }
  if (doc.contains("analytic")) {
    auto sources = doc.at("analytic").get<std::vector<std::string>>();
    if (static_cast<int>(sources.size()) != sys.m) throw ConfigError("analytic control needs m expressions");
    return ControlSignal::analytic(sources, sys.T);
  }
  if (doc.contains("constant")) {
    Vec c = vec_from_json(doc.at("constant"), "constant");
    if (c.size() != sys.m) throw ConfigError("constant control has wrong length");
    return ControlSignal::constant(c, sys.T);
  }
  throw ConfigError("unknown control kind " + doc.begin().key());
}

Json control_to_json(const ControlSignal& u) {
  if (const auto* pc = u.as_piecewise_constant()) {
    Json values = Json::array();
    for (const auto& v : pc->values) values.push_back(vec_to_json(v));
    return Json{{"pc", {{"times", pc->partition.times()}, {"values", values}}}};
  }
  return Json{{"kind", u.kind_name()}, {"horizon", u.horizon()}};
}

Json system_to_json(const ControlSystem& sys) {
  Json out{{"n", sys.n}, {"m", sys.m}, {"T", sys.T}, {"x0", vec_to_json(sys.x0)}};
  if (const auto* e = sys.as_expression()) {
    Json rows = Json::array();
    for (const auto& r : e->rows()) rows.push_back(r.source());
    out["dynamics"] = rows;
  } else if (const auto* l = sys.as_linear()) {
    auto mat = [](const Mat& M) {
      Json rows = Json::array();
      for (Eigen::Index i = 0; i < M.rows(); ++i) {
        Json r = Json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
        rows.push_back(r);
      }
      return rows;
    };
    out["dynamics"] = {{"linear", {{"A", mat(l->A())}, {"B", mat(l->B())}, {"g", vec_to_json(l->g())}}}};
  } else {
    out["dynamics"] = sys.dynamics->describe();
  }
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ConstraintSet::AllSpace>) {
          out["constraint"] = "all";
        } else if constexpr (std::is_same_v<S, ConstraintSet::Box>) {
          out["constraint"] = {{"box", {{"lo", vec_to_json(s.lo)}, {"hi", vec_to_json(s.hi)}}}};
        } else if constexpr (std::is_same_v<S, ConstraintSet::Ball>) {
          out["constraint"] = {{"ball", {{"center", vec_to_json(s.center)}, {"radius", s.radius}}}};
        } else {
          Json pts = Json::array();
          for (const auto& p : s.points) pts.push_back(vec_to_json(p));
          out["constraint"] = {{"finite", pts}};
        }
      },
      sys.U.variant());
  return out;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace reach
