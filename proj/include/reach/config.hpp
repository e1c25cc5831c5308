#pragma once

#include <string>

#include <json.hpp>

#include "reach/errors.hpp"

#include "reach/control.hpp"
#include "reach/system.hpp"

namespace reach {

using Json = nlohmann::json;

/// Raised for malformed configuration documents. The message names the offending key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Keys: n, m, T, x0, dynamics, constraint. See README for the accepted shapes.
ControlSystem system_from_json(const Json& doc);

/// Accepts {"pc": ...}, {"grid": ...}, {"analytic": [...]} or {"constant": [...]}.
ControlSignal control_from_json(const Json& doc, const ControlSystem& sys);

ConstraintSet constraint_from_json(const Json& doc, int m);

Json vec_to_json(const Vec& v);
Vec vec_from_json(const Json& j, const std::string& key);
Json control_to_json(const ControlSignal& u);
Json system_to_json(const ControlSystem& sys);

Json load_json_file(const std::string& path);

}  // namespace reach
