#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyptime/dynamics.hpp"

namespace hyptime {

/// Declarative map description: `{ name, kind: builtin|piecewise, params, beta,
/// singular_points }`.
///
/// Builtins: paper-sqrt, doubling, tent, identity, linear-expanding (param `c`).
/// Piecewise maps are continuous piecewise-linear interpolants through
/// `knots` / `values` on [knots.front(), knots.back()]; param `circle` = 1 glues
/// the ends and reduces values modulo the length.
struct MapSpec {
  std::string name = "doubling";
  std::string kind = "builtin";
  std::map<std::string, std::vector<double>> params;
  std::optional<double> beta;
  std::optional<std::vector<double>> singular_points;
};

/// Builds and validates the map. Throws DomainError on unknown names or
/// inconsistent parameters.
MapModel make_map(const MapSpec& spec);

MapSpec map_spec_from_json(const nlohmann::json& block);
nlohmann::json map_spec_to_json(const MapSpec& spec);

std::vector<std::string> builtin_map_names();

}  // namespace hyptime
