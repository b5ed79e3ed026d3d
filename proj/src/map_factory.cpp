#include "hyptime/map_factory.hpp"

#include <algorithm>
#include <cmath>

#include "hyptime/errors.hpp"
#include "hyptime/example_maps.hpp"

namespace hyptime {

namespace {

double scalar_param(const MapSpec& spec, const std::string& key) {
  auto it = spec.params.find(key);
  if (it == spec.params.end() || it->second.size() != 1) {
    throw DomainError(spec.name + ": parameter '" + key + "' must be a single number");
  }
  return it->second.front();
}

MapModel piecewise_map(const MapSpec& spec) {
  auto knots_it = spec.params.find("knots");
  auto values_it = spec.params.find("values");
  if (knots_it == spec.params.end() || values_it == spec.params.end()) {
    throw DomainError(spec.name + ": piecewise maps need 'knots' and 'values'");
  }
  const std::vector<double> knots = knots_it->second;
  const std::vector<double> values = values_it->second;
  if (knots.size() < 2 || knots.size() != values.size()) {
    throw DomainError(spec.name + ": 'knots' and 'values' must have equal length >= 2");
  }
  std::vector<double> slopes;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (!(knots[i + 1] > knots[i])) throw DomainError(spec.name + ": knots must increase");
    const double s = (values[i + 1] - values[i]) / (knots[i + 1] - knots[i]);
    if (s == 0.0) throw DomainError(spec.name + ": flat piece on segment " + std::to_string(i));
    slopes.push_back(s);
  }
  const bool circle = spec.params.contains("circle") && scalar_param(spec, "circle") != 0.0;

  MapModel m;
  m.name = spec.name;
  m.domain = {circle ? DomainKind::circle : DomainKind::interval, knots.front(), knots.back()};
  auto segment = [knots](double x) {
    auto it = std::upper_bound(knots.begin(), knots.end(), x);
    auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - knots.begin() - 1));
    return std::min(idx, knots.size() - 2);
  };
  m.f = [knots, values, slopes, segment](double x) {
    const std::size_t i = segment(x);
    return values[i] + slopes[i] * (x - knots[i]);
  };
  m.df = [slopes, segment](double x) { return slopes[segment(x)]; };
  if (!circle) {
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      const double x0 = knots[i], y0 = values[i], s = slopes[i];
      m.branches.push_back({knots[i], knots[i + 1], std::min(values[i], values[i + 1]),
                            std::max(values[i], values[i + 1]), s > 0.0,
                            [x0, y0, s](double y) { return x0 + (y - y0) / s; }});
    }
  }
  return m;
}

}  // namespace

std::vector<std::string> builtin_map_names() {
  return {"paper-sqrt", "doubling", "tent", "identity", "linear-expanding"};
}

MapModel make_map(const MapSpec& spec) {
  MapModel m;
  if (spec.kind == "builtin") {
    if (spec.name == "paper-sqrt") {
      m = paper_sqrt_map();
    } else if (spec.name == "doubling") {
      m = doubling_map();
    } else if (spec.name == "tent") {
      m = tent_map();
    } else if (spec.name == "identity") {
      m = identity_map();
    } else if (spec.name == "linear-expanding") {
      m = linear_expanding_map(scalar_param(spec, "c"));
    } else {
      throw DomainError("unknown builtin map '" + spec.name + "'");
    }
  } else if (spec.kind == "piecewise") {
    m = piecewise_map(spec);
  } else {
    throw DomainError("map kind must be 'builtin' or 'piecewise' (got '" + spec.kind + "')");
  }
  if (spec.beta) m.beta = *spec.beta;
  if (spec.singular_points) m.singular_set = *spec.singular_points;
  validate_map(m);
  return m;
}

MapSpec map_spec_from_json(const nlohmann::json& block) {
  MapSpec spec;
  spec.name = block.at("name").get<std::string>();
  spec.kind = block.value("kind", std::string("builtin"));
  if (block.contains("params")) {
    for (const auto& [key, value] : block.at("params").items()) {
      spec.params[key] = value.is_array() ? value.get<std::vector<double>>()
                                          : std::vector<double>{value.get<double>()};
    }
  }
  if (block.contains("beta")) spec.beta = block.at("beta").get<double>();
  if (block.contains("singular_points")) {
    spec.singular_points = block.at("singular_points").get<std::vector<double>>();
  }
  return spec;
}

nlohmann::json map_spec_to_json(const MapSpec& spec) {
  nlohmann::json j;
  j["name"] = spec.name;
  j["kind"] = spec.kind;
  j["params"] = nlohmann::json::object();
  for (const auto& [key, value] : spec.params) j["params"][key] = value;
  if (spec.beta) j["beta"] = *spec.beta;
  if (spec.singular_points) j["singular_points"] = *spec.singular_points;
  return j;
}

}  // namespace hyptime
