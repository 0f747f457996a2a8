#include "mbi/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace mbi {

using nlohmann::json;

namespace {

Vec3 vec3_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(std::string(what) + ": expected an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

SourceKind kind_from_name(const std::string& s) {
  if (s == "mollified_ball") return SourceKind::mollified_ball;
  if (s == "truncated_gaussian") return SourceKind::truncated_gaussian;
  if (s == "ring_current") return SourceKind::ring_current;
  if (s == "superposition") return SourceKind::superposition;
  throw ConfigError("unknown source kind: " + s);
}

SourceConfig source_from_json(const json& j) {
  SourceConfig s;
  s.kind = kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("center")) s.center = vec3_from(j.at("center"), "center");
  if (j.contains("radius")) s.radius = j.at("radius").get<double>();
  if (j.contains("minor_radius"))
    s.minor_radius = j.at("minor_radius").get<double>();
  if (j.contains("major_radius"))
    s.major_radius = j.at("major_radius").get<double>();
  if (j.contains("amplitude")) s.amplitude = j.at("amplitude").get<double>();
  if (j.contains("axis")) s.axis = vec3_from(j.at("axis"), "axis");
  if (j.contains("children"))
    for (const auto& c : j.at("children")) s.children.push_back(source_from_json(c));
  return s;
}

}  // namespace

std::string mode_name(EngineMode m) {
  switch (m) {
    case EngineMode::em: return "em";
    case EngineMode::electrostatic: return "electrostatic";
    case EngineMode::magnetostatic: return "magnetostatic";
  }
  return "em";
}

EngineMode mode_from_name(const std::string& s) {
  if (s == "em") return EngineMode::em;
  if (s == "electrostatic") return EngineMode::electrostatic;
  if (s == "magnetostatic") return EngineMode::magnetostatic;
  throw ConfigError("unknown mode: " + s);
}

RunConfig RunConfig::from_json(const json& j) {
  try {
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
      throw ConfigError("config: schema_version must be 1");
    RunConfig cfg;
    const json& g = j.at("grid");
    const json& dims = g.at("dims");
    if (!dims.is_array() || dims.size() != 3)
      throw ConfigError("grid.dims: expected 3 integers");
    for (int a = 0; a < 3; ++a) cfg.grid.dims[a] = dims[a].get<int>();
    cfg.grid.spacing = g.at("spacing").get<double>();
    if (g.contains("origin")) {
      const Vec3 o = vec3_from(g.at("origin"), "grid.origin");
      cfg.grid.origin = {o.x, o.y, o.z};
    }
    for (const auto& s : j.value("sources", json::array()))
      cfg.sources.push_back(source_from_json(s));
    cfg.beta = j.value("beta", 0.0);
    cfg.order = j.value("order", 1);
    cfg.mode = mode_from_name(j.value("mode", "em"));
    cfg.alpha = j.value("alpha", 0.5);
    const std::string m = j.value("method", "fast_transform");
    if (m == "direct_sum")
      cfg.method = PotentialMethod::direct_sum;
    else if (m == "fast_transform")
      cfg.method = PotentialMethod::fast_transform;
    else
      throw ConfigError("unknown potential method: " + m);
    cfg.safety = j.value("safety_factor", 2.0);
    if (j.contains("output")) {
      const json& o = j.at("output");
      cfg.out_dir = o.value("dir", cfg.out_dir);
      cfg.write_vtk_files = o.value("write_vtk", true);
      cfg.write_raw_files = o.value("write_raw", true);
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return from_json(j);
}

void RunConfig::validate() const {
  grid.validate();
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  if (order < 0) throw ConfigError("order must be >= 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  if (!(safety >= 1.0)) throw ConfigError("safety_factor must be >= 1");
  for (const auto& s : sources) {
    try {
      s.validate(grid);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (mode == EngineMode::electrostatic && s.is_current())
      throw ConfigError("electrostatic mode forbids current sources");
    if (mode == EngineMode::magnetostatic && !s.is_current())
      throw ConfigError("magnetostatic mode forbids charge sources");
  }
}

}  // namespace mbi
