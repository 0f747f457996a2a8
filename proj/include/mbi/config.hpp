// config.hpp -- JSON run configuration (schema version 1)
#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mbi/series.hpp"
#include "mbi/sources.hpp"

namespace mbi {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  GridSpec grid;
  std::vector<SourceConfig> sources;
  double beta = 0.0;
  int order = 1;
  EngineMode mode = EngineMode::em;
  double alpha = 0.5;
  PotentialMethod method = PotentialMethod::fast_transform;
  double safety = 2.0;
  std::string out_dir = "out";
  bool write_vtk_files = true;
  bool write_raw_files = true;

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load_file(const std::string& path);

  /// Schema-level checks plus mode/source consistency (the electrostatic mode
  /// forbids current sources, the magnetostatic mode forbids charge sources).
  void validate() const;
};

std::string mode_name(EngineMode m);
EngineMode mode_from_name(const std::string& s);

}  // namespace mbi
