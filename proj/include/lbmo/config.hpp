#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace lbmo {

using Json = nlohmann::ordered_json;

const std::vector<std::string>& known_scenarios();
bool is_known_scenario(const std::string& name);

/// Every tunable of a scenario with its default value.
Json scenario_defaults(const std::string& scenario);

/// A scenario plus its parameters; fully determines the outputs together
/// with the seed.
struct ExperimentConfig {
  std::string name;
  std::string scenario;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  Json params;  // scenario_defaults overlaid with user values

  /// Canonical form written to run.json: name, scenario, seed, out_dir, params.
  Json to_json() const;
  static ExperimentConfig from_json(const Json& j);

  template <class T>
  T param(const std::string& key) const {
    return params.at(key).get<T>();
  }
};

/// Defaults for `scenario`; out_dir defaults to "out/<scenario>".
ExperimentConfig default_config(const std::string& scenario, std::uint64_t seed = 0);

/// Reads a .toml or .json file. Top-level keys: name, scenario, seed,
/// out_dir and a `params` table; unknown parameter names are rejected.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, bool toml);

}  // namespace lbmo
