#include "lbmo/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "lbmo/error.hpp"

namespace lbmo {

const std::vector<std::string>& known_scenarios() {
  static const std::vector<std::string> names{"lbmo-example", "composition", "flow-modulus",
                                              "growth",       "conservation", "kernel-oracle"};
  return names;
}

bool is_known_scenario(const std::string& name) {
  const auto& k = known_scenarios();
  return std::find(k.begin(), k.end(), name) != k.end();
}

Json scenario_defaults(const std::string& s) {
  Json j;
  if (s == "lbmo-example") {
    j["field"] = "example";  // example | sign | constant
    j["n"] = 1024;
    j["j_max"] = 5;
    j["rungs"] = 3;
    j["centers"] = 16;
    j["half_width"] = 1.0;
    j["lbmo_tol"] = 0.1;
  } else if (s == "composition") {
    j["n"] = 512;
    j["j_max"] = 4;
    j["centers"] = 16;
    j["p"] = 1.5;
    j["fields"] = {"example", "sign", "random"};
    j["star_pair_budget"] = 20000;
    j["ratio_threshold"] = 3.0;
    j["star_span"] = 10.0;
    j["lp_tol"] = 1e-2;
  } else if (s == "flow-modulus") {
    j["cases"] = {"zero", "rotation", "shear", "taylor-green", "solver"};
    j["dt"] = 1e-3;
    j["t_final"] = 2.0;
    j["times"] = 8;
    j["seeds_n"] = 48;
    j["tg_n"] = 256;
    j["solver_n"] = 128;
    j["solver_initial"] = "two-mode";  // two-mode | random
    j["solver_max_mode"] = 2;
    j["solver_dt"] = 5e-3;
    j["solver_diag_every"] = 10;
    j["ll_pair_budget"] = 20000;
    j["star_pair_budget"] = 20000;
    j["ratio_threshold"] = 1.1;
  } else if (s == "growth") {
    j["initial"] = "example";  // example | taylor-green | zero
    j["n"] = 256;
    j["t_final"] = 2.0;
    j["dt"] = 2e-3;
    j["diag_every"] = 25;
    j["mollify_n"] = 8;
    j["perturbation"] = 0.5;
    j["j_max"] = 3;
    j["centers"] = 16;
    j["p"] = 1.5;
    j["ll_pair_budget"] = 4000;
    j["residual_threshold"] = 0.2;
  } else if (s == "conservation") {
    j["initial"] = "random";  // random | taylor-green | zero
    j["n"] = 256;
    j["t_final"] = 1.0;
    j["dt"] = 2e-3;
    j["diag_every"] = 50;
    j["max_mode"] = 4;
    j["p"] = 1.5;
    j["j_max"] = 3;
    j["centers"] = 16;
    j["ll_pair_budget"] = 4000;
    j["compare_dealias"] = true;
    j["lp2_tol"] = 1e-4;
    j["mean_tol"] = 1e-12;
  } else if (s == "kernel-oracle") {
    j["n"] = 128;
    j["direct_n"] = 128;
    j["bump_radius"] = 0.5;
    j["exact_tol"] = 1e-10;
    j["agree_tol"] = 0.05;
    j["far_tol"] = 0.02;
  } else {
    throw Error("unknown scenario '" + s + "'");
  }
  return j;
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["name"] = name;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["out_dir"] = out_dir.generic_string();
  j["params"] = params;
  return j;
}

namespace {

void require_known(const std::string& scenario) {
  if (!is_known_scenario(scenario)) {
    std::string list;
    for (const auto& k : known_scenarios()) list += (list.empty() ? "" : ", ") + k;
    throw Error("unknown scenario '" + scenario + "' (known: " + list + ")");
  }
}

Json from_toml(const toml::node& n) {
  if (auto t = n.as_table()) {
    Json j = Json::object();
    for (const auto& [k, v] : *t) j[std::string(k.str())] = from_toml(v);
    return j;
  }
  if (auto a = n.as_array()) {
    Json j = Json::array();
    for (const auto& v : *a) j.push_back(from_toml(v));
    return j;
  }
  if (auto v = n.as_string()) return v->get();
  if (auto v = n.as_integer()) return v->get();
  if (auto v = n.as_floating_point()) return v->get();
  if (auto v = n.as_boolean()) return v->get();
  throw Error("config: unsupported TOML value type");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  if (!j.is_object()) throw Error("config: top level must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "name" && k != "scenario" && k != "seed" && k != "out_dir" && k != "params")
      throw Error("config: unknown key '" + k + "'");
  if (!j.contains("scenario")) throw Error("config: missing 'scenario'");
  const std::string scenario = j.at("scenario").get<std::string>();
  require_known(scenario);
  ExperimentConfig c = default_config(scenario);
  if (j.contains("name")) c.name = j.at("name").get<std::string>();
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_integer() || s.get<long long>() < 0) throw Error("config: seed must be a nonnegative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("params")) {
    const Json& p = j.at("params");
    if (!p.is_object()) throw Error("config: 'params' must be a table");
    for (const auto& [k, v] : p.items()) {
      if (!c.params.contains(k)) throw Error("config: unknown parameter '" + k + "' for scenario " + scenario);
      const Json& d = c.params[k];
      const bool ok = (d.is_number() && v.is_number()) || d.type() == v.type();
      if (!ok) throw Error("config: parameter '" + k + "' has the wrong type");
      if (d.is_number_integer() && !v.is_number_integer())
        throw Error("config: parameter '" + k + "' must be an integer");
      c.params[k] = v;
    }
  }
  return c;
}

ExperimentConfig default_config(const std::string& scenario, std::uint64_t seed) {
  require_known(scenario);
  ExperimentConfig c;
  c.name = scenario;
  c.scenario = scenario;
  c.seed = seed;
  c.out_dir = std::filesystem::path("out") / scenario;
  c.params = scenario_defaults(scenario);
  return c;
}

ExperimentConfig parse_config(const std::string& text, bool is_toml) {
  Json j;
  if (is_toml) {
    try {
      j = from_toml(toml::parse(text));
    } catch (const toml::parse_error& e) {
      throw Error(std::string("config: TOML parse error: ") + std::string(e.description()));
    }
  } else {
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(std::string("config: JSON parse error: ") + e.what());
    }
  }
  return ExperimentConfig::from_json(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string ext = path.extension().string();
  if (ext != ".toml" && ext != ".json") throw Error("config: expected a .toml or .json file, got " + path.string());
  return parse_config(ss.str(), ext == ".toml");
}

}  // namespace lbmo
