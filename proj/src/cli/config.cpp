#include "locid/cli/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "locid/error.hpp"

namespace locid::cli {

using nlohmann::json;

const std::vector<ExperimentInfo>& catalog() {
  static const std::vector<ExperimentInfo> entries = {
      {"counterexample",
       "Sequence-space map whose zero set accumulates at alpha0: no ball identifies it",
       {"failure of local identification without a rank-plus-nonlinearity condition"},
       {{"terms", 64}, {"k_min", 2}, {"k_max", 12}, {"samples", 200},
        {"radii", json::array({0.5, 0.1, 0.01})}}},
      {"quantile",
       "Endogenous quantile IV on a Gaussian triangular design with a quadratic remainder bound",
       {"local identification under a nonlinearity bound", "source-condition ellipsoid",
        "quantile IV remainder bound L1 L2"},
       {{"tau", 0.5}, {"nx", 101}, {"nw", 101}, {"ny_half", 80}, {"samples", 200},
        {"deviations", 500}, {"directions", 10}, {"step", 1e-4}, {"gateaux_tol", 1e-5},
        {"bound_slack", 1.05}}},
      {"single-index",
       "Single-index and partially linear IV designs: completeness of W given V versus Pi",
       {"partialling out and nonsingularity of Pi", "necessity of incompleteness for single-index models"},
       {{"designs", 24}, {"completeness_tol", 1e-10}, {"pi_tol", 1e-8}, {"samples", 200}}},
      {"ccapm",
       "Consumption CAPM with state function g: completeness, Pi, global identification, Perron-Frobenius",
       {"semiparametric identification with nonparametric nuisance", "completeness-based global identification",
        "positive eigenpair of the transfer operator"},
       {{"n_c", 21}, {"n_z", 25}, {"pf_n_c", 201}, {"pf_n_z", 7}, {"window", 1.0},
        {"samples", 200}, {"directions", 10}, {"step", 1e-4}, {"completeness_tol", 1e-10},
        {"pi_tol", 1e-8}, {"pf_tol", 1e-12}, {"pf_max_iter", 10000}, {"gateaux_tol", 1e-5}}},
      {"genericity",
       "Monte Carlo injectivity of random kernel operators built from orthonormal bases",
       {"genericity of completeness"},
       {{"trunc_N", 30}, {"power", 2.0}, {"draws", 1000}, {"tol", 1e-12}, {"kappa", 1.0},
        {"positive", false}, {"density", false}, {"dependent_u", false}, {"match_tol", 1e-10}}},
      {"cone-suite",
       "Random finite-dimensional maps checked against the tangential cone inclusions",
       {"tangential cone inclusions and equalities"},
       {{"instances", 10000}, {"dim", 8}}},
      {"semiparam-pi",
       "Pi matrix, its constants, and the partialled-out inequalities on random splits",
       {"partialled-out lower bound on the derivative", "split derivative lower bound"},
       {{"splits", 100}, {"max_p", 3}, {"max_n", 16}, {"trials", 10000}}},
  };
  return entries;
}

const ExperimentInfo& find_experiment(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  throw ConfigError("unknown experiment '" + name + "'");
}

namespace {

bool compatible(const json& def, const json& v) {
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_number()) return v.is_number();
  if (def.is_string()) return v.is_string();
  if (def.is_array()) {
    if (!v.is_array() || v.empty()) return false;
    for (const auto& x : v)
      if (!compatible(def.front(), x)) return false;
    return true;
  }
  return false;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (key != "experiment" && key != "seed" && key != "out" && key != "params")
      throw ConfigError("unknown key '" + key + "'");
  if (!j.contains("experiment") || !j["experiment"].is_string())
    throw ConfigError("missing key 'experiment'");
  if (!j.contains("seed")) throw ConfigError("missing key 'seed'");
  if (!j["seed"].is_number_unsigned()) throw ConfigError("key 'seed' must be a nonnegative integer");

  ExperimentConfig c;
  c.experiment = j["experiment"].get<std::string>();
  const ExperimentInfo& info = find_experiment(c.experiment);
  c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw ConfigError("key 'out' must be a string");
    c.out_dir = j["out"].get<std::string>();
  }
  c.params = info.defaults;
  if (j.contains("params")) {
    const json& p = j["params"];
    if (!p.is_object()) throw ConfigError("key 'params' must be an object");
    for (const auto& [key, value] : p.items()) {
      if (!info.defaults.contains(key))
        throw ConfigError("unknown key 'params." + key + "' for experiment " + c.experiment);
      if (!compatible(info.defaults[key], value))
        throw ConfigError("key 'params." + key + "' has the wrong type");
      c.params[key] = value;
    }
  }
  for (const auto& [key, value] : c.params.items()) {
    if (value.is_number_integer() && value.get<long long>() < 1)
      throw ConfigError("key 'params." + key + "' must be a positive integer");
    if ((ends_with(key, "tol") || key == "step") && !(value.get<double>() > 0.0))
      throw ConfigError("key 'params." + key + "' must be positive");
  }
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json config_echo(const ExperimentConfig& c) {
  json j = {{"experiment", c.experiment}, {"seed", c.seed}, {"params", c.params}};
  if (!c.out_dir.empty()) j["out"] = c.out_dir;
  return j;
}

std::string config_hash(const ExperimentConfig& c) {
  json j = config_echo(c);
  j.erase("out");
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace locid::cli
