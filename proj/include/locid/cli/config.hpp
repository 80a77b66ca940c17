#pragma once

// Experiment configs: a JSON object with "experiment", "seed", optional
// "out" and a "params" object whose keys must be known to the experiment.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace locid::cli {

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::vector<std::string> exercises;  // results from the identification theory it checks
  nlohmann::json defaults;             // every accepted parameter with its default
};

// Stable order.
const std::vector<ExperimentInfo>& catalog();
// Throws ConfigError for unknown names.
const ExperimentInfo& find_experiment(const std::string& name);

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string out_dir;
  nlohmann::json params;  // defaults merged with the user's values
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

nlohmann::json config_echo(const ExperimentConfig& config);
// FNV-1a 64-bit hash of the canonical config echo, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace locid::cli
