#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "locid/cli/config.hpp"

namespace locid::cli {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct ExperimentResult {
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<Check> checks;
  std::vector<Table> tables;
};

// Library errors raised while running become failed checks.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace locid::cli
