#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "locid/cli/config.hpp"
#include "locid/cli/experiments.hpp"

namespace locid::cli {

struct RunReport {
  ExperimentConfig config;
  ExperimentResult result;
  double wall_time_s = 0.0;

  bool passed() const;
};

RunReport run(const ExperimentConfig& config);

nlohmann::json report_json(const RunReport& report);
// One row per check: check,passed,detail.
void write_checks_csv(std::ostream& os, const RunReport& report);
void write_table_csv(std::ostream& os, const Table& table);
// Writes report.json or report.csv plus <table>.csv files into dir.
void write_outputs(const RunReport& report, const std::string& dir, const std::string& format);

}  // namespace locid::cli
