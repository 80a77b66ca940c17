#include "locid/cli/report.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "locid/error.hpp"

namespace locid::cli {

using nlohmann::json;

bool RunReport::passed() const {
  if (result.checks.empty()) return false;
  for (const auto& c : result.checks)
    if (!c.passed) return false;
  return true;
}

RunReport run(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep{config, run_experiment(config), 0.0};
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

json report_json(const RunReport& report) {
  json checks = json::array();
  std::size_t failed = 0;
  for (const auto& c : report.result.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    failed += !c.passed;
  }
  json tables = json::array();
  for (const auto& t : report.result.tables) tables.push_back(t.name + ".csv");
  return {{"experiment", report.config.experiment},
          {"config", config_echo(report.config)},
          {"config_hash", config_hash(report.config)},
          {"metrics", report.result.metrics},
          {"checks", checks},
          {"tables", tables},
          {"summary", {{"pass", report.passed()}, {"checks", checks.size()}, {"failed", failed}}},
          {"wall_time_s", report.wall_time_s}};
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

void write_checks_csv(std::ostream& os, const RunReport& report) {
  os << "check,passed,detail\n";
  for (const auto& c : report.result.checks)
    os << csv_field(c.name) << ',' << (c.passed ? "true" : "false") << ',' << csv_field(c.detail) << '\n';
}

void write_table_csv(std::ostream& os, const Table& table) {
  for (std::size_t j = 0; j < table.header.size(); ++j) os << (j ? "," : "") << table.header[j];
  os << '\n';
  char buf[32];
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", row[j]);
      os << (j ? "," : "") << buf;
    }
    os << '\n';
  }
}

void write_outputs(const RunReport& report, const std::string& dir, const std::string& format) {
  namespace fs = std::filesystem;
  if (format != "json" && format != "csv") throw ConfigError("unknown output format '" + format + "'");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  const fs::path base(dir);
  auto open = [](const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
  };
  if (format == "csv") {
    auto out = open(base / "report.csv");
    write_checks_csv(out, report);
  } else {
    auto out = open(base / "report.json");
    out << report_json(report).dump(2) << '\n';
  }
  for (const auto& t : report.result.tables) {
    auto out = open(base / (t.name + ".csv"));
    write_table_csv(out, t);
  }
}

}  // namespace locid::cli
