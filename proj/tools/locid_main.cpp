#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "locid/cli/config.hpp"
#include "locid/cli/report.hpp"
#include "locid/error.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 3;

int list_experiments(const std::string& format) {
  const auto& cat = locid::cli::catalog();
  if (format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : cat)
      j.push_back({{"name", e.name}, {"description", e.description}, {"exercises", e.exercises}});
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  for (const auto& e : cat) {
    std::cout << e.name << "\t" << e.description << "\n";
    for (const auto& x : e.exercises) std::cout << "\t  exercises: " << x << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local identification experiments"};
  app.require_subcommand(1);

  std::string list_format = "text";
  auto* list = app.add_subcommand("list", "List the available experiments");
  list->add_option("--format", list_format, "Output format")->check(CLI::IsMember({"text", "json"}));

  std::string config_path, out_dir, format = "json";
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_option("--out", out_dir, "Directory for the report and tables");
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  if (list->parsed()) return list_experiments(list_format);

  locid::cli::ExperimentConfig config;
  try {
    config = locid::cli::load_config(config_path);
  } catch (const locid::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  }
  if (seed) config.seed = *seed;
  if (!out_dir.empty()) config.out_dir = out_dir;

  try {
    const locid::cli::RunReport report = locid::cli::run(config);
    if (config.out_dir.empty()) {
      if (format == "csv") locid::cli::write_checks_csv(std::cout, report);
      else std::cout << locid::cli::report_json(report).dump(2) << '\n';
    } else {
      locid::cli::write_outputs(report, config.out_dir, format);
    }
    for (const auto& c : report.result.checks)
      std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    return report.passed() ? 0 : 1;
  } catch (const locid::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
