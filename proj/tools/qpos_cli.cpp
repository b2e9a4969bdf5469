#include "qpos/scenario.hpp"
#include "qpos/suite.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  using namespace qpos::cli;

  CLI::App app{"Checks for q-positive sets in symmetrically self-dual spaces"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  std::optional<double> tolerance;
  std::optional<double> grid_pitch;
  app.add_option("--tolerance", tolerance, "Override the numerical tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--grid-pitch", grid_pitch, "Override every grid pitch")
      ->check(CLI::PositiveNumber);

  std::string scenario_path, report_path;
  bool no_timing = false;
  auto* run = app.add_subcommand("run", "Run a scenario file and write a JSON report");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("-o,--output", report_path, "Report JSON file")->required();
  run->add_flag("--no-timing", no_timing, "Record wall_ms = 0 (byte-stable reports)");

  std::string suite_name;
  std::uint64_t seed = 42;
  auto* suite = app.add_subcommand("suite", "Run a property suite");
  suite->add_option("name", suite_name, "core, fitzpatrick, affine, maximality, minimal, ssdb, "
                                        "lipschitz, hilbert or all")
      ->required();
  suite->add_option("--seed", seed, "Random seed");

  std::string op, args_text = "{}";
  auto* eval = app.add_subcommand("eval", "Evaluate one operation with inline JSON arguments");
  eval->add_option("op", op, "Operation name")->required();
  eval->add_option("args", args_text, "JSON object of arguments");

  auto* ops = app.add_subcommand("ops", "List the operations accepted by run and eval");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunOptions options;
  options.tolerance = tolerance;
  options.grid_pitch = grid_pitch;
  options.threads = threads_from_env();

  try {
    if (*run) {
      options.timing = !no_timing;
      return run_scenario_file(scenario_path, report_path, options, std::cerr);
    }
    if (*suite) {
      if (tolerance) qpos::set_tolerance(*tolerance);
      return run_suite_cli(suite_name, seed, std::cout, std::cerr);
    }
    if (*eval) {
      Json args;
      try {
        args = Json::parse(args_text);
      } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed JSON arguments: " << e.what() << "\n";
        return 2;
      }
      const Json report = eval_query(op, args, options);
      std::cout << report["queries"][0].dump(2) << "\n";
      return report_exit_code(report);
    }
    if (*ops) {
      for (const std::string& name : known_operations()) std::cout << name << "\n";
      return 0;
    }
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
