#ifndef QPOS_SCENARIO_HPP
#define QPOS_SCENARIO_HPP

#include "qpos/common.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qpos::cli {

using Json = nlohmann::json;

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolName = "qpos";
inline constexpr const char* kToolVersion = "1.0.0";

// Malformed scenario, unknown operation or set, bad argument (exit code 2).
class ScenarioError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

struct RunOptions {
  std::optional<double> tolerance;   // overrides the scenario tolerance
  std::optional<double> grid_pitch;  // overrides every grid pitch
  unsigned threads = 1;
  bool timing = true;                // false records wall_ms = 0
};

// Scenario object → report object. Throws ScenarioError on schema or argument
// problems; precondition errors of single queries are recorded as ERROR entries.
// Relative CSV paths resolve against `base_dir`.
Json run_scenario(const Json& scenario, const RunOptions& options,
                  const std::filesystem::path& base_dir = {});

// Reads, runs and writes. Returns the process exit code (0, 1 or 2) and prints
// diagnostics on `err`.
int run_scenario_file(const std::filesystem::path& in, const std::filesystem::path& out,
                      const RunOptions& options, std::ostream& err);

// 0 when no query with an expectation mismatched and no internal error occurred.
int report_exit_code(const Json& report);

// Empty when the report conforms to the report schema; otherwise one line per problem.
std::vector<std::string> validate_report(const Json& report);

// One query without a scenario file. `args` may carry "space", "sets" and "grid"
// next to the operation arguments; "set" may be a name or an inline set object.
Json eval_query(const std::string& op, const Json& args, const RunOptions& options);

std::vector<std::string> known_operations();

// Worker count: hardware concurrency capped by QPOS_THREADS (≥ 1).
unsigned threads_from_env();

// ±∞ as "+inf"/"-inf", NaN as null.
Json number_to_json(double v);
double number_from_json(const Json& j, const char* what);

}  // namespace qpos::cli

#endif  // QPOS_SCENARIO_HPP
