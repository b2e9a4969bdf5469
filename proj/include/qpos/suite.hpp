#ifndef QPOS_SUITE_HPP
#define QPOS_SUITE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qpos::cli {

// One property check of a suite. Exceptions thrown by the library count as failures.
struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  long evaluations = 0;  // individual comparisons made
  std::string detail;    // first counterexample or summary numbers
  double wall_ms = 0.0;
};

struct SuiteReport {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  int passed() const;
  int failed() const;
};

// {core, fitzpatrick, affine, maximality, minimal, ssdb, lipschitz, hilbert, all}
std::vector<std::string> suite_names();
bool is_known_suite(const std::string& name);

// Deterministic in (name, seed). Throws ScenarioError for an unknown name.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

// Prints one PASS/FAIL line per check and a summary; returns 0, 1 (a failure) or 2
// (unknown suite).
int run_suite_cli(const std::string& name, std::uint64_t seed, std::ostream& out,
                  std::ostream& err);

}  // namespace qpos::cli

#endif  // QPOS_SUITE_HPP
