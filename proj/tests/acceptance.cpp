// Acceptance gate: one PASS/FAIL line per criterion, exit 0 iff all pass.
#include "qpos/core.hpp"
#include "qpos/suite.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

namespace {

using qpos::cli::CheckResult;

struct Criterion {
  const char* label;
  const char* tolerance;
  std::vector<std::string> checks;
};

const std::vector<Criterion> kCriteria = {
    {"conjugate_bounds_battery", "tol 1e-8; 50 sets, dims 2-8, 200 probes each",
     {"fitzpatrick.conjugate_bounds"}},
    {"conjugate_domain_is_hull", "exact agreement", {"fitzpatrick.conjugate_domain"}},
    {"inclusion_chain", "zero inversions", {"fitzpatrick.inclusion_chain"}},
    {"pi_iff_phi_below_q", "10^4 probes; tie band 1e-8", {"fitzpatrick.pi_phi_equivalence"}},
    {"third_polar_nets", "20 instances, pitch 0.1", {"maximality.third_polar_nets"}},
    {"extension_continuum", "101 lambdas; identity 1e-12", {"maximality.extension_continuum"}},
    {"premaximality_trichotomy", "pitch 0.05 on [-3,3]^2 for the identity",
     {"maximality.premax_trichotomy"}},
    {"ni_iff_swapped_condition", "20 sets, pitch 0.1", {"maximality.ni_equivalence"}},
    {"minimal_convex_properties", "10^4 draws; 10^3 envelope probes; convmin tol 1e-6",
     {"minimal.fundamental_inequality", "minimal.envelope_sandwich", "minimal.convmin_identity"}},
    {"ssdb_isometry_and_decomposition", "residuals < 1e-10; 10^3 points",
     {"ssdb.isometry", "ssdb.decomposition", "ssdb.pq_sum"}},
    {"lipschitz_graphs", "10^3 graphs; closed form 1e-10; 21 diagonal points",
     {"lipschitz.graph_equivalence", "lipschitz.phi_graph_closed_form", "lipschitz.identity_example"}},
    {"hilbert_closed_sets", "closed form 1e-10; values 1e-6; 41x41 cross at margin 1e-3",
     {"hilbert.closed_formula", "hilbert.two_point_values", "hilbert.axis_cross",
      "hilbert.line_corollary"}},
};

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = 42;
  const qpos::cli::SuiteReport all = qpos::cli::run_suite("all", seed);
  std::map<std::string, const CheckResult*> by_name;
  for (const CheckResult& c : all.checks) by_name[c.suite + "." + c.name] = &c;

  int failed = 0;
  for (const Criterion& cr : kCriteria) {
    bool ok = true;
    std::string why;
    for (const std::string& id : cr.checks) {
      const auto it = by_name.find(id);
      if (it == by_name.end()) {
        ok = false;
        why = id + " missing";
      } else if (!it->second->passed) {
        ok = false;
        if (why.empty()) why = id + ": " + it->second->detail;
      }
    }
    failed += !ok;
    std::printf("%s %-34s (%s)%s%s\n", ok ? "PASS" : "FAIL", cr.label, cr.tolerance,
                why.empty() ? "" : " ", why.c_str());
  }

  // Mutation sentinel: the batteries must notice a sign flip in q.
  qpos::testing::set_q_sign_flip(true);
  const qpos::cli::SuiteReport mutated = qpos::cli::run_suite("all", seed);
  const qpos::cli::SuiteReport core = qpos::cli::run_suite("core", seed);
  qpos::testing::set_q_sign_flip(false);
  const int caught = mutated.failed();
  const bool sentinel = caught >= 5 && core.failed() > 0;
  failed += !sentinel;
  std::printf("%s %-34s (>= 5 distinct failures) %d of %zu checks failed, core suite %d failed\n",
              sentinel ? "PASS" : "FAIL", "mutation_sentinel", caught, mutated.checks.size(),
              core.failed());

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d of %zu criteria failed, %.1f s\n", failed, kCriteria.size() + 1, secs);
  return failed == 0 ? 0 : 1;
}
