#include "doctest.h"
#include "qpos/core.hpp"
#include "qpos/scenario.hpp"
#include "qpos/suite.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace qpos;
using namespace qpos::cli;

namespace {

const std::filesystem::path kScenarios = QPOS_SCENARIOS;

Json load(const std::string& name) {
  std::ifstream f(kScenarios / name);
  return Json::parse(f);
}

Json minimal_scenario(Json queries) {
  return Json{{"schema_version", 1},
              {"space", {{"kind", "monotone"}, {"k", 1}}},
              {"sets", {{"seg", {{"type", "points"}, {"points", {{0, 0}, {1, 1}}}}}}},
              {"queries", std::move(queries)}};
}

RunOptions quiet() {
  RunOptions o;
  o.timing = false;
  return o;
}

}  // namespace

TEST_CASE("number encoding") {
  CHECK(number_to_json(kInf) == "+inf");
  CHECK(number_to_json(-kInf) == "-inf");
  CHECK(number_to_json(std::nan("")).is_null());
  CHECK(number_to_json(1.5) == 1.5);
  CHECK(number_from_json("+inf", "x") == kInf);
  CHECK(number_from_json("-inf", "x") == -kInf);
  CHECK(number_from_json(Json(2), "x") == 2.0);
  CHECK_THROWS_AS(number_from_json("abc", "x"), ScenarioError);
  CHECK_THROWS_AS(number_from_json(Json::array(), "x"), ScenarioError);
}

TEST_CASE("example scenarios meet their expectations") {
  for (const char* name : {"two_point.json", "models.json"}) {
    CAPTURE(name);
    const Json report = run_scenario(load(name), quiet(), kScenarios);
    CHECK(validate_report(report).empty());
    CHECK(report["summary"]["mismatches"] == 0);
    CHECK(report["summary"]["expectations"] == report["summary"]["total"]);
    CHECK(report_exit_code(report) == 0);
  }
}

TEST_CASE("a failed expectation sets exit code 1") {
  const Json report = run_scenario(load("mismatch.json"), quiet(), kScenarios);
  CHECK(report["queries"][0]["status"] == "FAILS");
  CHECK(report["queries"][0]["matched"] == false);
  CHECK(report["queries"][0]["witness"].size() == 2);
  CHECK(report_exit_code(report) == 1);
}

TEST_CASE("schema and argument problems raise ScenarioError") {
  CHECK_THROWS_AS(run_scenario(load("unknown_op.json"), quiet()), ScenarioError);
  CHECK_THROWS_AS(run_scenario(Json::array(), quiet()), ScenarioError);
  CHECK_THROWS_AS(run_scenario(Json{{"schema_version", 99}}, quiet()), ScenarioError);
  CHECK_THROWS_AS(run_scenario(Json{{"space", {{"kind", "banach"}}}}, quiet()), ScenarioError);
  CHECK_THROWS_AS(run_scenario(minimal_scenario({{{"op", "pi_member"}, {"args", {{"set", "nope"}, {"b", {0, 0}}}}}}),
                               quiet()),
                  ScenarioError);
  CHECK_THROWS_AS(run_scenario(minimal_scenario({{{"op", "pi_member"}, {"args", {{"set", "seg"}, {"b", {0, "x"}}}}}}),
                               quiet()),
                  ScenarioError);
  CHECK_THROWS_AS(run_scenario(minimal_scenario({{{"op", "pi_member"}, {"args", {{"set", "seg"}}}}}), quiet()),
                  ScenarioError);
  // Wrong dimension is an argument error of the library.
  CHECK_THROWS_AS(run_scenario(minimal_scenario({{{"op", "pi_member"}, {"args", {{"set", "seg"}, {"b", {0, 0, 0}}}}}}),
                               quiet()),
                  ScenarioError);
  // Graph sets need a Lipschitz space.
  Json s = minimal_scenario(Json::array());
  s["sets"]["g"] = {{"type", "graph"}, {"domain", {{0}}}, {"values", {{0}}}};
  CHECK_THROWS_AS(run_scenario(s, quiet()), ScenarioError);
}

TEST_CASE("precondition failures are recorded per query") {
  Json anti = {{"type", "points"}, {"points", {{0, 1}, {1, 0}}}};
  Json queries = Json::array();
  queries.push_back({{"op", "check_ineq_on_hull"}, {"args", {{"set", anti}}}});
  queries.push_back({{"op", "q_value"}, {"args", {{"b", {2, 3}}}}, {"expect", {{"value", 6}}}});
  const Json report = run_scenario(minimal_scenario(queries), quiet());
  CHECK(report["queries"][0]["status"] == "ERROR");
  CHECK(report["queries"][0]["error"]["kind"] == "precondition");
  CHECK(report["queries"][1]["matched"] == true);
  CHECK(report["summary"]["errors"] == 1);
  CHECK(report_exit_code(report) == 0);
  CHECK(validate_report(report).empty());
}

TEST_CASE("reports are independent of the thread count") {
  const Json scenario = load("two_point.json");
  RunOptions one = quiet(), many = quiet();
  many.threads = 4;
  CHECK(run_scenario(scenario, one, kScenarios).dump() == run_scenario(scenario, many, kScenarios).dump());
}

TEST_CASE("tolerance and pitch overrides") {
  const double before = tolerance();
  RunOptions o = quiet();
  o.tolerance = 1e-6;
  o.grid_pitch = 0.2;
  const Json report = run_scenario(
      minimal_scenario({{{"op", "premax_certify"}, {"args", {{"set", "seg"}, {"grid", {{"pitch", 0.05}}}}}}}), o);
  CHECK(report["tolerance"] == 1e-6);
  CHECK(report["queries"][0]["resolution"] == 0.2);
  CHECK(report["queries"][0]["details"]["box"]["pitch"] == 0.2);
  CHECK(tolerance() == before);
  o.tolerance = -1.0;
  CHECK_THROWS_AS(run_scenario(minimal_scenario(Json::array()), o), ScenarioError);
}

TEST_CASE("validate_report flags schema violations") {
  Json report = run_scenario(minimal_scenario({{{"op", "q_value"}, {"args", {{"b", {1, 1}}}}}}), quiet());
  REQUIRE(validate_report(report).empty());
  Json bad = report;
  bad["queries"][0]["status"] = "MAYBE";
  CHECK_FALSE(validate_report(bad).empty());
  bad = report;
  bad.erase("summary");
  CHECK_FALSE(validate_report(bad).empty());
  bad = report;
  bad["queries"][0]["index"] = 5;
  CHECK_FALSE(validate_report(bad).empty());
  bad = report;
  bad["schema_version"] = 2;
  CHECK_FALSE(validate_report(bad).empty());
  CHECK_FALSE(validate_report(Json::array()).empty());
}

TEST_CASE("eval_query defaults to the monotone plane") {
  const Json r = eval_query("q_value", {{"b", {2, 3}}}, quiet());
  CHECK(r["queries"][0]["value"] == 6.0);
  const Json h = eval_query("pairing", {{"space", {{"kind", "hilbert"}, {"k", 2}}}, {"b", {1, 2}}, {"c", {3, 4}}},
                            quiet());
  CHECK(h["queries"][0]["value"] == 11.0);
  CHECK_THROWS_AS(eval_query("nope", Json::object(), quiet()), ScenarioError);
  CHECK_THROWS_AS(eval_query("q_value", Json::array(), quiet()), ScenarioError);
}

TEST_CASE("every operation is listed") {
  const auto ops = known_operations();
  for (const char* op : {"pairing", "q_value", "is_q_positive", "pi_member", "conv_w_hull_member", "phi_eval",
                         "conj_eval", "repr_hull_member", "q_subdiff_check", "g_phi_member", "check_ineq_on_hull",
                         "lp_min", "psd_on_subspace", "min_q_over_affine", "affine_is_maximal", "premax_certify",
                         "third_polar_check", "extension_continuum", "ni_type_check", "fund_ineq_check",
                         "envelope_eval", "minimal_selfconj_probe", "convmin_check", "pq_g0_member",
                         "decompose_sum", "maximality_via_decomposition", "lipschitz_check", "phi_graph_eval",
                         "mcshane_extend", "identity_example_check", "closed_domain_repr_probe",
                         "phi_conj_closed_eval", "g_phi_member", "closed_repr_check", "midpoint_ball_check",
                         "line_corollary_check"})
    CHECK_MESSAGE(std::find(ops.begin(), ops.end(), op) != ops.end(), op);
}

TEST_CASE("assorted operations through the scenario layer") {
  const Json report = run_scenario(
      minimal_scenario({
          {{"op", "lp_min"}, {"args", {{"costs", {1, 2}}, {"columns", {{0}, {1}}}, {"target", {0.5}}}}},
          {{"op", "lp_min"}, {"args", {{"costs", {1, 2}}, {"columns", {{0}, {1}}}, {"target", {2}}}}},
          {{"op", "min_q_over_affine"}, {"args", {{"r", {1, 2}}, {"V", {{1, 0}}}}}},
          {{"op", "psd_on_subspace"}, {"args", {{"V", {{1, 1}}}}}},
          {{"op", "third_polar_check"}, {"args", {{"set", "seg"}, {"grid", {{"pitch", 0.25}}}}}},
          {{"op", "ni_type_check"}, {"args", {{"set", "seg"}}}},
          {{"op", "fund_ineq_check"}, {"args", {{"set", "seg"}, {"x", {0, 1}}, {"y", {1, 1}}, {"alpha", 0.5}}}},
          {{"op", "pq_g0_member"}, {"args", {{"b", {2, 2}}}}},
          {{"op", "pq_g0_member"}, {"args", {{"b", {2, -2}}, {"sign", "-"}}}},
          {{"op", "maximality_via_decomposition"}, {"args", {{"set", "seg"}, {"p", {0.5, 0.5}}}}},
      }),
      quiet());
  const Json& q = report["queries"];
  CHECK(q[0]["status"] == "HOLDS");
  CHECK(q[0]["value"] == 1.5);
  CHECK(q[1]["status"] == "FAILS");
  CHECK(q[1]["note"] == "INFEASIBLE");
  // q(1 − t, 2) = 2(1 − t) is unbounded below in t.
  CHECK(q[2]["value"] == "-inf");
  CHECK(q[3]["status"] == "HOLDS");
  CHECK(q[4]["status"] == "HOLDS");
  CHECK(q[6]["status"] == "HOLDS");
  CHECK(q[7]["status"] == "HOLDS");
  CHECK(q[8]["status"] == "HOLDS");
  for (const Json& r : q) CHECK(r["status"] != "ERROR");
  CHECK(validate_report(report).empty());
}

TEST_CASE("QPOS_THREADS caps the worker count") {
  ::setenv("QPOS_THREADS", "1", 1);
  CHECK(threads_from_env() == 1);
  ::setenv("QPOS_THREADS", "junk", 1);
  CHECK(threads_from_env() >= 1);
  ::unsetenv("QPOS_THREADS");
}

TEST_CASE("suite runner") {
  CHECK(is_known_suite("all"));
  CHECK_FALSE(is_known_suite("everything"));
  CHECK_THROWS_AS(run_suite("everything", 1), ScenarioError);
  std::ostringstream out, err;
  CHECK(run_suite_cli("everything", 1, out, err) == 2);

  int passes = -1;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SuiteReport r = run_suite("hilbert", seed);
    CHECK(r.failed() == 0);
    if (passes < 0) passes = r.passed();
    CHECK(r.passed() == passes);
  }

  std::ostringstream core_out;
  CHECK(run_suite_cli("core", 42, core_out, err) == 0);
  CHECK(core_out.str().find("FAIL") == std::string::npos);

  testing::set_q_sign_flip(true);
  std::ostringstream flipped;
  const int code = run_suite_cli("core", 42, flipped, err);
  testing::set_q_sign_flip(false);
  CHECK(code == 1);
  CHECK(flipped.str().find("FAIL core.quadratic_form_oracle") != std::string::npos);
}
