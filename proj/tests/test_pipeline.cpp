#include <doctest.h>

#include <algorithm>

#include "btrec/oracle.hpp"
#include "btrec/pipeline.hpp"
#include "btrec/report.hpp"
#include "btrec/sim.hpp"

using namespace btrec;

namespace {

RunReport run_file(const std::string& file, Mode mode) {
  Scenario s = load_scenario(std::string(BTREC_SCENARIO_DIR) + "/" + file);
  OracleReasoner oracle;
  RunOptions opts;
  opts.mode = mode;
  return run_task(s, oracle, opts);
}

RunReport run_text(const std::string& text, Mode mode) {
  Scenario s = parse_scenario(text, "inline");
  OracleReasoner oracle;
  RunOptions opts;
  opts.mode = mode;
  return run_task(s, oracle, opts);
}

int tally(const RunReport& r) {
  int sum = 0;
  for (auto& [kind, stats] : r.checks) sum += stats.queries;
  return sum;
}

bool has_verdict(const RunReport& r, CheckKind kind, Correction::Type corr) {
  return std::any_of(r.verdicts.begin(), r.verdicts.end(), [&](const VerdictRecord& v) {
    return v.verdict.kind == kind && v.verdict.detected && v.verdict.correction &&
           v.verdict.correction->type == corr;
  });
}

int count_outcome(const RunReport& r, const std::string& skill, const std::string& outcome) {
  int n = 0;
  for (const HistoryRecord& h : r.history)
    if (h.type == HistoryRecord::Type::Skill && h.skill.name == skill && h.outcome == outcome)
      ++n;
  return n;
}

}  // namespace

TEST_CASE("clean run queries once up front then only verifies effects") {
  RunReport r = run_file("nominal_peg.scen", Mode::Combined);
  CHECK(r.task_success);
  CHECK(r.skills_executed == 2);
  CHECK(r.expansions == 2);
  CHECK(r.unrecovered.empty());
  CHECK(r.reasoner_queries == 3);
  CHECK(r.checks.at("pre_execution").queries == 1);
  CHECK(r.checks.at("pre_execution").detected == 0);
  CHECK(r.checks.at("postcondition_verify").queries == 2);
  CHECK(r.checks.count("precondition_verify") == 0);
  CHECK(tally(r) == r.reasoner_queries);
  for (const VerdictRecord& v : r.verdicts) CHECK_FALSE(v.verdict.detected);
}

TEST_CASE("a disturbed gripper is caught before execution and the step skipped") {
  RunReport r = run_file("fig2b.scen", Mode::Reactive);
  CHECK(r.task_success);
  CHECK(has_verdict(r, CheckKind::PreconditionVerify, Correction::Type::MarkUnsatisfied));

  auto mark = std::find_if(r.corrections.begin(), r.corrections.end(), [](const auto& c) {
    return c.correction.type == Correction::Type::MarkUnsatisfied;
  });
  REQUIRE(mark != r.corrections.end());
  CHECK(mark->applied);
  REQUIRE_FALSE(mark->correction.unsatisfied.empty());
  CHECK(mark->correction.unsatisfied[0].to_string() == "hand_empty");

  CHECK(count_outcome(r, "grasp", "skipped") == 1);
  bool disturbance = std::any_of(r.history.begin(), r.history.end(), [](const HistoryRecord& h) {
    return h.type == HistoryRecord::Type::Disturbance && !h.diff.empty();
  });
  CHECK(disturbance);
  CHECK(tally(r) == r.reasoner_queries);
}

TEST_CASE("a placement that lands wrong is flagged by the effect check and retried") {
  RunReport r = run_file("fig2c.scen", Mode::Combined);
  CHECK(r.task_success);
  CHECK(has_verdict(r, CheckKind::PostconditionVerify, Correction::Type::ReportSkillFailure));
  CHECK(count_outcome(r, "place_inside", "degraded") == 1);
  CHECK(count_outcome(r, "place_inside", "success") == 1);
  bool flagged = std::any_of(r.history.begin(), r.history.end(), [](const HistoryRecord& h) {
    return h.skill.name == "place_inside" && h.postcheck == "detected";
  });
  CHECK(flagged);
}

TEST_CASE("a disturbance after a skill re-arms screening and earns a new guard") {
  RunReport r = run_file("fig4a.scen", Mode::Combined);
  CHECK(r.task_success);
  CHECK(has_verdict(r, CheckKind::PreconditionSuggest, Correction::Type::AddPrecondition));
  auto guard = std::find_if(r.corrections.begin(), r.corrections.end(), [](const auto& c) {
    return c.correction.type == Correction::Type::AddPrecondition;
  });
  REQUIRE(guard != r.corrections.end());
  CHECK(guard->applied);
  CHECK(guard->correction.skill == "place_inside");
  CHECK(guard->correction.precondition.to_string() == "~occupied(green_hole)");
}

TEST_CASE("three straight effect failures of one grounded skill abort the run") {
  const char* text = R"(
scenario stuck_placement
task seat the peg
tags runtime
objects:
  table zone grey reachable
  blue_peg peg blue pickable reachable
  green_hole hole green container reachable
relations:
  on(blue_peg, table)
goals:
  inside(blue_peg, green_hole)
faults:
  pre-execution override place_inside land-on-top
  pre-execution override place_inside land-on-top
  pre-execution override place_inside land-on-top
)";
  RunReport r = run_text(text, Mode::Reactive);
  CHECK_FALSE(r.task_success);
  CHECK(count_outcome(r, "place_inside", "degraded") == 3);
  CHECK(r.checks.at("postcondition_verify").detected == 3);
  REQUIRE_FALSE(r.unrecovered.empty());
  CHECK(r.unrecovered.back().find("3 times in a row") != std::string::npos);
}

TEST_CASE("a goal nothing achieves ends the run with an honest note") {
  const char* text = R"(
scenario heavy_lift
task pick up the anvil
tags runtime
objects:
  table zone grey reachable
  anvil cube black reachable
relations:
  on(anvil, table)
goals:
  held(anvil)
)";
  RunReport r = run_text(text, Mode::Reactive);
  CHECK_FALSE(r.task_success);
  CHECK(r.checks.at("skill_suggest").queries == 1);
  CHECK(r.checks.at("skill_suggest").detected == 0);
  REQUIRE_FALSE(r.unrecovered.empty());
  CHECK(r.unrecovered.back() == "no skill achieves held(anvil)");
}

TEST_CASE("open-loop playback carries on degraded and ends unsuccessful") {
  RunReport r = run_file("fig4c.scen", Mode::Pre);
  CHECK_FALSE(r.task_success);
  CHECK(count_outcome(r, "place_inside", "degraded") == 1);
  CHECK(r.checks.at("pre_execution").queries >= 1);
  // The screening saw nothing wrong: the clutter only appears mid-run.
  CHECK(r.checks.at("pre_execution").detected == 0);
}

TEST_CASE("query tallies are consistent across modes") {
  for (const char* file : {"nominal_sort.scen", "drawer_blocked.scen", "sort_intervene.scen"}) {
    for (Mode m : {Mode::Pre, Mode::Reactive, Mode::Combined}) {
      RunReport r = run_file(file, m);
      CHECK(tally(r) == r.reasoner_queries);
      CHECK(static_cast<int>(r.verdicts.size()) == r.reasoner_queries);
    }
  }
  RunReport sort = run_file("nominal_sort.scen", Mode::Combined);
  CHECK(sort.task_success);
  CHECK(sort.reasoner_queries == 5);
  CHECK(sort.skills_executed == 4);
}

TEST_CASE("histories replay the final scene exactly") {
  for (const char* file : {"nominal_peg.scen", "fig2b.scen", "fig2c.scen", "drawer_disturb.scen"}) {
    RunReport r = run_file(file, Mode::Combined);
    std::string detail;
    CHECK_MESSAGE(replay_matches(r, &detail), file, ": ", detail);
  }
  RunReport pre = run_file("fig4b.scen", Mode::Pre);
  std::string detail;
  CHECK_MESSAGE(replay_matches(pre, &detail), "fig4b pre: ", detail);
}
