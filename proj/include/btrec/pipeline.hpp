#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "btrec/bt.hpp"
#include "btrec/scene.hpp"
#include "btrec/sim.hpp"
#include "btrec/skill.hpp"
#include "btrec/verdict.hpp"

namespace btrec {

enum class Mode { Pre, Reactive, Combined };
std::string to_string(Mode m);
std::optional<Mode> mode_from(const std::string& s);

struct CheckStats {
  int queries = 0;
  int detected = 0;
  int identified = 0;
  int corrected = 0;
};

struct CorrectionRecord {
  int tick = 0;              // 0 during pre-execution screening
  std::string phase;         // pre_execution | runtime
  CheckKind kind = CheckKind::PreExecution;
  Correction correction;
  bool applied = false;
  std::string note;
};

struct VerdictRecord {
  int tick = 0;
  std::string phase;
  Verdict verdict;
};

// One replayable step: applying every record's diff to the initial scene in
// order reconstructs the final scene exactly.
struct HistoryRecord {
  enum class Type { Skill, Disturbance };
  Type type = Type::Skill;
  int tick = 0;
  std::uint64_t timestamp_ns = 0;
  int activation = 0;        // execution ordinal being attempted
  GroundSkill skill;
  std::string outcome;       // success | degraded | failure | skipped
  std::string precheck = "not_run";   // not_run | clean | detected
  std::string postcheck = "not_run";
  std::string note;
  SceneDiff diff;
};

struct RunReport {
  int schema_version = 1;
  std::string scenario;
  std::string task;
  std::string mode;
  std::string reasoner;
  bool task_success = false;
  int ticks = 0;
  int skills_executed = 0;
  int expansions = 0;
  int reasoner_queries = 0;
  std::map<std::string, CheckStats> checks;  // keyed by check kind
  std::vector<CorrectionRecord> corrections;
  std::vector<VerdictRecord> verdicts;       // every query, in order
  std::vector<std::string> unrecovered;
  SceneGraph initial_scene;                  // before any scheduled fault
  SceneGraph final_scene;
  std::string final_tree;
  std::vector<HistoryRecord> history;
};

struct RunOptions {
  Mode mode = Mode::Combined;
  int max_ticks = 200;
  int max_expansions = 25;
  int history_window = 5;
  int pre_check_rounds = 3;
  int postcheck_failure_abort = 3;
};

RunReport run_task(const Scenario& scenario, Reasoner& reasoner, const RunOptions& opts);

}  // namespace btrec
