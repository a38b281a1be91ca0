#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "btrec/pipeline.hpp"
#include "btrec/scene.hpp"
#include "btrec/sim.hpp"
#include "btrec/verdict.hpp"

namespace btrec {

using json = nlohmann::json;

json scene_to_json(const SceneGraph& scene);
SceneGraph scene_from_json(const json& j);

json diff_to_json(const SceneDiff& diff);
SceneDiff diff_from_json(const json& j);

json identification_to_json(const Identification& id);
Identification identification_from_json(const json& j);

json correction_to_json(const Correction& c);
Correction correction_from_json(const json& j);

// The detected/identification/correction triple without the check kind: the
// shape a reasoner answer travels in.
json verdict_payload_to_json(const Verdict& v);

json report_to_json(const RunReport& report);

// For byte-comparison across runs: timestamps zeroed, and optionally the
// reasoner label replaced so oracle and fixture runs can be compared.
json normalized_report_json(const RunReport& report, bool mask_reasoner = false);

// Applies every history record's diff to the initial scene, in order, and
// compares the result against the final scene via canonical serialization.
bool replay_matches(const RunReport& report, std::string* detail = nullptr);
bool replay_matches_json(const json& report_json, std::string* detail = nullptr);

struct SuiteOptions {
  std::vector<std::string> scenario_paths;
  std::vector<Mode> modes;
  int reps = 10;
  RunOptions run;  // mode field is overridden per suite mode
};

struct SuiteCase {
  std::string scenario;
  std::string mode;
  bool nominal = false;
  bool pre_detectable = false;
  std::string requires_skill;  // empty unless the case needs a latent skill
  bool expected_success = false;
  bool reps_consistent = true;  // normalized reports byte-equal across reps
  RunReport report;             // first rep
};

struct ModeAggregates {
  std::string mode;
  int cases = 0;  // non-nominal
  double task_success_rate = 0.0;
  double failure_detection_rate = 0.0;
  double failure_identification_rate = 0.0;  // over cases with a detection
  double correction_success_rate = 0.0;      // over cases with a detection
  double skill_suggestion_accuracy = 0.0;    // over cases needing a latent skill
  double mean_queries = 0.0;
  double mean_ticks = 0.0;
  int nominal_cases = 0;
  int nominal_false_positives = 0;  // nominal runs with any detection
};

struct SuiteReport {
  std::vector<SuiteCase> cases;
  std::vector<ModeAggregates> aggregates;
  bool reps_all_consistent = true;
  bool expected_successes_met = true;
};

// Counts a run as detected/identified/corrected from its verdict log.
bool any_detection(const RunReport& report);
bool any_identification(const RunReport& report);
bool suggested_required_skill(const RunReport& report, const std::string& skill);

SuiteReport run_suite(const SuiteOptions& opts, Reasoner& reasoner);
json suite_to_json(const SuiteReport& suite);

// Scenario files (*.scen) under dir, sorted by filename.
std::vector<std::string> list_scenarios(const std::string& dir);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace btrec
