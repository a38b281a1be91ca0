#include "btrec/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace btrec {
namespace {

json object_to_json(const SceneObject& o) {
  return json{{"id", o.id},
              {"class", o.object_class},
              {"color", o.color},
              {"pickable", o.pickable},
              {"container", o.container},
              {"reachable", o.reachable}};
}

SceneObject object_from_json(const json& j) {
  SceneObject o;
  o.id = j.at("id").get<std::string>();
  o.object_class = j.at("class").get<std::string>();
  o.color = j.at("color").get<std::string>();
  o.pickable = j.at("pickable").get<bool>();
  o.container = j.at("container").get<bool>();
  o.reachable = j.at("reachable").get<bool>();
  return o;
}

json literals_to_json(const std::vector<Literal>& lits) {
  json arr = json::array();
  for (const auto& l : lits) arr.push_back(l.to_string());
  return arr;
}

std::vector<Literal> literals_from_json(const json& j) {
  std::vector<Literal> out;
  for (const auto& item : j) out.push_back(parse_literal(item.get<std::string>()));
  return out;
}

json binding_to_json(const Binding& b) {
  json obj = json::object();
  for (const auto& [k, v] : b) obj[k] = v;
  return obj;
}

Binding binding_from_json(const json& j) {
  Binding b;
  for (auto it = j.begin(); it != j.end(); ++it) b[it.key()] = it.value().get<std::string>();
  return b;
}

json skill_to_json(const GroundSkill& gs) {
  return json{{"name", gs.name}, {"binding", binding_to_json(gs.binding)}};
}

GroundSkill skill_from_json(const json& j) {
  GroundSkill gs;
  gs.name = j.at("name").get<std::string>();
  gs.binding = binding_from_json(j.at("binding"));
  return gs;
}

json verdict_record_to_json(const VerdictRecord& r) {
  json j{{"tick", r.tick}, {"phase", r.phase}, {"kind", to_string(r.verdict.kind)}};
  j.update(verdict_payload_to_json(r.verdict));
  return j;
}

json correction_record_to_json(const CorrectionRecord& r) {
  return json{{"tick", r.tick},
              {"phase", r.phase},
              {"kind", to_string(r.kind)},
              {"correction", correction_to_json(r.correction)},
              {"applied", r.applied},
              {"note", r.note}};
}

json history_record_to_json(const HistoryRecord& r) {
  return json{{"type", r.type == HistoryRecord::Type::Skill ? "skill" : "disturbance"},
              {"tick", r.tick},
              {"timestamp_ns", r.timestamp_ns},
              {"activation", r.activation},
              {"skill", skill_to_json(r.skill)},
              {"outcome", r.outcome},
              {"precheck", r.precheck},
              {"postcheck", r.postcheck},
              {"note", r.note},
              {"diff", diff_to_json(r.diff)}};
}

}  // namespace

json scene_to_json(const SceneGraph& scene) {
  json objects = json::array();
  for (const auto& [id, obj] : scene.objects()) objects.push_back(object_to_json(obj));
  json relations = json::array();
  for (const auto& rel : scene.relations()) relations.push_back(rel.to_string());
  return json{{"objects", objects}, {"relations", relations}};
}

SceneGraph scene_from_json(const json& j) {
  SceneGraph scene;
  for (const auto& item : j.at("objects")) scene.add_object(object_from_json(item));
  for (const auto& item : j.at("relations"))
    scene.add_relation(parse_literal(item.get<std::string>()));
  return scene;
}

json diff_to_json(const SceneDiff& diff) {
  json added_objects = json::array();
  for (const auto& o : diff.added_objects) added_objects.push_back(object_to_json(o));
  return json{{"from_revision", diff.from_revision},
              {"to_revision", diff.to_revision},
              {"added_objects", added_objects},
              {"removed_objects", diff.removed_objects},
              {"added_relations", literals_to_json(diff.added_relations)},
              {"removed_relations", literals_to_json(diff.removed_relations)}};
}

SceneDiff diff_from_json(const json& j) {
  SceneDiff diff;
  diff.from_revision = j.at("from_revision").get<std::uint64_t>();
  diff.to_revision = j.at("to_revision").get<std::uint64_t>();
  for (const auto& item : j.at("added_objects")) diff.added_objects.push_back(object_from_json(item));
  diff.removed_objects = j.at("removed_objects").get<std::vector<std::string>>();
  diff.added_relations = literals_from_json(j.at("added_relations"));
  diff.removed_relations = literals_from_json(j.at("removed_relations"));
  return diff;
}

json identification_to_json(const Identification& id) {
  return json{{"skill", id.skill}, {"culprit", binding_to_json(id.culprit)}, {"cause", id.cause}};
}

Identification identification_from_json(const json& j) {
  Identification id;
  id.skill = j.at("skill").get<std::string>();
  id.culprit = binding_from_json(j.at("culprit"));
  id.cause = j.at("cause").get<std::string>();
  return id;
}

json correction_to_json(const Correction& c) {
  return json{{"type", to_string(c.type)},
              {"unsatisfied", literals_to_json(c.unsatisfied)},
              {"skill", c.skill},
              {"precondition", c.precondition.predicate.empty() ? "" : c.precondition.to_string()}};
}

Correction correction_from_json(const json& j) {
  Correction c;
  auto type = correction_type_from(j.at("type").get<std::string>());
  if (!type) throw std::runtime_error("unknown correction type: " + j.at("type").dump());
  c.type = *type;
  c.unsatisfied = literals_from_json(j.at("unsatisfied"));
  c.skill = j.at("skill").get<std::string>();
  std::string pre = j.at("precondition").get<std::string>();
  if (!pre.empty()) c.precondition = parse_literal(pre);
  return c;
}

json verdict_payload_to_json(const Verdict& v) {
  json j{{"detected", v.detected}};
  j["identification"] =
      v.identification ? identification_to_json(*v.identification) : json(nullptr);
  j["correction"] = v.correction ? correction_to_json(*v.correction) : json(nullptr);
  return j;
}

json report_to_json(const RunReport& report) {
  json checks = json::object();
  for (const auto& [kind, stats] : report.checks) {
    checks[kind] = json{{"queries", stats.queries},
                        {"detected", stats.detected},
                        {"identified", stats.identified},
                        {"corrected", stats.corrected}};
  }
  json corrections = json::array();
  for (const auto& c : report.corrections) corrections.push_back(correction_record_to_json(c));
  json verdicts = json::array();
  for (const auto& v : report.verdicts) verdicts.push_back(verdict_record_to_json(v));
  json history = json::array();
  for (const auto& h : report.history) history.push_back(history_record_to_json(h));
  return json{{"schema_version", report.schema_version},
              {"scenario", report.scenario},
              {"task", report.task},
              {"mode", report.mode},
              {"reasoner", report.reasoner},
              {"task_success", report.task_success},
              {"ticks", report.ticks},
              {"skills_executed", report.skills_executed},
              {"expansions", report.expansions},
              {"reasoner_queries", report.reasoner_queries},
              {"checks", checks},
              {"corrections", corrections},
              {"verdicts", verdicts},
              {"unrecovered", report.unrecovered},
              {"initial_scene", scene_to_json(report.initial_scene)},
              {"final_scene", scene_to_json(report.final_scene)},
              {"final_tree", report.final_tree},
              {"history", history}};
}

json normalized_report_json(const RunReport& report, bool mask_reasoner) {
  json j = report_to_json(report);
  for (auto& h : j.at("history")) h["timestamp_ns"] = 0;
  if (mask_reasoner) j["reasoner"] = "reasoner";
  return j;
}

bool replay_matches(const RunReport& report, std::string* detail) {
  SceneGraph scene = report.initial_scene;
  for (std::size_t i = 0; i < report.history.size(); ++i) {
    try {
      apply_diff(scene, report.history[i].diff);
    } catch (const std::exception& e) {
      if (detail) {
        std::ostringstream os;
        os << "diff of history record " << i << " failed to apply: " << e.what();
        *detail = os.str();
      }
      return false;
    }
  }
  std::string replayed = serialize_scene(scene);
  std::string recorded = serialize_scene(report.final_scene);
  if (replayed == recorded) return true;
  if (detail) *detail = "replayed scene:\n" + replayed + "recorded final scene:\n" + recorded;
  return false;
}

bool replay_matches_json(const json& report_json, std::string* detail) {
  RunReport partial;
  partial.initial_scene = scene_from_json(report_json.at("initial_scene"));
  partial.final_scene = scene_from_json(report_json.at("final_scene"));
  for (const auto& h : report_json.at("history")) {
    HistoryRecord rec;
    rec.diff = diff_from_json(h.at("diff"));
    partial.history.push_back(std::move(rec));
  }
  return replay_matches(partial, detail);
}

bool any_detection(const RunReport& report) {
  return std::any_of(report.verdicts.begin(), report.verdicts.end(),
                     [](const VerdictRecord& r) { return r.verdict.detected; });
}

bool any_identification(const RunReport& report) {
  return std::any_of(report.verdicts.begin(), report.verdicts.end(), [](const VerdictRecord& r) {
    return r.verdict.detected && r.verdict.identification.has_value();
  });
}

bool suggested_required_skill(const RunReport& report, const std::string& skill) {
  return std::any_of(report.corrections.begin(), report.corrections.end(),
                     [&](const CorrectionRecord& r) {
                       return r.applied && r.correction.type == Correction::Type::AddSkill &&
                              r.correction.skill == skill;
                     });
}

SuiteReport run_suite(const SuiteOptions& opts, Reasoner& reasoner) {
  std::vector<Scenario> scenarios;
  for (const auto& path : opts.scenario_paths) scenarios.push_back(load_scenario(path));
  std::sort(scenarios.begin(), scenarios.end(),
            [](const Scenario& a, const Scenario& b) { return a.name < b.name; });

  SuiteReport suite;
  for (Mode mode : opts.modes) {
    ModeAggregates agg;
    agg.mode = to_string(mode);
    int successes = 0;
    int detected_cases = 0;
    int identified_cases = 0;
    int corrected_cases = 0;
    int latent_cases = 0;
    int latent_hits = 0;
    double query_sum = 0.0;
    double tick_sum = 0.0;

    for (const Scenario& sc : scenarios) {
      SuiteCase c;
      c.scenario = sc.name;
      c.mode = to_string(mode);
      c.nominal = sc.has_tag("nominal");
      c.pre_detectable = sc.has_tag("pre_detectable");
      c.requires_skill = sc.requires_skill;
      c.expected_success = c.nominal || c.pre_detectable || mode != Mode::Pre;

      RunOptions ro = opts.run;
      ro.mode = mode;
      std::string first_dump;
      for (int rep = 0; rep < std::max(1, opts.reps); ++rep) {
        RunReport r = run_task(sc, reasoner, ro);
        std::string dump = normalized_report_json(r).dump();
        if (rep == 0) {
          first_dump = dump;
          c.report = std::move(r);
        } else if (dump != first_dump) {
          c.reps_consistent = false;
        }
      }
      if (!c.reps_consistent) suite.reps_all_consistent = false;
      if (c.expected_success && !c.report.task_success) suite.expected_successes_met = false;

      if (c.nominal) {
        agg.nominal_cases += 1;
        if (any_detection(c.report)) agg.nominal_false_positives += 1;
      } else {
        agg.cases += 1;
        if (c.report.task_success) successes += 1;
        bool det = any_detection(c.report);
        if (det) {
          detected_cases += 1;
          if (any_identification(c.report)) identified_cases += 1;
          if (c.report.task_success) corrected_cases += 1;
        }
        if (!c.requires_skill.empty()) {
          latent_cases += 1;
          if (suggested_required_skill(c.report, c.requires_skill)) latent_hits += 1;
        }
        query_sum += c.report.reasoner_queries;
        tick_sum += c.report.ticks;
      }
      suite.cases.push_back(std::move(c));
    }

    if (agg.cases > 0) {
      agg.task_success_rate = double(successes) / agg.cases;
      agg.failure_detection_rate = double(detected_cases) / agg.cases;
      agg.mean_queries = query_sum / agg.cases;
      agg.mean_ticks = tick_sum / agg.cases;
    }
    if (detected_cases > 0) {
      agg.failure_identification_rate = double(identified_cases) / detected_cases;
      agg.correction_success_rate = double(corrected_cases) / detected_cases;
    }
    if (latent_cases > 0) agg.skill_suggestion_accuracy = double(latent_hits) / latent_cases;
    suite.aggregates.push_back(agg);
  }
  return suite;
}

json suite_to_json(const SuiteReport& suite) {
  json cases = json::array();
  for (const auto& c : suite.cases) {
    cases.push_back(json{{"scenario", c.scenario},
                         {"mode", c.mode},
                         {"nominal", c.nominal},
                         {"pre_detectable", c.pre_detectable},
                         {"requires_skill", c.requires_skill},
                         {"expected_success", c.expected_success},
                         {"task_success", c.report.task_success},
                         {"reps_consistent", c.reps_consistent},
                         {"ticks", c.report.ticks},
                         {"reasoner_queries", c.report.reasoner_queries},
                         {"expansions", c.report.expansions},
                         {"detections", any_detection(c.report)}});
  }
  json aggregates = json::array();
  for (const auto& a : suite.aggregates) {
    aggregates.push_back(json{{"mode", a.mode},
                              {"cases", a.cases},
                              {"task_success_rate", a.task_success_rate},
                              {"failure_detection_rate", a.failure_detection_rate},
                              {"failure_identification_rate", a.failure_identification_rate},
                              {"correction_success_rate", a.correction_success_rate},
                              {"skill_suggestion_accuracy", a.skill_suggestion_accuracy},
                              {"mean_queries", a.mean_queries},
                              {"mean_ticks", a.mean_ticks},
                              {"nominal_cases", a.nominal_cases},
                              {"nominal_false_positives", a.nominal_false_positives}});
  }
  return json{{"cases", cases},
              {"aggregates", aggregates},
              {"reps_all_consistent", suite.reps_all_consistent},
              {"expected_successes_met", suite.expected_successes_met}};
}

std::vector<std::string> list_scenarios(const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".scen")
      paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace btrec
