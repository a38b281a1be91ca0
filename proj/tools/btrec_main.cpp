#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "btrec/oracle.hpp"
#include "btrec/pipeline.hpp"
#include "btrec/report.hpp"
#include "btrec/sim.hpp"
#include "btrec/vlm.hpp"

namespace {

using namespace btrec;

std::unique_ptr<Reasoner> make_reasoner(const std::string& kind, const std::string& endpoint_config,
                                        const std::string& prompts_dir, const RunOptions& opts) {
  if (kind == "oracle")
    return std::make_unique<OracleReasoner>(opts.max_expansions, opts.max_ticks);
  if (kind == "vlm") {
    if (endpoint_config.empty())
      throw std::runtime_error("--reasoner vlm needs --endpoint-config");
    return std::make_unique<VlmReasoner>(load_endpoint_config(endpoint_config), prompts_dir);
  }
  throw std::runtime_error("unknown reasoner: " + kind + " (expected oracle or vlm)");
}

std::vector<Mode> parse_modes(const std::string& csv) {
  std::vector<Mode> modes;
  std::istringstream is(csv);
  std::string item;
  while (std::getline(is, item, ',')) {
    auto mode = mode_from(item);
    if (!mode) throw std::runtime_error("unknown mode: " + item);
    modes.push_back(*mode);
  }
  if (modes.empty()) throw std::runtime_error("no modes given");
  return modes;
}

void print_run_summary(const RunReport& r, bool verbose) {
  std::cout << "scenario " << r.scenario << " mode=" << r.mode << " reasoner=" << r.reasoner
            << "\n";
  std::cout << "  success=" << (r.task_success ? "yes" : "no") << " ticks=" << r.ticks
            << " skills_executed=" << r.skills_executed << " expansions=" << r.expansions
            << " queries=" << r.reasoner_queries << "\n";
  for (const auto& [kind, stats] : r.checks) {
    std::cout << "  check " << kind << ": queries=" << stats.queries
              << " detected=" << stats.detected << " identified=" << stats.identified
              << " corrected=" << stats.corrected << "\n";
  }
  for (const auto& c : r.corrections) {
    std::cout << "  correction tick=" << c.tick << " [" << to_string(c.kind) << "] "
              << to_string(c.correction.type)
              << (c.correction.skill.empty() ? "" : " " + c.correction.skill)
              << (c.correction.precondition.predicate.empty()
                      ? ""
                      : " " + c.correction.precondition.to_string())
              << (c.applied ? " (applied)" : " (rejected: " + c.note + ")") << "\n";
  }
  for (const auto& u : r.unrecovered) std::cout << "  unrecovered: " << u << "\n";
  if (verbose) {
    for (const auto& v : r.verdicts)
      std::cout << "  verdict tick=" << v.tick << " " << v.verdict.summary() << "\n";
    std::cout << r.final_tree;
  }
}

void print_aggregates(const SuiteReport& suite) {
  std::cout << std::fixed << std::setprecision(4);
  for (const auto& a : suite.aggregates) {
    std::cout << "mode " << a.mode << ": cases=" << a.cases
              << " success=" << a.task_success_rate << " detect=" << a.failure_detection_rate
              << " identify=" << a.failure_identification_rate
              << " correct=" << a.correction_success_rate
              << " skill_suggest=" << a.skill_suggestion_accuracy
              << " mean_queries=" << a.mean_queries << " mean_ticks=" << a.mean_ticks
              << " nominal_fp=" << a.nominal_false_positives << "/" << a.nominal_cases << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"behavior-tree task runner with failure detection and recovery"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string mode_text = "combined";
  std::string reasoner_kind = "oracle";
  std::string report_out;
  std::string endpoint_config;
  std::string prompts_dir = "prompts";
  int max_ticks = 200;
  int history_window = 5;
  bool verbose = false;

  auto* run_cmd = app.add_subcommand("run", "execute one scenario");
  run_cmd->add_option("scenario", scenario_path, "scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--mode", mode_text, "pre|reactive|combined")->capture_default_str();
  run_cmd->add_option("--reasoner", reasoner_kind, "oracle|vlm")->capture_default_str();
  run_cmd->add_option("--max-ticks", max_ticks)->capture_default_str();
  run_cmd->add_option("--history-window", history_window)->capture_default_str();
  run_cmd->add_option("--report-out", report_out, "write the run report as JSON");
  run_cmd->add_option("--endpoint-config", endpoint_config, "JSON endpoint settings for vlm");
  run_cmd->add_option("--prompts-dir", prompts_dir)->capture_default_str();
  run_cmd->add_flag("--verbose", verbose, "print every verdict and the final tree");

  std::string suite_dir;
  std::string modes_csv = "pre,reactive,combined";
  int reps = 10;
  auto* suite_cmd = app.add_subcommand("suite", "run every scenario in a directory");
  suite_cmd->add_option("dir", suite_dir, "directory of .scen files")
      ->required()
      ->check(CLI::ExistingDirectory);
  suite_cmd->add_option("--modes", modes_csv, "comma-separated mode list")->capture_default_str();
  suite_cmd->add_option("--reps", reps, "repetitions per case")->capture_default_str();
  suite_cmd->add_option("--reasoner", reasoner_kind, "oracle|vlm")->capture_default_str();
  suite_cmd->add_option("--max-ticks", max_ticks)->capture_default_str();
  suite_cmd->add_option("--report-out", report_out, "write the suite report as JSON");
  suite_cmd->add_option("--endpoint-config", endpoint_config, "JSON endpoint settings for vlm");
  suite_cmd->add_option("--prompts-dir", prompts_dir)->capture_default_str();

  std::string replay_path;
  auto* replay_cmd = app.add_subcommand("replay", "rebuild the final scene from a report's history");
  replay_cmd->add_option("report", replay_path, "run report JSON file")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      auto mode = mode_from(mode_text);
      if (!mode) throw std::runtime_error("unknown mode: " + mode_text);
      RunOptions opts;
      opts.mode = *mode;
      opts.max_ticks = max_ticks;
      opts.history_window = history_window;
      auto reasoner = make_reasoner(reasoner_kind, endpoint_config, prompts_dir, opts);
      Scenario scenario = load_scenario(scenario_path);
      RunReport report = run_task(scenario, *reasoner, opts);
      print_run_summary(report, verbose);
      if (!report_out.empty()) write_text_file(report_out, report_to_json(report).dump(2) + "\n");
      return report.task_success ? 0 : 1;
    }

    if (suite_cmd->parsed()) {
      SuiteOptions opts;
      opts.scenario_paths = list_scenarios(suite_dir);
      if (opts.scenario_paths.empty())
        throw std::runtime_error("no .scen files under " + suite_dir);
      opts.modes = parse_modes(modes_csv);
      opts.reps = reps;
      opts.run.max_ticks = max_ticks;
      auto reasoner = make_reasoner(reasoner_kind, endpoint_config, prompts_dir, opts.run);
      SuiteReport suite = run_suite(opts, *reasoner);
      for (const auto& c : suite.cases) {
        std::cout << "case " << c.scenario << " mode=" << c.mode
                  << " success=" << (c.report.task_success ? "yes" : "no")
                  << " expected=" << (c.expected_success ? "yes" : "no")
                  << " queries=" << c.report.reasoner_queries << " ticks=" << c.report.ticks
                  << (c.reps_consistent ? "" : " REPS-DIVERGED") << "\n";
      }
      print_aggregates(suite);
      if (!report_out.empty()) write_text_file(report_out, suite_to_json(suite).dump(2) + "\n");
      bool ok = suite.expected_successes_met && suite.reps_all_consistent;
      std::cout << (ok ? "suite ok" : "suite FAILED its expectations") << "\n";
      return ok ? 0 : 1;
    }

    if (replay_cmd->parsed()) {
      json j = json::parse(read_text_file(replay_path));
      std::string detail;
      if (replay_matches_json(j, &detail)) {
        std::cout << "history replay matches the recorded final scene\n";
        return 0;
      }
      std::cout << "history replay DIVERGED\n" << detail << "\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
