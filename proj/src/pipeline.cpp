#include "btrec/pipeline.hpp"

#include <chrono>
#include <sstream>

#include "btrec/oracle.hpp"
#include "btrec/planner.hpp"

namespace btrec {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Pre: return "pre";
    case Mode::Reactive: return "reactive";
    case Mode::Combined: return "combined";
  }
  return "?";
}

std::optional<Mode> mode_from(const std::string& s) {
  if (s == "pre") return Mode::Pre;
  if (s == "reactive") return Mode::Reactive;
  if (s == "combined") return Mode::Combined;
  return std::nullopt;
}

namespace {

std::uint64_t now_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
}

class Runner {
 public:
  Runner(const Scenario& scenario, Reasoner& reasoner, const RunOptions& opts)
      : scenario_(scenario),
        reasoner_(reasoner),
        opts_(opts),
        world_(scenario),
        catalog_(make_catalog(scenario.catalog_name)) {}

  RunReport run() {
    rep_.scenario = scenario_.name;
    rep_.task = scenario_.task;
    rep_.mode = to_string(opts_.mode);
    rep_.reasoner = reasoner_.name();
    rep_.initial_scene = world_.scene();
    record_faults(world_.fire_faults(FaultTrigger::Phase::PreExecution, 0), 0);
    if (opts_.mode != Mode::Reactive) pre_execution_screening();
    if (opts_.mode == Mode::Pre)
      open_loop_playback();
    else
      reactive_loop();
    rep_.final_scene = world_.scene();
    rep_.final_tree = tree_.render();
    return std::move(rep_);
  }

 private:
  // The runtime notices scene edits (its world changed under it); armed
  // overrides stay invisible until they bite.
  void record_faults(const std::vector<FaultApplication>& apps, int tick) {
    for (const FaultApplication& a : apps) {
      HistoryRecord rec;
      rec.type = HistoryRecord::Type::Disturbance;
      rec.tick = tick;
      rec.timestamp_ns = now_ns();
      rec.note = a.description;
      rec.diff = a.diff;
      rep_.history.push_back(rec);
      global_armed_ = true;
    }
  }

  std::vector<std::string> recent_events() const {
    std::vector<std::string> out;
    size_t start = rep_.history.size() > static_cast<size_t>(opts_.history_window)
                       ? rep_.history.size() - opts_.history_window
                       : 0;
    for (size_t i = start; i < rep_.history.size(); ++i) {
      const HistoryRecord& r = rep_.history[i];
      std::ostringstream os;
      os << "tick " << r.tick << ": ";
      if (r.type == HistoryRecord::Type::Disturbance)
        os << "the scene changed on its own: " << r.note;
      else
        os << r.note << " [" << r.outcome << "]";
      out.push_back(os.str());
    }
    return out;
  }

  CheckRequest base_request(CheckKind kind) {
    CheckRequest req;
    req.kind = kind;
    req.scene = &world_.scene();
    req.catalog = &catalog_;
    req.task = scenario_.task;
    req.goals = scenario_.goals;
    req.recent_events = recent_events();
    return req;
  }

  Verdict query(const CheckRequest& req, int tick, const std::string& phase) {
    Verdict v = reasoner_.check(req);
    v.kind = req.kind;
    if (!v.detected) {
      v.identification.reset();
      v.correction.reset();
    }
    ++rep_.reasoner_queries;
    CheckStats& stats = rep_.checks[to_string(req.kind)];
    ++stats.queries;
    if (v.detected) {
      ++stats.detected;
      if (v.identification) {
        ++stats.identified;
        skill_armed_.insert(v.identification->skill);
      }
    }
    rep_.verdicts.push_back(VerdictRecord{tick, phase, v});
    return v;
  }

  bool apply_correction(const Verdict& v, int tick, const std::string& phase) {
    if (!v.correction) return false;
    const Correction& c = *v.correction;
    CorrectionRecord rec;
    rec.tick = tick;
    rec.phase = phase;
    rec.kind = v.kind;
    rec.correction = c;
    switch (c.type) {
      case Correction::Type::MarkUnsatisfied:
        for (const Literal& lit : c.unsatisfied) tree_.mark_unsatisfied(lit);
        rec.applied = true;
        rec.note = "execution deferred until " + btrec::to_string(c.unsatisfied) + " is resolved";
        break;
      case Correction::Type::ReportSkillFailure:
        rec.applied = true;
        rec.note = c.skill + " recorded as failed";
        break;
      case Correction::Type::AddPrecondition: {
        bool in_catalog = catalog_.find(c.skill) != nullptr;
        bool in_tree = phase != "runtime" || tree_contains_action(tree_, c.skill);
        if (!in_catalog || !in_tree) {
          rec.note = !in_catalog ? c.skill + " is not an active skill"
                                 : c.skill + " does not appear in the current plan";
          rep_.unrecovered.push_back("rejected precondition for " + c.skill + ": " + rec.note);
          break;
        }
        Binding culprit = v.identification ? v.identification->culprit : Binding{};
        Literal param_form = generalize_through_binding(c.precondition, culprit);
        catalog_.add_precondition_override(c.skill, param_form);
        if (phase == "runtime")
          insert_precondition_conditions(tree_, c.skill, c.precondition);
        rec.applied = true;
        rec.note = c.skill + " now requires " + param_form.to_string();
        break;
      }
      case Correction::Type::AddSkill:
        if (!catalog_.find_latent(c.skill)) {
          rec.note = catalog_.find(c.skill) ? c.skill + " is already active"
                                            : "no such skill " + c.skill;
          rep_.unrecovered.push_back("rejected skill suggestion: " + rec.note);
          break;
        }
        catalog_.admit_latent(c.skill);
        skill_armed_.insert(c.skill);
        rec.applied = true;
        rec.note = c.skill + " admitted to the active catalog";
        break;
    }
    rep_.corrections.push_back(rec);
    if (rec.applied) ++rep_.checks[to_string(v.kind)].corrected;
    return rec.applied;
  }

  void pre_execution_screening() {
    for (int round = 0; round < opts_.pre_check_rounds; ++round) {
      Verdict v = query(base_request(CheckKind::PreExecution), 0, "pre_execution");
      if (!v.detected) return;
      if (!apply_correction(v, 0, "pre_execution")) return;
    }
  }

  void add_skill_record(int tick, int activation, const GroundSkill& gs,
                        const std::string& outcome, const std::string& precheck,
                        const std::string& postcheck, const std::string& note,
                        SceneDiff diff) {
    HistoryRecord rec;
    rec.type = HistoryRecord::Type::Skill;
    rec.tick = tick;
    rec.timestamp_ns = now_ns();
    rec.activation = activation;
    rec.skill = gs;
    rec.outcome = outcome;
    rec.precheck = precheck;
    rec.postcheck = postcheck;
    rec.note = note;
    rec.diff = std::move(diff);
    rep_.history.push_back(rec);
  }

  void open_loop_playback() {
    ModelPlan plan = model_rollout(scenario_.goals, catalog_, world_.scene(),
                                   opts_.max_expansions, opts_.max_ticks);
    rep_.expansions = plan.expansions;
    if (!plan.success) {
      rep_.unrecovered.push_back(
          plan.no_achiever ? "planning dead-ends: no skill achieves " +
                                 plan.no_achiever_literal.to_string()
                           : "planning exhausted its budget");
    } else {
      int step_no = 0;
      for (const ModelStep& step : plan.steps) {
        rep_.ticks = ++step_no;
        record_faults(world_.fire_faults(FaultTrigger::Phase::AtTick, step_no), step_no);
        int ordinal = world_.executions() + 1;
        record_faults(world_.fire_faults(FaultTrigger::Phase::BeforeSkill, ordinal), step_no);
        ExecOutcome out = world_.execute(step.skill);
        ++rep_.skills_executed;
        std::string outcome = out.status == Status::Failure ? "failure"
                              : out.degraded               ? "degraded"
                                                           : "success";
        add_skill_record(step_no, ordinal, step.skill, outcome, "not_run", "not_run", out.note,
                         std::move(out.diff));
        record_faults(world_.fire_faults(FaultTrigger::Phase::AfterSkill, world_.executions()),
                      step_no);
        if (out.status == Status::Failure) {
          rep_.unrecovered.push_back("open-loop playback aborted: " + out.note);
          break;
        }
      }
    }
    rep_.task_success = world_.scene().satisfied_all(scenario_.goals);
  }

  bool replan_step(int tick) {
    ExpandResult e = expand_next(tree_, catalog_, world_.scene());
    if (e.kind == ExpandResult::Kind::Expanded) {
      if (++rep_.expansions > opts_.max_expansions) {
        rep_.unrecovered.push_back("expansion budget exhausted");
        return false;
      }
      return true;
    }
    if (e.kind == ExpandResult::Kind::NoAchiever) {
      CheckRequest req = base_request(CheckKind::SkillSuggest);
      req.unachievable = e.literal;
      Verdict v = query(req, tick, "runtime");
      if (v.detected && apply_correction(v, tick, "runtime")) return true;
      rep_.unrecovered.push_back("no skill achieves " + e.literal.to_string());
      return false;
    }
    rep_.unrecovered.push_back("plan cannot be repaired further");
    return false;
  }

  // Returns false when the run must stop (repeated post-failure abort).
  bool attempt_execution(int tick, BTNode* node) {
    GroundSkill gs = node->skill;
    int ordinal = world_.executions() + 1;
    record_faults(world_.fire_faults(FaultTrigger::Phase::BeforeSkill, ordinal), tick);

    GroundSkillSpec spec = catalog_.instantiate(gs.name, gs.binding);
    bool armed = opts_.mode == Mode::Reactive || global_armed_ || skill_armed_.count(gs.name);
    std::string precheck = "not_run";
    if (armed) {
      bool fully_clean = true;
      CheckRequest req = base_request(CheckKind::PreconditionVerify);
      req.skill = gs;
      req.preconditions = spec.preconditions;
      req.postconditions = node->postconditions;
      Verdict v = query(req, tick, "runtime");
      if (v.detected) {
        apply_correction(v, tick, "runtime");
        fully_clean = false;
      } else {
        CheckRequest req2 = base_request(CheckKind::PreconditionSuggest);
        req2.skill = gs;
        req2.preconditions = spec.preconditions;
        req2.postconditions = node->postconditions;
        Verdict v2 = query(req2, tick, "runtime");
        if (v2.detected) {
          apply_correction(v2, tick, "runtime");
          fully_clean = false;
        }
      }
      precheck = fully_clean ? "clean" : "detected";
      if (fully_clean && opts_.mode == Mode::Combined) {
        global_armed_ = false;
        skill_armed_.erase(gs.name);
      }
      if (!fully_clean) {
        add_skill_record(tick, ordinal, gs, "skipped", precheck, "not_run",
                         gs.to_string() + ": execution withheld this tick", SceneDiff{});
        return true;
      }
    }

    ExecOutcome out = world_.execute(gs);
    ++rep_.skills_executed;
    tree_.clear_marks();

    CheckRequest req3 = base_request(CheckKind::PostconditionVerify);
    req3.skill = gs;
    req3.preconditions = spec.preconditions;
    req3.postconditions = node->postconditions;
    Verdict v3 = query(req3, tick, "runtime");
    std::string postcheck = v3.detected ? "detected" : "clean";
    bool abort = false;
    if (v3.detected) {
      apply_correction(v3, tick, "runtime");
      int streak = ++postfail_[gs];
      if (streak >= opts_.postcheck_failure_abort) {
        rep_.unrecovered.push_back(gs.to_string() + " failed its postconditions " +
                                   std::to_string(streak) + " times in a row");
        abort = true;
      }
    } else {
      postfail_.erase(gs);
    }
    std::string outcome = out.status == Status::Failure ? "failure"
                          : out.degraded               ? "degraded"
                                                       : "success";
    add_skill_record(tick, ordinal, gs, outcome, precheck, postcheck, out.note,
                     std::move(out.diff));
    record_faults(world_.fire_faults(FaultTrigger::Phase::AfterSkill, world_.executions()),
                  tick);
    return !abort;
  }

  void reactive_loop() {
    tree_ = plan_initial(scenario_.goals);
    for (int tick = 1; tick <= opts_.max_ticks; ++tick) {
      rep_.ticks = tick;
      record_faults(world_.fire_faults(FaultTrigger::Phase::AtTick, tick), tick);
      TickResult r = tree_.tick(world_.scene());
      if (r.status == Status::Success) {
        rep_.task_success = true;
        return;
      }
      if (r.status == Status::Failure) {
        if (!replan_step(tick)) return;
        continue;
      }
      if (!attempt_execution(tick, r.pending)) return;
    }
    rep_.unrecovered.push_back("tick budget exhausted");
  }

  const Scenario& scenario_;
  Reasoner& reasoner_;
  const RunOptions& opts_;
  World world_;
  SkillCatalog catalog_;
  BehaviorTree tree_;
  RunReport rep_;
  bool global_armed_ = false;
  std::set<std::string> skill_armed_;
  std::map<GroundSkill, int> postfail_;
};

}  // namespace

RunReport run_task(const Scenario& scenario, Reasoner& reasoner, const RunOptions& opts) {
  Runner runner(scenario, reasoner, opts);
  return runner.run();
}

}  // namespace btrec
