#include "btrec/oracle.hpp"

#include <algorithm>
#include <sstream>

#include "btrec/planner.hpp"
#include "btrec/sim.hpp"

namespace btrec {

Literal generalize_through_binding(const Literal& ground, const Binding& culprit) {
  Literal out = ground;
  for (Term& t : out.args) {
    if (t.kind != TermKind::Constant) continue;
    for (const auto& [var, val] : culprit) {
      if (val == t.name) {
        t = Term::variable(var);
        break;
      }
    }
  }
  return out;
}

namespace {

Literal occupancy_guard(const std::string& target) {
  return Literal{"occupied", {Term::constant(target)}, true};
}

Verdict clean(CheckKind kind) {
  Verdict v;
  v.kind = kind;
  return v;
}

// The active template that would achieve the literal if attribute gates
// passed; explains why backchaining dead-ended.
struct BlockedMatch {
  std::string skill;
  Binding binding;
};

std::optional<BlockedMatch> blocked_achiever(const SkillCatalog& catalog, const Literal& goal,
                                             const SceneGraph& scene) {
  for (const SkillTemplate& t : catalog.active()) {
    std::vector<Binding> matches;
    for (const Literal& post : t.postconditions)
      if (auto b = unify(post, goal)) matches.push_back(*b);
    for (const Literal& pat : t.achieve_patterns)
      if (auto b = unify(pat, goal)) matches.push_back(*b);
    for (const Binding& b : matches) {
      bool classes_ok = true;
      for (const ParamSpec& p : t.params) {
        auto it = b.find(p.name);
        if (it == b.end()) continue;
        const SceneObject* obj = scene.object(it->second);
        if (!obj || (!p.classes.empty() &&
                     std::find(p.classes.begin(), p.classes.end(), obj->object_class) ==
                         p.classes.end())) {
          classes_ok = false;
          break;
        }
      }
      if (classes_ok) return BlockedMatch{t.name, b};
    }
  }
  return std::nullopt;
}

}  // namespace

Verdict OracleReasoner::check(const CheckRequest& req) {
  switch (req.kind) {
    case CheckKind::PreExecution: return check_pre_execution(req);
    case CheckKind::PreconditionVerify: return check_precondition_verify(req);
    case CheckKind::PostconditionVerify: return check_postcondition_verify(req);
    case CheckKind::PreconditionSuggest: return check_precondition_suggest(req);
    case CheckKind::SkillSuggest: return check_skill_suggest(req);
  }
  return clean(req.kind);
}

Verdict OracleReasoner::check_pre_execution(const CheckRequest& req) {
  Verdict v = clean(CheckKind::PreExecution);
  ModelPlan plan =
      model_rollout(req.goals, *req.catalog, *req.scene, max_expansions_, max_ticks_);
  if (!plan.success) return v;

  SceneGraph world = *req.scene;
  std::optional<PhysicsViolation> violation;
  for (const ModelStep& step : plan.steps) {
    violation = predict_violation(world, step.skill);
    if (violation) break;
    ExecOutcome out = execute_physics(world, step.skill, std::nullopt);
    if (out.status == Status::Failure) return v;
  }
  if (!violation) return v;

  const std::string& target = violation->target;
  Literal guard = occupancy_guard(target);
  std::vector<Literal> clearing = ground_derived_negation(world, guard);
  std::vector<Literal> unachievable;
  for (const Literal& lit : clearing)
    if (req.catalog->achievers(lit, world).empty()) unachievable.push_back(lit);

  v.detected = true;
  if (unachievable.empty()) {
    std::ostringstream cause;
    cause << target << " is already occupied and " << violation->skill.name
          << " has no guard against that";
    v.identification = Identification{violation->skill.name, violation->skill.binding,
                                      cause.str()};
    v.correction = Correction{Correction::Type::AddPrecondition, {}, violation->skill.name,
                              guard};
    return v;
  }

  const Literal& blocker_lit = unachievable.front();
  std::string blocker = blocker_lit.args.empty() ? "" : blocker_lit.args[0].name;
  auto blocked = blocked_achiever(*req.catalog, blocker_lit, world);
  std::vector<std::string> latents = req.catalog->latent_achievers(blocker_lit, world);
  if (latents.empty()) {
    // Diagnosis stands even without a capability to offer.
    std::ostringstream cause;
    cause << target << " is occupied by " << blocker << " and nothing can clear it";
    v.identification =
        Identification{violation->skill.name, violation->skill.binding, cause.str()};
    v.correction = Correction{Correction::Type::AddPrecondition, {}, violation->skill.name,
                              guard};
    return v;
  }
  std::ostringstream cause;
  cause << target << " is occupied by " << blocker
        << ", which no active skill can move";
  Identification id;
  id.skill = blocked ? blocked->skill : violation->skill.name;
  id.culprit = blocked ? blocked->binding : violation->skill.binding;
  id.cause = cause.str();
  v.identification = id;
  v.correction = Correction{Correction::Type::AddSkill, {}, latents.front(), {}};
  return v;
}

Verdict OracleReasoner::check_precondition_verify(const CheckRequest& req) {
  Verdict v = clean(CheckKind::PreconditionVerify);
  std::vector<Literal> violated;
  for (const Literal& pre : req.preconditions)
    if (!req.scene->satisfied(pre)) violated.push_back(pre);
  if (violated.empty()) return v;
  v.detected = true;
  v.identification = Identification{req.skill.name, req.skill.binding,
                                    "preconditions no longer hold: " + to_string(violated)};
  v.correction = Correction{Correction::Type::MarkUnsatisfied, violated, req.skill.name, {}};
  return v;
}

Verdict OracleReasoner::check_postcondition_verify(const CheckRequest& req) {
  Verdict v = clean(CheckKind::PostconditionVerify);
  std::vector<Literal> violated;
  for (const Literal& post : req.postconditions)
    if (!req.scene->satisfied(post)) violated.push_back(post);
  if (violated.empty()) return v;
  v.detected = true;
  v.identification = Identification{req.skill.name, req.skill.binding,
                                    "postconditions did not come true: " + to_string(violated)};
  v.correction = Correction{Correction::Type::ReportSkillFailure, {}, req.skill.name, {}};
  return v;
}

Verdict OracleReasoner::check_precondition_suggest(const CheckRequest& req) {
  Verdict v = clean(CheckKind::PreconditionSuggest);
  std::optional<PhysicsViolation> violation = predict_violation(*req.scene, req.skill);
  if (!violation) return v;
  std::ostringstream cause;
  cause << "running " << req.skill.to_string() << " now would misfire: " << violation->kind
        << " at " << violation->target;
  v.detected = true;
  v.identification = Identification{req.skill.name, req.skill.binding, cause.str()};
  v.correction = Correction{Correction::Type::AddPrecondition, {}, req.skill.name,
                            occupancy_guard(violation->target)};
  return v;
}

Verdict OracleReasoner::check_skill_suggest(const CheckRequest& req) {
  Verdict v = clean(CheckKind::SkillSuggest);
  std::vector<std::string> latents = req.catalog->latent_achievers(req.unachievable, *req.scene);
  if (latents.empty()) return v;
  auto blocked = blocked_achiever(*req.catalog, req.unachievable, *req.scene);
  std::ostringstream cause;
  cause << "no active skill achieves " << req.unachievable.to_string();
  Identification id;
  if (blocked) {
    id.skill = blocked->skill;
    id.culprit = blocked->binding;
    cause << "; " << blocked->skill << " matches but its requirements rule it out";
  }
  id.cause = cause.str();
  v.detected = true;
  v.identification = id;
  v.correction = Correction{Correction::Type::AddSkill, {}, latents.front(), {}};
  return v;
}

}  // namespace btrec
