#pragma once

#include <string>
#include <vector>

#include "btrec/bt.hpp"
#include "btrec/scene.hpp"
#include "btrec/skill.hpp"

namespace btrec {

// Goal conditions in task order; a single goal stands alone as the root.
BehaviorTree plan_initial(const std::vector<Literal>& goals);

struct ExpandResult {
  enum class Kind { Expanded, NoAchiever, NothingToExpand };
  Kind kind = Kind::NothingToExpand;
  Literal literal;  // condition expanded, or the literal no skill achieves
};

// One backchaining step: locate the deepest-leftmost failed unexpanded
// condition and replace it. Base and attribute goals grow a Fallback over the
// re-check condition plus one guarded sequence per achiever; failed derived
// goals rewrite to their scene-specific base negations followed by a fresh
// copy of the derived condition, which keeps later violations observable.
ExpandResult expand_next(BehaviorTree& tree, const SkillCatalog& catalog, const SceneGraph& scene);

// Collapses single-child composites and drops conditions a preceding sibling
// already guarantees at the moment they would run.
void prune_redundant(BehaviorTree& tree);

// Inserts the ground condition ahead of every occurrence of the skill's
// action in the tree. Returns the number of actions guarded.
int insert_precondition_conditions(BehaviorTree& tree, const std::string& skill,
                                   const Literal& ground_lit);
bool tree_contains_action(const BehaviorTree& tree, const std::string& skill);

struct ModelStep {
  GroundSkill skill;
  std::vector<Literal> postconditions;
};

struct ModelPlan {
  bool success = false;
  std::vector<ModelStep> steps;  // execution order
  int expansions = 0;
  bool no_achiever = false;
  Literal no_achiever_literal;
};

// Plans to completion against a copy of the scene, resolving each pending
// action by optimistically asserting its postconditions. The step list is the
// open-loop plan; failure reports either exhausted budgets or the literal
// that stopped backchaining.
ModelPlan model_rollout(const std::vector<Literal>& goals, const SkillCatalog& catalog,
                        const SceneGraph& scene, int max_expansions, int max_ticks);

// Optimistic belief update used during planning rollouts.
void apply_model_effects(SceneGraph& scene, const std::vector<Literal>& posts);

}  // namespace btrec
