#include "btrec/planner.hpp"

#include <cassert>

namespace btrec {

BehaviorTree plan_initial(const std::vector<Literal>& goals) {
  if (goals.empty()) return BehaviorTree{nullptr};
  if (goals.size() == 1) return BehaviorTree{BTNode::make_condition(goals[0])};
  std::vector<std::unique_ptr<BTNode>> conds;
  for (const Literal& g : goals) conds.push_back(BTNode::make_condition(g));
  return BehaviorTree{BTNode::make_sequence(std::move(conds))};
}

namespace {

struct Probe {
  Status status = Status::Failure;
  BTNode* target = nullptr;  // failed unexpanded condition responsible
};

// Mirrors tick evaluation; the target of a failing composite is the first
// child target in tick order, which lands on the deepest-leftmost candidate.
Probe probe_node(BTNode* node, const SceneGraph& scene, const std::set<Literal>& marks) {
  switch (node->kind) {
    case BTNode::Kind::Condition: {
      bool ok = !marks.count(node->condition) && scene.satisfied(node->condition);
      Probe p;
      p.status = ok ? Status::Success : Status::Failure;
      if (!ok && !node->expanded) p.target = node;
      return p;
    }
    case BTNode::Kind::Action:
      return Probe{Status::Running, nullptr};
    case BTNode::Kind::Sequence:
      for (auto& c : node->children) {
        Probe p = probe_node(c.get(), scene, marks);
        if (p.status != Status::Success)
          return p.status == Status::Failure ? p : Probe{Status::Running, nullptr};
      }
      return Probe{Status::Success, nullptr};
    case BTNode::Kind::Fallback: {
      Probe out{Status::Failure, nullptr};
      for (auto& c : node->children) {
        Probe p = probe_node(c.get(), scene, marks);
        if (p.status != Status::Failure) return Probe{p.status, nullptr};
        if (!out.target) out.target = p.target;
      }
      return out;
    }
  }
  return Probe{};
}

bool groundable_derived(const Literal& lit) {
  if (lit.predicate == "occupied")
    return lit.negated && lit.args[0].kind == TermKind::Constant;
  if (lit.predicate == "hand_empty") return !lit.negated;
  return false;
}

bool cannot_succeed(const BTNode* node) {
  switch (node->kind) {
    case BTNode::Kind::Action: return true;
    case BTNode::Kind::Condition: return false;
    case BTNode::Kind::Sequence:
      for (const auto& c : node->children)
        if (cannot_succeed(c.get())) return true;
      return false;
    case BTNode::Kind::Fallback:
      for (const auto& c : node->children)
        if (!cannot_succeed(c.get())) return false;
      return !node->children.empty();
  }
  return false;
}

// Literal that is certainly true once this subtree returns Success.
const Literal* guaranteed_literal(const BTNode* node) {
  if (node->kind == BTNode::Kind::Condition) return &node->condition;
  if (node->kind == BTNode::Kind::Fallback && !node->children.empty() &&
      node->children[0]->kind == BTNode::Kind::Condition) {
    for (size_t i = 1; i < node->children.size(); ++i)
      if (!cannot_succeed(node->children[i].get())) return nullptr;
    return &node->children[0]->condition;
  }
  return nullptr;
}

void prune_slot(std::unique_ptr<BTNode>& slot) {
  BTNode* node = slot.get();
  if (node->kind != BTNode::Kind::Sequence && node->kind != BTNode::Kind::Fallback) return;
  for (auto& c : node->children) prune_slot(c);
  if (node->kind == BTNode::Kind::Sequence) {
    std::set<Literal> guaranteed;
    std::vector<std::unique_ptr<BTNode>> kept;
    for (auto& c : node->children) {
      if (c->kind == BTNode::Kind::Condition && guaranteed.count(c->condition)) continue;
      if (const Literal* g = guaranteed_literal(c.get())) guaranteed.insert(*g);
      kept.push_back(std::move(c));
    }
    node->children = std::move(kept);
  }
  if (node->children.size() == 1) slot = std::move(node->children[0]);
}

}  // namespace

void prune_redundant(BehaviorTree& tree) {
  if (tree.root()) prune_slot(tree.root_slot());
}

ExpandResult expand_next(BehaviorTree& tree, const SkillCatalog& catalog,
                         const SceneGraph& scene) {
  if (!tree.root()) return ExpandResult{ExpandResult::Kind::NothingToExpand, {}};
  Probe p = probe_node(tree.root(), scene, tree.marks());
  if (!p.target) return ExpandResult{ExpandResult::Kind::NothingToExpand, {}};
  BTNode* node = p.target;
  const Literal goal = node->condition;
  const PredicateInfo* info = find_predicate(goal.predicate);

  std::vector<std::unique_ptr<BTNode>> children;
  if (info->category == PredicateCategory::Derived) {
    if (!groundable_derived(goal)) return ExpandResult{ExpandResult::Kind::NoAchiever, goal};
    std::vector<Literal> base = ground_derived_negation(scene, goal);
    assert(!base.empty());
    for (const Literal& l : base) children.push_back(BTNode::make_condition(l));
    children.push_back(BTNode::make_condition(goal));
    node->kind = BTNode::Kind::Sequence;
  } else {
    std::vector<GroundSkillSpec> achievers = catalog.achievers(goal, scene);
    if (achievers.empty()) return ExpandResult{ExpandResult::Kind::NoAchiever, goal};
    children.push_back(BTNode::make_condition(goal, /*expanded=*/true));
    for (const GroundSkillSpec& a : achievers) {
      std::vector<std::unique_ptr<BTNode>> seq;
      for (const Literal& pre : a.preconditions) seq.push_back(BTNode::make_condition(pre));
      seq.push_back(BTNode::make_action(a.skill, a.postconditions));
      children.push_back(seq.size() == 1 ? std::move(seq[0])
                                         : BTNode::make_sequence(std::move(seq)));
    }
    node->kind = BTNode::Kind::Fallback;
  }
  node->expanded = true;
  node->children = std::move(children);
  tree.clear_mark(goal);
  prune_redundant(tree);
  return ExpandResult{ExpandResult::Kind::Expanded, goal};
}

namespace {

int guard_actions(std::unique_ptr<BTNode>& slot, const std::string& skill, const Literal& lit) {
  BTNode* node = slot.get();
  if (node->kind == BTNode::Kind::Action) {
    if (node->skill.name != skill) return 0;
    // Unguarded action outside a sequence grows its own guard pair.
    std::vector<std::unique_ptr<BTNode>> pair;
    pair.push_back(BTNode::make_condition(lit));
    pair.push_back(std::move(slot));
    slot = BTNode::make_sequence(std::move(pair));
    return 1;
  }
  if (node->kind == BTNode::Kind::Sequence && !node->children.empty() &&
      node->children.back()->kind == BTNode::Kind::Action &&
      node->children.back()->skill.name == skill) {
    int count = 0;
    for (size_t i = 0; i + 1 < node->children.size(); ++i)
      count += guard_actions(node->children[i], skill, lit);
    bool already = node->children[0]->kind == BTNode::Kind::Condition &&
                   node->children[0]->condition == lit;
    if (already) return count;
    node->children.insert(node->children.begin(), BTNode::make_condition(lit));
    return count + 1;
  }
  int count = 0;
  for (auto& c : node->children) count += guard_actions(c, skill, lit);
  return count;
}

bool contains_action(const BTNode* node, const std::string& skill) {
  if (node->kind == BTNode::Kind::Action) return node->skill.name == skill;
  for (const auto& c : node->children)
    if (contains_action(c.get(), skill)) return true;
  return false;
}

}  // namespace

int insert_precondition_conditions(BehaviorTree& tree, const std::string& skill,
                                   const Literal& ground_lit) {
  if (!tree.root()) return 0;
  return guard_actions(tree.root_slot(), skill, ground_lit);
}

bool tree_contains_action(const BehaviorTree& tree, const std::string& skill) {
  return tree.root() && contains_action(tree.root(), skill);
}

void apply_model_effects(SceneGraph& scene, const std::vector<Literal>& posts) {
  for (const Literal& post : posts) {
    const PredicateInfo* info = find_predicate(post.predicate);
    if (!info) continue;
    if (info->category == PredicateCategory::Attribute) {
      if (scene.has_object(post.args[0].name))
        scene.set_attribute(post.args[0].name, post.predicate, !post.negated);
      continue;
    }
    if (info->category != PredicateCategory::Base) continue;
    if (!post.negated) {
      if (!scene.relations().count(post)) scene.add_relation(post);
      continue;
    }
    Literal positive = post;
    positive.negated = false;
    std::vector<Literal> doomed;
    for (const Literal& r : scene.relations())
      if (r.predicate == positive.predicate && unify(positive, r)) doomed.push_back(r);
    for (const Literal& r : doomed) scene.remove_relation(r);
  }
}

ModelPlan model_rollout(const std::vector<Literal>& goals, const SkillCatalog& catalog,
                        const SceneGraph& scene, int max_expansions, int max_ticks) {
  ModelPlan plan;
  BehaviorTree tree = plan_initial(goals);
  SceneGraph belief = scene;
  for (int t = 0; t < max_ticks; ++t) {
    TickResult r = tree.tick(belief);
    if (r.status == Status::Success) {
      plan.success = true;
      return plan;
    }
    if (r.status == Status::Failure) {
      ExpandResult e = expand_next(tree, catalog, belief);
      if (e.kind == ExpandResult::Kind::Expanded) {
        if (++plan.expansions > max_expansions) return plan;
        continue;
      }
      if (e.kind == ExpandResult::Kind::NoAchiever) {
        plan.no_achiever = true;
        plan.no_achiever_literal = e.literal;
      }
      return plan;
    }
    plan.steps.push_back(ModelStep{r.pending->skill, r.pending->postconditions});
    apply_model_effects(belief, r.pending->postconditions);
  }
  return plan;
}

}  // namespace btrec
