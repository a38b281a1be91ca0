#include <doctest.h>

#include <random>

#include "btrec/bt.hpp"

using namespace btrec;

namespace {

// true_lit holds in the scene below, false_lit does not.
const char* kTrueLit = "on(black_cube, table)";
const char* kFalseLit = "held(black_cube)";

SceneGraph tiny_scene() {
  SceneGraph g;
  g.add_object({"table", "zone", "grey", false, false, true});
  g.add_object({"black_cube", "cube", "black", true, false, true});
  g.add_relation(parse_literal(kTrueLit));
  return g;
}

// S: satisfied condition, F: failed condition, R: action (always Running).
std::unique_ptr<BTNode> leaf_for(char symbol) {
  switch (symbol) {
    case 'S': return BTNode::make_condition(parse_literal(kTrueLit));
    case 'F': return BTNode::make_condition(parse_literal(kFalseLit));
    default:
      return BTNode::make_action(GroundSkill{"grasp", {{"X", "black_cube"}}},
                                 {parse_literal(kFalseLit)});
  }
}

Status tick_pair(BTNode::Kind kind, char a, char b, BTNode** pending_out = nullptr) {
  std::vector<std::unique_ptr<BTNode>> cs;
  cs.push_back(leaf_for(a));
  cs.push_back(leaf_for(b));
  BehaviorTree t(kind == BTNode::Kind::Sequence ? BTNode::make_sequence(std::move(cs))
                                                : BTNode::make_fallback(std::move(cs)));
  TickResult r = t.tick(tiny_scene());
  if (pending_out) *pending_out = r.pending;
  return r.status;
}

}  // namespace

TEST_CASE("sequence truth table over all nine child-status pairs") {
  CHECK(tick_pair(BTNode::Kind::Sequence, 'S', 'S') == Status::Success);
  CHECK(tick_pair(BTNode::Kind::Sequence, 'S', 'F') == Status::Failure);
  CHECK(tick_pair(BTNode::Kind::Sequence, 'S', 'R') == Status::Running);
  CHECK(tick_pair(BTNode::Kind::Sequence, 'F', 'S') == Status::Failure);
  CHECK(tick_pair(BTNode::Kind::Sequence, 'F', 'F') == Status::Failure);
  CHECK(tick_pair(BTNode::Kind::Sequence, 'F', 'R') == Status::Failure);
  CHECK(tick_pair(BTNode::Kind::Sequence, 'R', 'S') == Status::Running);
  CHECK(tick_pair(BTNode::Kind::Sequence, 'R', 'F') == Status::Running);
  CHECK(tick_pair(BTNode::Kind::Sequence, 'R', 'R') == Status::Running);
}

TEST_CASE("fallback truth table over all nine child-status pairs") {
  CHECK(tick_pair(BTNode::Kind::Fallback, 'S', 'S') == Status::Success);
  CHECK(tick_pair(BTNode::Kind::Fallback, 'S', 'F') == Status::Success);
  CHECK(tick_pair(BTNode::Kind::Fallback, 'S', 'R') == Status::Success);
  CHECK(tick_pair(BTNode::Kind::Fallback, 'F', 'S') == Status::Success);
  CHECK(tick_pair(BTNode::Kind::Fallback, 'F', 'F') == Status::Failure);
  CHECK(tick_pair(BTNode::Kind::Fallback, 'F', 'R') == Status::Running);
  CHECK(tick_pair(BTNode::Kind::Fallback, 'R', 'S') == Status::Running);
  CHECK(tick_pair(BTNode::Kind::Fallback, 'R', 'F') == Status::Running);
  CHECK(tick_pair(BTNode::Kind::Fallback, 'R', 'R') == Status::Running);
}

TEST_CASE("short-circuit means the later action never becomes pending") {
  BTNode* pending = nullptr;
  CHECK(tick_pair(BTNode::Kind::Sequence, 'F', 'R', &pending) == Status::Failure);
  CHECK(pending == nullptr);
  CHECK(tick_pair(BTNode::Kind::Sequence, 'R', 'R', &pending) == Status::Running);
  REQUIRE(pending != nullptr);
  CHECK(pending->skill.name == "grasp");
  CHECK(tick_pair(BTNode::Kind::Fallback, 'S', 'R', &pending) == Status::Success);
  CHECK(pending == nullptr);
}

TEST_CASE("empty composites and empty trees have fixed verdicts") {
  BehaviorTree seq(BTNode::make_sequence({}));
  CHECK(seq.tick(tiny_scene()).status == Status::Success);
  BehaviorTree fb(BTNode::make_fallback({}));
  CHECK(fb.tick(tiny_scene()).status == Status::Failure);
  BehaviorTree empty;
  CHECK(empty.tick(tiny_scene()).status == Status::Success);
  CHECK(empty.render() == "(empty)\n");
}

TEST_CASE("marks force a condition to fail until cleared") {
  BehaviorTree t(BTNode::make_condition(parse_literal(kTrueLit)));
  CHECK(t.tick(tiny_scene()).status == Status::Success);
  t.mark_unsatisfied(parse_literal(kTrueLit));
  CHECK(t.tick(tiny_scene()).status == Status::Failure);
  t.clear_marks();
  CHECK(t.tick(tiny_scene()).status == Status::Success);
}

TEST_CASE("copying a tree clones structure and marks independently") {
  std::vector<std::unique_ptr<BTNode>> cs;
  cs.push_back(leaf_for('S'));
  cs.push_back(leaf_for('R'));
  BehaviorTree a(BTNode::make_sequence(std::move(cs)));
  a.mark_unsatisfied(parse_literal(kTrueLit));
  BehaviorTree b = a;
  CHECK(b.render() == a.render());
  CHECK(b.tick(tiny_scene()).status == Status::Failure);  // mark copied
  b.clear_marks();
  CHECK(b.tick(tiny_scene()).status == Status::Running);
  CHECK(a.tick(tiny_scene()).status == Status::Failure);  // original untouched
  CHECK(b.tick(tiny_scene()).pending != a.tick(tiny_scene()).pending);
}

namespace {

struct RandomTreeGen {
  std::mt19937 rng;
  int actions_made = 0;
  explicit RandomTreeGen(unsigned seed) : rng(seed) {}
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  std::unique_ptr<BTNode> gen(int depth) {
    int leaf_bias = depth >= 3 ? 3 : 1;
    int kind = pick(3 + leaf_bias);
    if (depth < 3 && kind == 0) {
      return compose(BTNode::Kind::Sequence, depth);
    }
    if (depth < 3 && kind == 1) {
      return compose(BTNode::Kind::Fallback, depth);
    }
    if (pick(4) == 0) {
      ++actions_made;
      return BTNode::make_action(GroundSkill{"grasp", {{"X", "black_cube"}}},
                                 {parse_literal(kFalseLit)});
    }
    return BTNode::make_condition(parse_literal(pick(2) == 0 ? kTrueLit : kFalseLit));
  }

  std::unique_ptr<BTNode> compose(BTNode::Kind kind, int depth) {
    std::vector<std::unique_ptr<BTNode>> cs;
    int n = pick(4);  // zero children allowed
    for (int i = 0; i < n; ++i) cs.push_back(gen(depth + 1));
    return kind == BTNode::Kind::Sequence ? BTNode::make_sequence(std::move(cs))
                                          : BTNode::make_fallback(std::move(cs));
  }
};

// Straightforward reference semantics, written independently of the tick
// implementation: returns status and the single action that would be pending.
Status reference_eval(const BTNode* node, const SceneGraph& scene, const BTNode** pending) {
  switch (node->kind) {
    case BTNode::Kind::Condition:
      return scene.satisfied(node->condition) ? Status::Success : Status::Failure;
    case BTNode::Kind::Action:
      *pending = node;
      return Status::Running;
    case BTNode::Kind::Sequence:
      for (const auto& c : node->children) {
        Status s = reference_eval(c.get(), scene, pending);
        if (s != Status::Success) return s;
      }
      return Status::Success;
    default:
      for (const auto& c : node->children) {
        Status s = reference_eval(c.get(), scene, pending);
        if (s != Status::Failure) return s;
      }
      return Status::Failure;
  }
}

int count_nodes(const BTNode* n) {
  int total = 1;
  for (const auto& c : n->children) total += count_nodes(c.get());
  return total;
}

}  // namespace

TEST_CASE("random trees: deterministic ticks, one pending action, reference agreement") {
  SceneGraph scene = tiny_scene();
  RandomTreeGen gen(977);
  int running_seen = 0;
  for (int i = 0; i < 500; ++i) {
    BehaviorTree tree(gen.gen(0));
    TickResult first = tree.tick(scene);
    TickResult second = tree.tick(scene);
    CHECK(first.status == second.status);
    CHECK(first.pending == second.pending);

    const BTNode* expected_pending = nullptr;
    Status expected = reference_eval(tree.root(), scene, &expected_pending);
    CHECK(first.status == expected);
    if (expected == Status::Running) {
      ++running_seen;
      CHECK(first.pending == expected_pending);
    } else {
      CHECK(first.pending == nullptr);
    }
    CHECK(count_nodes(tree.root()) >= 1);
  }
  CHECK(running_seen > 50);
}
