#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "btrec/literal.hpp"
#include "btrec/scene.hpp"
#include "btrec/skill.hpp"

namespace btrec {

enum class Status { Success, Failure, Running };
std::string to_string(Status s);

// Memoryless tree: every tick re-evaluates from the root. Action nodes never
// run their skill inside the tick; they surface as the tick's pending action
// and report Running. Running short-circuits composites, so a tick carries at
// most one pending action.
struct BTNode {
  enum class Kind { Sequence, Fallback, Condition, Action };
  Kind kind = Kind::Condition;

  // Condition
  Literal condition;
  bool expanded = false;  // backchaining already replaced this goal once

  // Action
  GroundSkill skill;
  std::vector<Literal> postconditions;  // ground, checked after execution

  std::vector<std::unique_ptr<BTNode>> children;

  static std::unique_ptr<BTNode> make_condition(Literal lit, bool expanded = false);
  static std::unique_ptr<BTNode> make_action(GroundSkill s, std::vector<Literal> posts);
  static std::unique_ptr<BTNode> make_sequence(std::vector<std::unique_ptr<BTNode>> cs);
  static std::unique_ptr<BTNode> make_fallback(std::vector<std::unique_ptr<BTNode>> cs);
  std::unique_ptr<BTNode> clone() const;
};

struct TickResult {
  Status status = Status::Failure;
  BTNode* pending = nullptr;  // action node reported Running, if any
};

class BehaviorTree {
 public:
  BehaviorTree() = default;
  explicit BehaviorTree(std::unique_ptr<BTNode> root) : root_(std::move(root)) {}
  BehaviorTree(const BehaviorTree& other);
  BehaviorTree& operator=(const BehaviorTree& other);
  BehaviorTree(BehaviorTree&&) = default;
  BehaviorTree& operator=(BehaviorTree&&) = default;

  BTNode* root() { return root_.get(); }
  const BTNode* root() const { return root_.get(); }
  std::unique_ptr<BTNode>& root_slot() { return root_; }

  TickResult tick(const SceneGraph& scene) const;

  // A marked literal evaluates Failure regardless of the scene until the mark
  // clears (on expansion of that condition, or after any executed skill).
  void mark_unsatisfied(const Literal& lit) { marks_.insert(lit); }
  void clear_mark(const Literal& lit) { marks_.erase(lit); }
  void clear_marks() { marks_.clear(); }
  const std::set<Literal>& marks() const { return marks_; }

  std::string render() const;

 private:
  Status tick_node(const BTNode* node, const SceneGraph& scene, BTNode** pending) const;

  std::unique_ptr<BTNode> root_;
  std::set<Literal> marks_;
};

}  // namespace btrec
