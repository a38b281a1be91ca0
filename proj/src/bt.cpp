#include "btrec/bt.hpp"

#include <sstream>

namespace btrec {

std::string to_string(Status s) {
  switch (s) {
    case Status::Success: return "success";
    case Status::Failure: return "failure";
    case Status::Running: return "running";
  }
  return "?";
}

std::unique_ptr<BTNode> BTNode::make_condition(Literal lit, bool expanded) {
  auto n = std::make_unique<BTNode>();
  n->kind = Kind::Condition;
  n->condition = std::move(lit);
  n->expanded = expanded;
  return n;
}

std::unique_ptr<BTNode> BTNode::make_action(GroundSkill s, std::vector<Literal> posts) {
  auto n = std::make_unique<BTNode>();
  n->kind = Kind::Action;
  n->skill = std::move(s);
  n->postconditions = std::move(posts);
  return n;
}

std::unique_ptr<BTNode> BTNode::make_sequence(std::vector<std::unique_ptr<BTNode>> cs) {
  auto n = std::make_unique<BTNode>();
  n->kind = Kind::Sequence;
  n->children = std::move(cs);
  return n;
}

std::unique_ptr<BTNode> BTNode::make_fallback(std::vector<std::unique_ptr<BTNode>> cs) {
  auto n = std::make_unique<BTNode>();
  n->kind = Kind::Fallback;
  n->children = std::move(cs);
  return n;
}

std::unique_ptr<BTNode> BTNode::clone() const {
  auto n = std::make_unique<BTNode>();
  n->kind = kind;
  n->condition = condition;
  n->expanded = expanded;
  n->skill = skill;
  n->postconditions = postconditions;
  for (const auto& c : children) n->children.push_back(c->clone());
  return n;
}

BehaviorTree::BehaviorTree(const BehaviorTree& other) : marks_(other.marks_) {
  if (other.root_) root_ = other.root_->clone();
}

BehaviorTree& BehaviorTree::operator=(const BehaviorTree& other) {
  if (this == &other) return *this;
  root_ = other.root_ ? other.root_->clone() : nullptr;
  marks_ = other.marks_;
  return *this;
}

Status BehaviorTree::tick_node(const BTNode* node, const SceneGraph& scene,
                               BTNode** pending) const {
  switch (node->kind) {
    case BTNode::Kind::Condition:
      if (marks_.count(node->condition)) return Status::Failure;
      return scene.satisfied(node->condition) ? Status::Success : Status::Failure;
    case BTNode::Kind::Action:
      *pending = const_cast<BTNode*>(node);
      return Status::Running;
    case BTNode::Kind::Sequence:
      for (const auto& c : node->children) {
        Status s = tick_node(c.get(), scene, pending);
        if (s != Status::Success) return s;
      }
      return Status::Success;
    case BTNode::Kind::Fallback:
      for (const auto& c : node->children) {
        Status s = tick_node(c.get(), scene, pending);
        if (s != Status::Failure) return s;
      }
      return Status::Failure;
  }
  return Status::Failure;
}

TickResult BehaviorTree::tick(const SceneGraph& scene) const {
  TickResult r;
  if (!root_) {
    r.status = Status::Success;
    return r;
  }
  r.status = tick_node(root_.get(), scene, &r.pending);
  return r;
}

namespace {

void render_node(const BTNode* node, const std::string& prefix, bool last, bool is_root,
                 const std::set<Literal>& marks, std::ostringstream& os) {
  std::string line_prefix = is_root ? "" : prefix + (last ? "`- " : "|- ");
  std::string child_prefix = is_root ? "" : prefix + (last ? "   " : "|  ");
  os << line_prefix;
  switch (node->kind) {
    case BTNode::Kind::Sequence: os << "Sequence"; break;
    case BTNode::Kind::Fallback: os << "Fallback"; break;
    case BTNode::Kind::Condition:
      os << node->condition.to_string();
      if (node->expanded) os << " [expanded]";
      if (marks.count(node->condition)) os << " [marked]";
      break;
    case BTNode::Kind::Action:
      os << "Action " << node->skill.to_string();
      break;
  }
  os << '\n';
  for (size_t i = 0; i < node->children.size(); ++i)
    render_node(node->children[i].get(), child_prefix, i + 1 == node->children.size(), false,
                marks, os);
}

}  // namespace

std::string BehaviorTree::render() const {
  if (!root_) return "(empty)\n";
  std::ostringstream os;
  render_node(root_.get(), "", true, true, marks_, os);
  return os.str();
}

}  // namespace btrec
