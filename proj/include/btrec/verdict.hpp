#pragma once

#include <optional>
#include <string>
#include <vector>

#include "btrec/literal.hpp"
#include "btrec/scene.hpp"
#include "btrec/skill.hpp"

namespace btrec {

enum class CheckKind {
  PreExecution,         // whole-plan screening before anything runs
  PreconditionVerify,   // pending skill's stated preconditions vs the scene
  PostconditionVerify,  // executed skill's stated postconditions vs the scene
  PreconditionSuggest,  // pending skill would misbehave: name the missing guard
  SkillSuggest,         // backchaining dead-ends: name a latent capability
};
std::string to_string(CheckKind k);
std::optional<CheckKind> check_kind_from(const std::string& s);

struct Identification {
  std::string skill;  // template name implicated
  Binding culprit;    // binding of the implicated instance
  std::string cause;
  bool operator==(const Identification&) const = default;
};

struct Correction {
  enum class Type { MarkUnsatisfied, ReportSkillFailure, AddPrecondition, AddSkill };
  Type type = Type::MarkUnsatisfied;
  std::vector<Literal> unsatisfied;  // MarkUnsatisfied
  std::string skill;                 // AddPrecondition target, AddSkill name, failed skill
  Literal precondition;              // AddPrecondition, ground form
  bool operator==(const Correction&) const = default;
};
std::string to_string(Correction::Type t);
std::optional<Correction::Type> correction_type_from(const std::string& s);

// detected=false carries nothing else; detected=true carries both fields.
struct Verdict {
  CheckKind kind = CheckKind::PreExecution;
  bool detected = false;
  std::optional<Identification> identification;
  std::optional<Correction> correction;
  std::string summary() const;
};

struct CheckRequest {
  CheckKind kind = CheckKind::PreExecution;
  const SceneGraph* scene = nullptr;
  const SkillCatalog* catalog = nullptr;
  std::string task;
  std::vector<Literal> goals;
  // Skill-scoped checks:
  GroundSkill skill;
  std::vector<Literal> preconditions;
  std::vector<Literal> postconditions;
  // SkillSuggest:
  Literal unachievable;
  // Recent activity, most recent last, for reasoners that want narrative.
  std::vector<std::string> recent_events;
};

class Reasoner {
 public:
  virtual ~Reasoner() = default;
  virtual Verdict check(const CheckRequest& req) = 0;
  virtual std::string name() const = 0;
};

}  // namespace btrec
