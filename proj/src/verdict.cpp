#include "btrec/verdict.hpp"

#include <sstream>

namespace btrec {

std::string to_string(CheckKind k) {
  switch (k) {
    case CheckKind::PreExecution: return "pre_execution";
    case CheckKind::PreconditionVerify: return "precondition_verify";
    case CheckKind::PostconditionVerify: return "postcondition_verify";
    case CheckKind::PreconditionSuggest: return "precondition_suggest";
    case CheckKind::SkillSuggest: return "skill_suggest";
  }
  return "?";
}

std::optional<CheckKind> check_kind_from(const std::string& s) {
  for (CheckKind k : {CheckKind::PreExecution, CheckKind::PreconditionVerify,
                      CheckKind::PostconditionVerify, CheckKind::PreconditionSuggest,
                      CheckKind::SkillSuggest})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::string to_string(Correction::Type t) {
  switch (t) {
    case Correction::Type::MarkUnsatisfied: return "mark_unsatisfied";
    case Correction::Type::ReportSkillFailure: return "report_skill_failure";
    case Correction::Type::AddPrecondition: return "add_precondition";
    case Correction::Type::AddSkill: return "add_skill";
  }
  return "?";
}

std::optional<Correction::Type> correction_type_from(const std::string& s) {
  for (Correction::Type t :
       {Correction::Type::MarkUnsatisfied, Correction::Type::ReportSkillFailure,
        Correction::Type::AddPrecondition, Correction::Type::AddSkill})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

std::string Verdict::summary() const {
  std::ostringstream os;
  os << to_string(kind) << ": ";
  if (!detected) {
    os << "clean";
    return os.str();
  }
  os << "detected";
  if (identification) os << " [" << identification->skill << "] " << identification->cause;
  if (correction) {
    os << " -> " << to_string(correction->type);
    switch (correction->type) {
      case Correction::Type::MarkUnsatisfied:
        os << ' ' << btrec::to_string(correction->unsatisfied);
        break;
      case Correction::Type::ReportSkillFailure:
        os << ' ' << correction->skill;
        break;
      case Correction::Type::AddPrecondition:
        os << ' ' << correction->skill << " += " << correction->precondition.to_string();
        break;
      case Correction::Type::AddSkill:
        os << ' ' << correction->skill;
        break;
    }
  }
  return os.str();
}

}  // namespace btrec
