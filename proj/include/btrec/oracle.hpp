#pragma once

#include "btrec/verdict.hpp"

namespace btrec {

// Ground-truth reasoner: answers every check from the true scene and the
// simulator's own physics rules. Pre-execution screening replans with the
// caller's catalog and steps the plan through physics on a scratch scene,
// stopping at the first rule violation.
class OracleReasoner : public Reasoner {
 public:
  OracleReasoner(int max_expansions = 25, int max_ticks = 200)
      : max_expansions_(max_expansions), max_ticks_(max_ticks) {}
  Verdict check(const CheckRequest& req) override;
  std::string name() const override { return "oracle"; }

 private:
  Verdict check_pre_execution(const CheckRequest& req);
  Verdict check_precondition_verify(const CheckRequest& req);
  Verdict check_postcondition_verify(const CheckRequest& req);
  Verdict check_precondition_suggest(const CheckRequest& req);
  Verdict check_skill_suggest(const CheckRequest& req);

  int max_expansions_;
  int max_ticks_;
};

// Rewrites a ground literal to parameter form by mapping argument constants
// back through the culprit binding; constants outside the binding stay.
Literal generalize_through_binding(const Literal& ground, const Binding& culprit);

}  // namespace btrec
