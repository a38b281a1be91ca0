#pragma once

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace btrec {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TermKind { Constant, Variable, Wildcard };

// A term names an object/zone, a to-be-bound variable, or matches anything.
// Wildcards are legal only in patterns; a ground literal contains none.
struct Term {
  TermKind kind = TermKind::Constant;
  std::string name;  // empty for wildcards

  static Term constant(std::string n) { return {TermKind::Constant, std::move(n)}; }
  static Term variable(std::string n) { return {TermKind::Variable, std::move(n)}; }
  static Term wildcard() { return {TermKind::Wildcard, ""}; }

  auto operator<=>(const Term&) const = default;
};

struct Literal {
  std::string predicate;
  std::vector<Term> args;
  bool negated = false;

  bool is_ground() const;
  Literal negation() const;
  std::string to_string() const;

  auto operator<=>(const Literal&) const = default;
};

enum class PredicateCategory { Base, Derived, Attribute };

struct PredicateInfo {
  std::string name;
  int arity;
  PredicateCategory category;
};

// Closed vocabulary. Base relations are storable scene facts; derived
// predicates are computed on demand and never stored; attribute predicates
// read per-object flags.
const std::vector<PredicateInfo>& vocabulary();
const PredicateInfo* find_predicate(const std::string& name);

using Binding = std::map<std::string, std::string>;  // variable -> constant

// Surface syntax: [~]predicate or [~]predicate(arg{,arg}*).
// Lowercase-initial identifiers are constants, uppercase-initial are
// variables, a lone underscore is a wildcard. Unknown predicates and arity
// mismatches are rejected.
Literal parse_literal(const std::string& text);

// Matches a pattern literal (may hold variables/wildcards) against a ground
// literal. Repeated variables must bind consistently; wildcards match
// anything and bind nothing.
std::optional<Binding> unify(const Literal& pattern, const Literal& ground);

// Replaces variables by their bound constants. Unbound variables throw;
// wildcards are preserved.
Literal substitute(const Literal& pattern, const Binding& binding);

bool contains_wildcard(const Literal& lit);

std::string to_string(const std::vector<Literal>& lits, const std::string& sep = ", ");

}  // namespace btrec
