#include "btrec/literal.hpp"

#include <cctype>
#include <sstream>

namespace btrec {

bool Literal::is_ground() const {
  for (const auto& t : args)
    if (t.kind != TermKind::Constant) return false;
  return true;
}

Literal Literal::negation() const {
  Literal out = *this;
  out.negated = !negated;
  return out;
}

std::string Literal::to_string() const {
  std::ostringstream os;
  if (negated) os << '~';
  os << predicate;
  if (!args.empty()) {
    os << '(';
    for (size_t i = 0; i < args.size(); ++i) {
      if (i) os << ", ";
      os << (args[i].kind == TermKind::Wildcard ? "_" : args[i].name);
    }
    os << ')';
  }
  return os.str();
}

const std::vector<PredicateInfo>& vocabulary() {
  static const std::vector<PredicateInfo> v = {
      {"on", 2, PredicateCategory::Base},
      {"inside", 2, PredicateCategory::Base},
      {"held", 1, PredicateCategory::Base},
      {"at", 2, PredicateCategory::Base},
      {"occupied", 1, PredicateCategory::Derived},
      {"hand_empty", 0, PredicateCategory::Derived},
      {"pickable", 1, PredicateCategory::Attribute},
      {"container", 1, PredicateCategory::Attribute},
      {"reachable", 1, PredicateCategory::Attribute},
  };
  return v;
}

const PredicateInfo* find_predicate(const std::string& name) {
  for (const auto& p : vocabulary())
    if (p.name == name) return &p;
  return nullptr;
}

namespace {

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct Cursor {
  const std::string& s;
  size_t i = 0;
  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool done() const { return i >= s.size(); }
  char peek() const { return s[i]; }
};

std::string read_ident(Cursor& c) {
  c.skip_ws();
  size_t start = c.i;
  while (!c.done() && ident_char(c.peek())) ++c.i;
  if (c.i == start) throw ParseError("expected identifier at position " + std::to_string(start) + " in '" + c.s + "'");
  return c.s.substr(start, c.i - start);
}

Term term_from_ident(const std::string& id) {
  if (id == "_") return Term::wildcard();
  if (std::isupper(static_cast<unsigned char>(id[0]))) return Term::variable(id);
  return Term::constant(id);
}

}  // namespace

Literal parse_literal(const std::string& text) {
  Cursor c{text};
  c.skip_ws();
  Literal lit;
  if (!c.done() && c.peek() == '~') {
    lit.negated = true;
    ++c.i;
  }
  lit.predicate = read_ident(c);
  c.skip_ws();
  if (!c.done() && c.peek() == '(') {
    ++c.i;
    c.skip_ws();
    if (!c.done() && c.peek() == ')') throw ParseError("empty argument list in '" + text + "'");
    while (true) {
      lit.args.push_back(term_from_ident(read_ident(c)));
      c.skip_ws();
      if (c.done()) throw ParseError("unterminated argument list in '" + text + "'");
      if (c.peek() == ',') {
        ++c.i;
        continue;
      }
      if (c.peek() == ')') {
        ++c.i;
        break;
      }
      throw ParseError("unexpected character '" + std::string(1, c.peek()) + "' in '" + text + "'");
    }
  }
  c.skip_ws();
  if (!c.done()) throw ParseError("trailing text after literal in '" + text + "'");

  const PredicateInfo* info = find_predicate(lit.predicate);
  if (!info) throw ParseError("unknown predicate '" + lit.predicate + "'");
  if (static_cast<int>(lit.args.size()) != info->arity)
    throw ParseError("predicate '" + lit.predicate + "' expects " + std::to_string(info->arity) +
                     " arguments, got " + std::to_string(lit.args.size()));
  return lit;
}

std::optional<Binding> unify(const Literal& pattern, const Literal& ground) {
  if (pattern.predicate != ground.predicate || pattern.negated != ground.negated ||
      pattern.args.size() != ground.args.size())
    return std::nullopt;
  Binding b;
  for (size_t i = 0; i < pattern.args.size(); ++i) {
    const Term& p = pattern.args[i];
    const Term& g = ground.args[i];
    if (g.kind != TermKind::Constant) return std::nullopt;
    switch (p.kind) {
      case TermKind::Constant:
        if (p.name != g.name) return std::nullopt;
        break;
      case TermKind::Variable: {
        auto it = b.find(p.name);
        if (it == b.end())
          b.emplace(p.name, g.name);
        else if (it->second != g.name)
          return std::nullopt;
        break;
      }
      case TermKind::Wildcard:
        break;
    }
  }
  return b;
}

Literal substitute(const Literal& pattern, const Binding& binding) {
  Literal out = pattern;
  for (auto& t : out.args) {
    if (t.kind == TermKind::Variable) {
      auto it = binding.find(t.name);
      if (it == binding.end()) throw ParseError("unbound variable '" + t.name + "' in " + pattern.to_string());
      t = Term::constant(it->second);
    }
  }
  return out;
}

bool contains_wildcard(const Literal& lit) {
  for (const auto& t : lit.args)
    if (t.kind == TermKind::Wildcard) return true;
  return false;
}

std::string to_string(const std::vector<Literal>& lits, const std::string& sep) {
  std::ostringstream os;
  for (size_t i = 0; i < lits.size(); ++i) {
    if (i) os << sep;
    os << lits[i].to_string();
  }
  return os.str();
}

}  // namespace btrec
