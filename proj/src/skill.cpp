#include "btrec/skill.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace btrec {

std::string GroundSkill::to_string() const {
  // Builtin param names are alphabetical in declaration order, so map order
  // matches signature order.
  std::ostringstream os;
  os << name;
  if (!binding.empty()) {
    os << '(';
    bool first = true;
    for (const auto& [var, val] : binding) {
      (void)var;
      if (!first) os << ", ";
      os << val;
      first = false;
    }
    os << ')';
  }
  return os.str();
}

void SkillCatalog::add_template(const SkillTemplate& t, bool latent) {
  if (find(t.name) || find_latent(t.name))
    throw SkillError("duplicate skill template '" + t.name + "'");
  (latent ? latent_ : active_).push_back(t);
}

const SkillTemplate* SkillCatalog::find(const std::string& name) const {
  for (const auto& t : active_)
    if (t.name == name) return &t;
  return nullptr;
}

const SkillTemplate* SkillCatalog::find_latent(const std::string& name) const {
  for (const auto& t : latent_)
    if (t.name == name) return &t;
  return nullptr;
}

void SkillCatalog::admit_latent(const std::string& name) {
  auto it = std::find_if(latent_.begin(), latent_.end(),
                         [&](const SkillTemplate& t) { return t.name == name; });
  if (it == latent_.end()) throw SkillError("no latent skill '" + name + "'");
  active_.push_back(*it);
  latent_.erase(it);
}

void SkillCatalog::add_precondition_override(const std::string& skill, const Literal& lit) {
  if (!find(skill)) throw SkillError("no active skill '" + skill + "' to extend");
  auto& list = overrides_[skill];
  if (std::find(list.begin(), list.end(), lit) == list.end()) list.push_back(lit);
}

const std::vector<Literal>& SkillCatalog::overrides_of(const std::string& skill) const {
  static const std::vector<Literal> empty;
  auto it = overrides_.find(skill);
  return it == overrides_.end() ? empty : it->second;
}

GroundSkillSpec SkillCatalog::instantiate(const std::string& name, const Binding& binding) const {
  const SkillTemplate* t = find(name);
  if (!t) throw SkillError("no active skill '" + name + "'");
  for (const ParamSpec& p : t->params)
    if (!binding.count(p.name))
      throw SkillError("missing binding for parameter " + p.name + " of " + name);
  GroundSkillSpec spec;
  spec.skill = GroundSkill{name, binding};
  for (const Literal& l : overrides_of(name)) spec.preconditions.push_back(substitute(l, binding));
  for (const Literal& l : t->preconditions) spec.preconditions.push_back(substitute(l, binding));
  for (const Literal& l : t->postconditions) spec.postconditions.push_back(substitute(l, binding));
  return spec;
}

bool SkillCatalog::param_ok(const ParamSpec& spec, const std::string& object_id,
                            const SceneGraph& scene) const {
  const SceneObject* obj = scene.object(object_id);
  if (!obj) return false;
  if (!spec.classes.empty() &&
      std::find(spec.classes.begin(), spec.classes.end(), obj->object_class) == spec.classes.end())
    return false;
  for (const std::string& attr : spec.required_attributes)
    if (!scene.satisfied(Literal{attr, {Term::constant(object_id)}, false})) return false;
  return true;
}

namespace {

// (binding, matched-through-achieve-pattern) candidates before completion.
using Partial = std::pair<Binding, bool>;

}  // namespace

std::vector<GroundSkillSpec> SkillCatalog::achievers_from(const SkillTemplate& t,
                                                          const Literal& goal,
                                                          const SceneGraph& scene) const {
  std::vector<Partial> partials;
  for (const Literal& post : t.postconditions)
    if (auto b = unify(post, goal)) partials.emplace_back(*b, false);
  for (const Literal& pat : t.achieve_patterns)
    if (auto b = unify(pat, goal)) partials.emplace_back(*b, true);

  std::vector<Partial> complete;
  for (const auto& [partial, via_pattern] : partials) {
    bool bound_ok = true;
    for (const ParamSpec& p : t.params) {
      auto it = partial.find(p.name);
      if (it != partial.end() && !param_ok(p, it->second, scene)) {
        bound_ok = false;
        break;
      }
    }
    if (!bound_ok) continue;
    std::vector<Binding> frontier = {partial};
    for (const ParamSpec& p : t.params) {
      if (partial.count(p.name)) continue;
      std::vector<Binding> next;
      for (const auto& [id, obj] : scene.objects()) {
        (void)obj;
        if (!param_ok(p, id, scene)) continue;
        for (Binding b : frontier) {
          b.emplace(p.name, id);
          next.push_back(std::move(b));
        }
      }
      frontier = std::move(next);
    }
    for (Binding& b : frontier) complete.emplace_back(std::move(b), via_pattern);
  }

  std::sort(complete.begin(), complete.end(),
            [](const Partial& a, const Partial& b) { return a.first < b.first; });
  std::vector<GroundSkillSpec> out;
  std::set<Binding> seen;
  for (const auto& [binding, via_pattern] : complete) {
    (void)via_pattern;
    if (!seen.insert(binding).second) continue;
    GroundSkillSpec spec = instantiate(t.name, binding);
    if (std::find(spec.postconditions.begin(), spec.postconditions.end(), goal) ==
        spec.postconditions.end())
      spec.postconditions.push_back(goal);
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<GroundSkillSpec> SkillCatalog::achievers(const Literal& goal,
                                                     const SceneGraph& scene) const {
  std::vector<GroundSkillSpec> out;
  for (const SkillTemplate& t : active_) {
    auto found = achievers_from(t, goal, scene);
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

std::vector<std::string> SkillCatalog::latent_achievers(const Literal& goal,
                                                        const SceneGraph& scene) const {
  std::vector<std::string> out;
  for (const SkillTemplate& t : latent_) {
    // Matching reuses the active-path machinery; instantiate() needs the
    // template visible, so probe on a copy with the template admitted.
    SkillCatalog probe;
    probe.add_template(t);
    if (!probe.achievers_from(t, goal, scene).empty()) out.push_back(t.name);
  }
  return out;
}

namespace {

std::vector<Literal> parse_all(const std::vector<std::string>& texts) {
  std::vector<Literal> out;
  for (const auto& s : texts) out.push_back(parse_literal(s));
  return out;
}

}  // namespace

SkillCatalog builtin_catalog() {
  SkillCatalog cat;
  cat.add_template(SkillTemplate{
      "grasp",
      {{"X", {"cube", "peg"}, {"pickable"}}},
      parse_all({"hand_empty", "reachable(X)", "pickable(X)"}),
      parse_all({"held(X)"}),
      parse_all({"~on(X, _)", "~inside(X, _)"}),
      "grasp",
  });
  cat.add_template(SkillTemplate{
      "place_on",
      {{"X", {"cube", "peg"}, {}}, {"Y", {"zone"}, {}}},
      // reachable(Y) precedes held(X): conditions that may demand an empty
      // gripper to fix must sit left of the one that fills the gripper, or
      // the tree regrasps forever after every putdown.
      parse_all({"reachable(Y)", "held(X)"}),
      parse_all({"on(X, Y)", "~held(X)"}),
      {},
      "place_on",
  });
  cat.add_template(SkillTemplate{
      "place_inside",
      {{"X", {"cube", "peg"}, {}}, {"Y", {"hole", "drawer", "bin"}, {"container"}}},
      parse_all({"reachable(Y)", "held(X)"}),
      parse_all({"inside(X, Y)", "~held(X)"}),
      {},
      "place_inside",
  });
  cat.add_template(SkillTemplate{
      "open_drawer",
      {{"D", {"drawer"}, {}}},
      parse_all({"hand_empty"}),
      parse_all({"reachable(D)"}),
      {},
      "open_drawer",
  });
  cat.add_template(SkillTemplate{
      "close_drawer",
      {{"D", {"drawer"}, {}}},
      {},
      parse_all({"~reachable(D)"}),
      {},
      "close_drawer",
  });
  cat.add_template(
      SkillTemplate{
          "push",
          {{"X", {"cube", "peg"}, {}}, {"Z", {"zone"}, {}}},
          parse_all({"hand_empty", "reachable(X)"}),
          parse_all({"at(X, Z)"}),
          parse_all({"~on(X, _)", "~inside(X, _)"}),
          "push",
      },
      /*latent=*/true);
  return cat;
}

}  // namespace btrec
