#pragma once

#include <optional>
#include <string>
#include <vector>

#include "btrec/literal.hpp"
#include "btrec/scene.hpp"

namespace btrec {

struct SkillError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parameter slot: the bound object must belong to one of the listed classes
// and carry every listed attribute at bind time.
struct ParamSpec {
  std::string name;  // uppercase variable
  std::vector<std::string> classes;
  std::vector<std::string> required_attributes;
};

struct SkillTemplate {
  std::string name;
  std::vector<ParamSpec> params;
  std::vector<Literal> preconditions;    // parameter form
  std::vector<Literal> postconditions;   // parameter form
  // Extra effects offered for goal matching but too unspecific to verify as
  // written; a matched goal is appended to the ground postconditions instead.
  std::vector<Literal> achieve_patterns;
  std::string effect_rule;  // simulator binding
};

struct GroundSkill {
  std::string name;
  Binding binding;
  std::string to_string() const;  // grasp(black_cube)
  bool operator==(const GroundSkill&) const = default;
  auto operator<=>(const GroundSkill&) const = default;
};

struct GroundSkillSpec {
  GroundSkill skill;
  std::vector<Literal> preconditions;   // overrides first, then template order
  std::vector<Literal> postconditions;
};

class SkillCatalog {
 public:
  void add_template(const SkillTemplate& t, bool latent = false);
  const SkillTemplate* find(const std::string& name) const;
  const SkillTemplate* find_latent(const std::string& name) const;
  const std::vector<SkillTemplate>& active() const { return active_; }
  const std::vector<SkillTemplate>& latent() const { return latent_; }

  // Moves the named latent template to the end of the active list.
  void admit_latent(const std::string& name);

  // Param-form extra precondition attached to the named active skill.
  void add_precondition_override(const std::string& skill, const Literal& lit);
  const std::vector<Literal>& overrides_of(const std::string& skill) const;

  GroundSkillSpec instantiate(const std::string& name, const Binding& binding) const;

  // Ground skills whose postconditions or achieve patterns unify with the
  // goal, unbound params enumerated over qualifying scene objects. Ordered by
  // active-list position, then binding.
  std::vector<GroundSkillSpec> achievers(const Literal& goal, const SceneGraph& scene) const;

  // Latent template names that could achieve the goal (same matching rule).
  std::vector<std::string> latent_achievers(const Literal& goal, const SceneGraph& scene) const;

 private:
  bool param_ok(const ParamSpec& spec, const std::string& object_id,
                const SceneGraph& scene) const;
  std::vector<GroundSkillSpec> achievers_from(const SkillTemplate& t, const Literal& goal,
                                              const SceneGraph& scene) const;

  std::vector<SkillTemplate> active_;
  std::vector<SkillTemplate> latent_;
  std::map<std::string, std::vector<Literal>> overrides_;
};

// Tabletop skill set: grasp, place_on, place_inside, open_drawer,
// close_drawer active; push latent. place_inside ships without an
// occupancy guard; discovering one is part of normal operation.
SkillCatalog builtin_catalog();

}  // namespace btrec
