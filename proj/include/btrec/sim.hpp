#pragma once

#include <optional>
#include <string>
#include <vector>

#include "btrec/bt.hpp"
#include "btrec/scene.hpp"
#include "btrec/skill.hpp"

namespace btrec {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FaultTrigger {
  enum class Phase { PreExecution, AtTick, BeforeSkill, AfterSkill };
  Phase phase = Phase::PreExecution;
  int ordinal = 0;  // tick number for AtTick, execution count for *Skill
  std::string to_string() const;
};

// A fault either edits the scene when its trigger fires, or arms a physics
// override that the next execution of the named skill consumes.
struct SkillOverride {
  std::string skill;
  std::string kind;  // land-on-top | slip | miss-onto
  std::string arg;   // miss-onto landing zone
};

struct Fault {
  FaultTrigger trigger;
  std::optional<SceneEdit> edit;
  std::optional<SkillOverride> override_;
  bool fired = false;
};

struct Scenario {
  std::string name;
  std::string task;
  std::vector<std::string> tags;
  std::string requires_skill;  // latent skill the task cannot succeed without
  std::string catalog_name = "builtin";
  std::vector<SceneObject> objects;
  std::vector<Literal> relations;
  std::vector<Literal> goals;
  std::vector<Fault> faults;
  bool has_tag(const std::string& t) const;
  SceneGraph initial_scene() const;
};

Scenario parse_scenario(const std::string& text, const std::string& name_hint = "");
Scenario load_scenario(const std::string& path);
SkillCatalog make_catalog(const std::string& name);

struct PhysicsViolation {
  std::string kind;  // occupied_target | blocked_drawer
  GroundSkill skill;
  std::string target;
  bool operator==(const PhysicsViolation&) const = default;
};

// What would go wrong if the skill ran now, preconditions aside. Pure.
std::optional<PhysicsViolation> predict_violation(const SceneGraph& scene,
                                                  const GroundSkill& skill);

struct ExecOutcome {
  Status status = Status::Failure;  // Success or Failure, never Running
  bool degraded = false;            // ran but landed off the nominal effect
  std::optional<PhysicsViolation> violation;
  SceneDiff diff;
  std::string note;
};

struct FaultApplication {
  std::string description;
  SceneDiff diff;
};

// Owns the true scene and the scenario's fault schedule.
class World {
 public:
  explicit World(const Scenario& s);

  const SceneGraph& scene() const { return scene_; }
  SceneGraph& scene() { return scene_; }

  ExecOutcome execute(const GroundSkill& skill);
  int executions() const { return executions_; }

  // Fires unfired faults matching the trigger. Scene edits come back for the
  // caller's records; override arming is silent by design.
  std::vector<FaultApplication> fire_faults(FaultTrigger::Phase phase, int ordinal);

 private:
  std::optional<SkillOverride> consume_override(const std::string& skill);

  SceneGraph scene_;
  std::vector<Fault> faults_;
  std::vector<SkillOverride> armed_;
  int executions_ = 0;
};

// Physics for one skill against the given scene, override-free. Shared by
// World::execute and reasoner rollouts.
ExecOutcome execute_physics(SceneGraph& scene, const GroundSkill& skill,
                            const std::optional<SkillOverride>& override_);

}  // namespace btrec
