#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "btrec/literal.hpp"

namespace btrec {

struct SceneError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string>& object_classes();

struct SceneObject {
  std::string id;
  std::string object_class;  // one of object_classes()
  std::string color;
  bool pickable = false;
  bool container = false;
  bool reachable = false;
  bool operator==(const SceneObject&) const = default;
};

struct SceneEdit {
  enum class Kind { AddObject, RemoveObject, AddRelation, RemoveRelation, SetAttribute };
  Kind kind = Kind::AddRelation;
  SceneObject object;     // AddObject
  std::string object_id;  // RemoveObject, SetAttribute
  Literal relation;       // AddRelation, RemoveRelation
  std::string attribute;  // SetAttribute
  bool value = false;     // SetAttribute
  std::string to_string() const;
};

// Textual forms:
//   add <literal>            add-object <id> <class> <color> [pickable] [container] [reachable]
//   remove <literal>         remove-object <id>
//   set <attr>(<id>) true|false
SceneEdit parse_scene_edit(const std::string& text);

// Positive ground base relations over typed objects. Each object carries at
// most one location descriptor (held/on/inside/at); adding one replaces the
// previous. All edits validate fully before mutating.
class SceneGraph {
 public:
  void apply(const SceneEdit& edit);

  void add_object(const SceneObject& obj);
  void remove_object(const std::string& id);
  void add_relation(const Literal& rel);
  void remove_relation(const Literal& rel);
  void set_attribute(const std::string& id, const std::string& attr, bool value);

  bool has_object(const std::string& id) const;
  const SceneObject* object(const std::string& id) const;
  const std::map<std::string, SceneObject>& objects() const { return objects_; }
  const std::set<Literal>& relations() const { return relations_; }
  std::uint64_t revision() const { return revision_; }

  // Evaluates a literal (wildcards allowed, variables not). Base relations by
  // membership, attributes from object flags, occupied/hand_empty computed.
  bool satisfied(const Literal& lit) const;
  bool satisfied_all(const std::vector<Literal>& lits) const;

  // Objects of the given class (id-lexicographic order).
  std::vector<std::string> objects_of_class(const std::string& cls) const;
  std::vector<Literal> relations_about(const std::string& id) const;
  std::string held_object() const;  // empty if gripper free

  bool operator==(const SceneGraph& other) const {
    return objects_ == other.objects_ && relations_ == other.relations_;
  }

 private:
  void check_relation_shape(const Literal& rel) const;
  bool positive_base_holds(const Literal& ground) const;

  std::map<std::string, SceneObject> objects_;
  std::set<Literal> relations_;
  std::uint64_t revision_ = 0;
};

// Rewrites a failed derived condition into the base-literal negations that
// falsify it in this scene: ~occupied(c) yields one negation per occupant
// relation, hand_empty yields ~held(o) for the held object.
std::vector<Literal> ground_derived_negation(const SceneGraph& scene, const Literal& lit);

// Exact delta between two scenes sharing object identities. Attribute flips
// travel as attribute-literal adds/removes; new objects carry full payloads.
struct SceneDiff {
  std::uint64_t from_revision = 0;
  std::uint64_t to_revision = 0;
  std::vector<SceneObject> added_objects;       // sorted by id
  std::vector<std::string> removed_objects;     // sorted
  std::vector<Literal> added_relations;         // sorted, base + attribute literals
  std::vector<Literal> removed_relations;       // sorted
  bool empty() const {
    return added_objects.empty() && removed_objects.empty() && added_relations.empty() &&
           removed_relations.empty();
  }
  bool operator==(const SceneDiff&) const = default;
};

SceneDiff diff_scenes(const SceneGraph& from, const SceneGraph& to);
void apply_diff(SceneGraph& scene, const SceneDiff& diff);

// Canonical text form: sorted objects then sorted relations, revision omitted.
std::string serialize_scene(const SceneGraph& scene);

}  // namespace btrec
