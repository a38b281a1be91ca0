#include "btrec/scene.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace btrec {

const std::vector<std::string>& object_classes() {
  static const std::vector<std::string> v = {"cube", "peg", "hole", "drawer", "bin", "zone"};
  return v;
}

namespace {

const std::vector<std::string> kLocationPreds = {"held", "on", "inside", "at"};

bool is_location_pred(const std::string& p) {
  return std::find(kLocationPreds.begin(), kLocationPreds.end(), p) != kLocationPreds.end();
}

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::string> words;
  std::string w;
  while (is >> w) words.push_back(w);
  return words;
}

std::string join_from(const std::vector<std::string>& words, size_t first, size_t last) {
  std::string out;
  for (size_t i = first; i < last; ++i) {
    if (!out.empty()) out += ' ';
    out += words[i];
  }
  return out;
}

// Edits speak one error dialect; literal syntax problems surface as SceneError.
Literal parse_edit_literal(const std::string& text, const std::string& edit) {
  try {
    return parse_literal(text);
  } catch (const ParseError& e) {
    throw SceneError(std::string(e.what()) + " in scene edit '" + edit + "'");
  }
}

}  // namespace

std::string SceneEdit::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::AddObject:
      os << "add-object " << object.id << ' ' << object.object_class << ' ' << object.color;
      if (object.pickable) os << " pickable";
      if (object.container) os << " container";
      if (object.reachable) os << " reachable";
      break;
    case Kind::RemoveObject:
      os << "remove-object " << object_id;
      break;
    case Kind::AddRelation:
      os << "add " << relation.to_string();
      break;
    case Kind::RemoveRelation:
      os << "remove " << relation.to_string();
      break;
    case Kind::SetAttribute:
      os << "set " << attribute << '(' << object_id << ") " << (value ? "true" : "false");
      break;
  }
  return os.str();
}

SceneEdit parse_scene_edit(const std::string& text) {
  auto words = split_words(text);
  if (words.empty()) throw SceneError("empty scene edit");
  SceneEdit e;
  const std::string& cmd = words[0];
  if (cmd == "add" || cmd == "remove") {
    if (words.size() < 2) throw SceneError("missing literal in scene edit '" + text + "'");
    e.kind = cmd == "add" ? SceneEdit::Kind::AddRelation : SceneEdit::Kind::RemoveRelation;
    e.relation = parse_edit_literal(join_from(words, 1, words.size()), text);
    return e;
  }
  if (cmd == "add-object") {
    if (words.size() < 4) throw SceneError("add-object needs id, class, color: '" + text + "'");
    e.kind = SceneEdit::Kind::AddObject;
    e.object.id = words[1];
    e.object.object_class = words[2];
    e.object.color = words[3];
    for (size_t i = 4; i < words.size(); ++i) {
      if (words[i] == "pickable")
        e.object.pickable = true;
      else if (words[i] == "container")
        e.object.container = true;
      else if (words[i] == "reachable")
        e.object.reachable = true;
      else
        throw SceneError("unknown object flag '" + words[i] + "' in '" + text + "'");
    }
    return e;
  }
  if (cmd == "remove-object") {
    if (words.size() != 2) throw SceneError("remove-object needs exactly one id: '" + text + "'");
    e.kind = SceneEdit::Kind::RemoveObject;
    e.object_id = words[1];
    return e;
  }
  if (cmd == "set") {
    if (words.size() < 3) throw SceneError("set needs attribute(id) and a boolean: '" + text + "'");
    e.kind = SceneEdit::Kind::SetAttribute;
    Literal lit = parse_edit_literal(join_from(words, 1, words.size() - 1), text);
    const PredicateInfo* info = find_predicate(lit.predicate);
    if (!info || info->category != PredicateCategory::Attribute || lit.negated || !lit.is_ground())
      throw SceneError("set expects a positive ground attribute literal: '" + text + "'");
    e.attribute = lit.predicate;
    e.object_id = lit.args[0].name;
    const std::string& flag = words.back();
    if (flag == "true")
      e.value = true;
    else if (flag == "false")
      e.value = false;
    else
      throw SceneError("set expects true or false, got '" + flag + "'");
    return e;
  }
  throw SceneError("unknown scene edit '" + cmd + "'");
}

void SceneGraph::apply(const SceneEdit& edit) {
  switch (edit.kind) {
    case SceneEdit::Kind::AddObject:
      add_object(edit.object);
      break;
    case SceneEdit::Kind::RemoveObject:
      remove_object(edit.object_id);
      break;
    case SceneEdit::Kind::AddRelation:
      add_relation(edit.relation);
      break;
    case SceneEdit::Kind::RemoveRelation:
      remove_relation(edit.relation);
      break;
    case SceneEdit::Kind::SetAttribute:
      set_attribute(edit.object_id, edit.attribute, edit.value);
      break;
  }
}

void SceneGraph::add_object(const SceneObject& obj) {
  if (obj.id.empty() || !std::islower(static_cast<unsigned char>(obj.id[0])))
    throw SceneError("object id must start lowercase: '" + obj.id + "'");
  if (std::find(object_classes().begin(), object_classes().end(), obj.object_class) ==
      object_classes().end())
    throw SceneError("unknown object class '" + obj.object_class + "'");
  if (objects_.count(obj.id)) throw SceneError("duplicate object id '" + obj.id + "'");
  objects_.emplace(obj.id, obj);
  ++revision_;
}

void SceneGraph::remove_object(const std::string& id) {
  if (!objects_.count(id)) throw SceneError("no object '" + id + "' to remove");
  for (const Literal& rel : relations_about(id)) relations_.erase(rel);
  objects_.erase(id);
  ++revision_;
}

void SceneGraph::check_relation_shape(const Literal& rel) const {
  if (rel.negated) throw SceneError("scene stores positive relations only: " + rel.to_string());
  if (!rel.is_ground()) throw SceneError("scene relations must be ground: " + rel.to_string());
  const PredicateInfo* info = find_predicate(rel.predicate);
  if (!info || info->category != PredicateCategory::Base)
    throw SceneError("not a base relation: " + rel.to_string());
  for (const Term& t : rel.args)
    if (!objects_.count(t.name))
      throw SceneError("relation names missing object '" + t.name + "': " + rel.to_string());
  const SceneObject& subject = objects_.at(rel.args[0].name);
  if (is_location_pred(rel.predicate) && subject.object_class == "zone")
    throw SceneError("zones are fixed areas: " + rel.to_string());
  if (rel.args.size() == 2 && rel.args[0].name == rel.args[1].name)
    throw SceneError("self-relation: " + rel.to_string());
  if (rel.predicate == "inside" && !objects_.at(rel.args[1].name).container)
    throw SceneError("inside target must be a container: " + rel.to_string());
  if (rel.predicate == "at" && objects_.at(rel.args[1].name).object_class != "zone")
    throw SceneError("at target must be a zone: " + rel.to_string());
}

void SceneGraph::add_relation(const Literal& rel) {
  check_relation_shape(rel);
  if (relations_.count(rel)) throw SceneError("relation already present: " + rel.to_string());
  const std::string& subject = rel.args[0].name;
  if (rel.predicate == "held") {
    std::string holding = held_object();
    if (!holding.empty() && holding != subject)
      throw SceneError("gripper already holds '" + holding + "'");
  }
  if (rel.predicate == "on" || rel.predicate == "inside") {
    // Follow the support chain upward from the target; reaching the subject
    // would close a cycle.
    std::string cur = rel.args[1].name;
    while (!cur.empty()) {
      if (cur == subject) throw SceneError("support cycle: " + rel.to_string());
      std::string next;
      for (const Literal& r : relations_) {
        if ((r.predicate == "on" || r.predicate == "inside") && r.args[0].name == cur) {
          next = r.args[1].name;
          break;
        }
      }
      cur = next;
    }
  }
  // One location descriptor per object: the new relation replaces any other.
  for (const Literal& old : relations_about(subject)) {
    if (is_location_pred(old.predicate) && old.args[0].name == subject) relations_.erase(old);
  }
  relations_.insert(rel);
  ++revision_;
}

void SceneGraph::remove_relation(const Literal& rel) {
  if (!relations_.count(rel)) throw SceneError("relation not present: " + rel.to_string());
  relations_.erase(rel);
  ++revision_;
}

void SceneGraph::set_attribute(const std::string& id, const std::string& attr, bool value) {
  auto it = objects_.find(id);
  if (it == objects_.end()) throw SceneError("no object '" + id + "'");
  SceneObject& obj = it->second;
  bool* flag = nullptr;
  if (attr == "pickable")
    flag = &obj.pickable;
  else if (attr == "container")
    flag = &obj.container;
  else if (attr == "reachable")
    flag = &obj.reachable;
  else
    throw SceneError("unknown attribute '" + attr + "'");
  if (attr == "container" && !value) {
    for (const Literal& r : relations_)
      if (r.predicate == "inside" && r.args[1].name == id)
        throw SceneError("cannot clear container flag while '" + id + "' has contents");
  }
  *flag = value;
  ++revision_;
}

bool SceneGraph::has_object(const std::string& id) const { return objects_.count(id) > 0; }

const SceneObject* SceneGraph::object(const std::string& id) const {
  auto it = objects_.find(id);
  return it == objects_.end() ? nullptr : &it->second;
}

bool SceneGraph::positive_base_holds(const Literal& lit) const {
  Literal pos = lit;
  pos.negated = false;
  if (!contains_wildcard(pos)) return relations_.count(pos) > 0;
  for (const Literal& r : relations_)
    if (r.predicate == pos.predicate && unify(pos, r)) return true;
  return false;
}

bool SceneGraph::satisfied(const Literal& lit) const {
  for (const Term& t : lit.args)
    if (t.kind == TermKind::Variable)
      throw SceneError("condition has unbound variable: " + lit.to_string());
  const PredicateInfo* info = find_predicate(lit.predicate);
  if (!info) throw SceneError("unknown predicate: " + lit.to_string());
  bool positive = false;
  switch (info->category) {
    case PredicateCategory::Base:
      positive = positive_base_holds(lit);
      break;
    case PredicateCategory::Attribute: {
      const Term& arg = lit.args[0];
      if (arg.kind == TermKind::Wildcard) {
        for (const auto& [id, obj] : objects_) {
          (void)id;
          if ((lit.predicate == "pickable" && obj.pickable) ||
              (lit.predicate == "container" && obj.container) ||
              (lit.predicate == "reachable" && obj.reachable)) {
            positive = true;
            break;
          }
        }
      } else {
        const SceneObject* obj = object(arg.name);
        positive = obj && (lit.predicate == "pickable"    ? obj->pickable
                           : lit.predicate == "container" ? obj->container
                                                          : obj->reachable);
      }
      break;
    }
    case PredicateCategory::Derived: {
      if (lit.predicate == "hand_empty") {
        positive = held_object().empty();
      } else {  // occupied
        for (const Literal& r : relations_) {
          if ((r.predicate == "on" || r.predicate == "inside") &&
              (lit.args[0].kind == TermKind::Wildcard || r.args[1].name == lit.args[0].name)) {
            positive = true;
            break;
          }
        }
      }
      break;
    }
  }
  return lit.negated ? !positive : positive;
}

bool SceneGraph::satisfied_all(const std::vector<Literal>& lits) const {
  for (const Literal& l : lits)
    if (!satisfied(l)) return false;
  return true;
}

std::vector<std::string> SceneGraph::objects_of_class(const std::string& cls) const {
  std::vector<std::string> out;
  for (const auto& [id, obj] : objects_)
    if (obj.object_class == cls) out.push_back(id);
  return out;
}

std::vector<Literal> SceneGraph::relations_about(const std::string& id) const {
  std::vector<Literal> out;
  for (const Literal& r : relations_)
    for (const Term& t : r.args)
      if (t.name == id) {
        out.push_back(r);
        break;
      }
  return out;
}

std::string SceneGraph::held_object() const {
  for (const Literal& r : relations_)
    if (r.predicate == "held") return r.args[0].name;
  return "";
}

std::vector<Literal> ground_derived_negation(const SceneGraph& scene, const Literal& lit) {
  std::vector<Literal> out;
  if (lit.negated && lit.predicate == "occupied" && lit.args[0].kind == TermKind::Constant) {
    for (const Literal& r : scene.relations()) {
      if ((r.predicate == "on" || r.predicate == "inside") &&
          r.args[1].name == lit.args[0].name)
        out.push_back(r.negation());
    }
    return out;
  }
  if (!lit.negated && lit.predicate == "hand_empty") {
    std::string holding = scene.held_object();
    if (!holding.empty())
      out.push_back(Literal{"held", {Term::constant(holding)}, true});
    return out;
  }
  throw SceneError("not a groundable derived literal: " + lit.to_string());
}

SceneDiff diff_scenes(const SceneGraph& from, const SceneGraph& to) {
  SceneDiff d;
  d.from_revision = from.revision();
  d.to_revision = to.revision();
  for (const auto& [id, obj] : from.objects()) {
    const SceneObject* other = to.object(id);
    if (!other) {
      d.removed_objects.push_back(id);
      continue;
    }
    if (other->object_class != obj.object_class || other->color != obj.color)
      throw SceneError("object '" + id + "' changed identity between scenes");
    const std::pair<std::string, std::pair<bool, bool>> attrs[] = {
        {"pickable", {obj.pickable, other->pickable}},
        {"container", {obj.container, other->container}},
        {"reachable", {obj.reachable, other->reachable}},
    };
    for (const auto& [attr, flags] : attrs) {
      if (flags.first == flags.second) continue;
      Literal flip{attr, {Term::constant(id)}, false};
      (flags.second ? d.added_relations : d.removed_relations).push_back(flip);
    }
  }
  for (const auto& [id, obj] : to.objects())
    if (!from.has_object(id)) d.added_objects.push_back(obj);
  for (const Literal& r : from.relations())
    if (!to.relations().count(r)) d.removed_relations.push_back(r);
  for (const Literal& r : to.relations())
    if (!from.relations().count(r)) d.added_relations.push_back(r);
  std::sort(d.added_relations.begin(), d.added_relations.end());
  std::sort(d.removed_relations.begin(), d.removed_relations.end());
  return d;
}

void apply_diff(SceneGraph& scene, const SceneDiff& diff) {
  auto category = [](const Literal& l) { return find_predicate(l.predicate)->category; };
  for (const Literal& r : diff.removed_relations) {
    if (category(r) == PredicateCategory::Attribute)
      scene.set_attribute(r.args[0].name, r.predicate, false);
    else
      scene.remove_relation(r);
  }
  for (const std::string& id : diff.removed_objects) scene.remove_object(id);
  for (const SceneObject& obj : diff.added_objects) scene.add_object(obj);
  for (const Literal& r : diff.added_relations) {
    if (category(r) == PredicateCategory::Attribute)
      scene.set_attribute(r.args[0].name, r.predicate, true);
    else
      scene.add_relation(r);
  }
}

std::string serialize_scene(const SceneGraph& scene) {
  std::ostringstream os;
  for (const auto& [id, obj] : scene.objects()) {
    os << "object " << id << " class=" << obj.object_class << " color=" << obj.color
       << " pickable=" << obj.pickable << " container=" << obj.container
       << " reachable=" << obj.reachable << '\n';
  }
  for (const Literal& r : scene.relations()) os << "relation " << r.to_string() << '\n';
  return os.str();
}

}  // namespace btrec
