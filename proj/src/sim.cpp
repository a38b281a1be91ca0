#include "btrec/sim.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace btrec {

std::string FaultTrigger::to_string() const {
  std::ostringstream os;
  switch (phase) {
    case Phase::PreExecution: os << "pre-execution"; break;
    case Phase::AtTick: os << "at-tick " << ordinal; break;
    case Phase::BeforeSkill: os << "before-skill " << ordinal; break;
    case Phase::AfterSkill: os << "after-skill " << ordinal; break;
  }
  return os.str();
}

bool Scenario::has_tag(const std::string& t) const {
  return std::find(tags.begin(), tags.end(), t) != tags.end();
}

SceneGraph Scenario::initial_scene() const {
  SceneGraph g;
  for (const SceneObject& o : objects) g.add_object(o);
  for (const Literal& r : relations) g.add_relation(r);
  return g;
}

namespace {

std::vector<std::string> words_of(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

std::string strip(const std::string& line) {
  size_t hash = line.find('#');
  std::string s = hash == std::string::npos ? line : line.substr(0, hash);
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string rest_after(const std::vector<std::string>& words, size_t from) {
  std::string out;
  for (size_t i = from; i < words.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += words[i];
  }
  return out;
}

Fault parse_fault_line(const std::string& line) {
  auto w = words_of(line);
  Fault f;
  size_t i = 0;
  if (w.empty()) throw ScenarioError("empty fault line");
  if (w[0] == "pre-execution") {
    f.trigger.phase = FaultTrigger::Phase::PreExecution;
    i = 1;
  } else if (w[0] == "at-tick" || w[0] == "before-skill" || w[0] == "after-skill") {
    if (w.size() < 2) throw ScenarioError("fault trigger needs a number: '" + line + "'");
    f.trigger.phase = w[0] == "at-tick"        ? FaultTrigger::Phase::AtTick
                      : w[0] == "before-skill" ? FaultTrigger::Phase::BeforeSkill
                                               : FaultTrigger::Phase::AfterSkill;
    try {
      f.trigger.ordinal = std::stoi(w[1]);
    } catch (const std::exception&) {
      throw ScenarioError("bad trigger number in '" + line + "'");
    }
    i = 2;
  } else {
    throw ScenarioError("unknown fault trigger '" + w[0] + "'");
  }
  if (i >= w.size()) throw ScenarioError("fault has no payload: '" + line + "'");
  if (w[i] == "edit") {
    f.edit = parse_scene_edit(rest_after(w, i + 1));
    return f;
  }
  if (w[i] == "override") {
    if (w.size() < i + 3) throw ScenarioError("override needs skill and kind: '" + line + "'");
    SkillOverride ov;
    ov.skill = w[i + 1];
    ov.kind = w[i + 2];
    if (ov.kind == "miss-onto") {
      if (w.size() < i + 4) throw ScenarioError("miss-onto needs a landing zone: '" + line + "'");
      ov.arg = w[i + 3];
    } else if (ov.kind != "land-on-top" && ov.kind != "slip") {
      throw ScenarioError("unknown override kind '" + ov.kind + "'");
    }
    f.override_ = ov;
    return f;
  }
  throw ScenarioError("fault payload must be 'edit' or 'override': '" + line + "'");
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& name_hint) {
  Scenario s;
  s.name = name_hint;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  while (std::getline(is, raw)) {
    std::string line = strip(raw);
    if (line.empty()) continue;
    if (line.back() == ':' && line.find(' ') == std::string::npos) {
      section = line.substr(0, line.size() - 1);
      if (section != "objects" && section != "relations" && section != "goals" &&
          section != "faults")
        throw ScenarioError("unknown section '" + section + ":'");
      continue;
    }
    if (section.empty()) {
      auto w = words_of(line);
      if (w[0] == "scenario" && w.size() >= 2)
        s.name = w[1];
      else if (w[0] == "task")
        s.task = rest_after(w, 1);
      else if (w[0] == "tags")
        s.tags.assign(w.begin() + 1, w.end());
      else if (w[0] == "requires-skill" && w.size() >= 2)
        s.requires_skill = w[1];
      else if (w[0] == "catalog" && w.size() >= 2)
        s.catalog_name = w[1];
      else
        throw ScenarioError("unexpected header line '" + line + "'");
      continue;
    }
    if (section == "objects") {
      s.objects.push_back(parse_scene_edit("add-object " + line).object);
    } else if (section == "relations") {
      s.relations.push_back(parse_literal(line));
    } else if (section == "goals") {
      Literal g = parse_literal(line);
      if (!g.is_ground() && !contains_wildcard(g))
        throw ScenarioError("goal must be ground: '" + line + "'");
      s.goals.push_back(g);
    } else {
      s.faults.push_back(parse_fault_line(line));
    }
  }
  if (s.name.empty()) throw ScenarioError("scenario has no name");
  if (s.goals.empty()) throw ScenarioError("scenario '" + s.name + "' has no goals");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string stem = path;
  if (size_t slash = stem.find_last_of('/'); slash != std::string::npos)
    stem = stem.substr(slash + 1);
  if (size_t dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  return parse_scenario(buf.str(), stem);
}

SkillCatalog make_catalog(const std::string& name) {
  if (name == "builtin") return builtin_catalog();
  throw ScenarioError("unknown catalog '" + name + "'");
}

std::optional<PhysicsViolation> predict_violation(const SceneGraph& scene,
                                                  const GroundSkill& skill) {
  if (skill.name == "place_inside") {
    auto it = skill.binding.find("Y");
    if (it != skill.binding.end() &&
        scene.satisfied(Literal{"occupied", {Term::constant(it->second)}, false}))
      return PhysicsViolation{"occupied_target", skill, it->second};
  }
  if (skill.name == "open_drawer") {
    auto it = skill.binding.find("D");
    if (it != skill.binding.end())
      for (const Literal& r : scene.relations())
        if (r.predicate == "on" && r.args[1].name == it->second)
          return PhysicsViolation{"blocked_drawer", skill, it->second};
  }
  return std::nullopt;
}

namespace {

std::string arg_of(const GroundSkill& skill, const std::string& param) {
  auto it = skill.binding.find(param);
  if (it == skill.binding.end())
    throw SkillError("skill " + skill.to_string() + " lacks parameter " + param);
  return it->second;
}

Literal rel(const std::string& pred, const std::string& a) {
  return Literal{pred, {Term::constant(a)}, false};
}

Literal rel(const std::string& pred, const std::string& a, const std::string& b) {
  return Literal{pred, {Term::constant(a), Term::constant(b)}, false};
}

}  // namespace

ExecOutcome execute_physics(SceneGraph& scene, const GroundSkill& skill,
                            const std::optional<SkillOverride>& override_) {
  SceneGraph before = scene;
  ExecOutcome out;
  auto fail = [&](const std::string& why) {
    out.status = Status::Failure;
    out.note = skill.to_string() + ": " + why;
    return out;
  };
  auto done = [&](const std::string& what) {
    out.status = Status::Success;
    out.note = skill.to_string() + ": " + what;
    out.diff = diff_scenes(before, scene);
    return out;
  };

  if (skill.name == "grasp") {
    std::string x = arg_of(skill, "X");
    const SceneObject* obj = scene.object(x);
    if (!obj) return fail("no such object");
    if (!scene.held_object().empty())
      return fail("gripper already holds " + scene.held_object());
    if (!obj->pickable) return fail("object is not pickable");
    if (!obj->reachable) return fail("object is not reachable");
    if (override_ && override_->kind == "slip") {
      out.degraded = true;
      return done("closed on " + x + " but it slipped away");
    }
    scene.add_relation(rel("held", x));
    return done("holding " + x);
  }

  if (skill.name == "place_on" || skill.name == "place_inside") {
    std::string x = arg_of(skill, "X");
    std::string y = arg_of(skill, "Y");
    if (scene.held_object() != x) return fail("not holding " + x);
    if (override_ && override_->kind == "miss-onto") {
      if (!scene.has_object(override_->arg)) return fail("no landing spot " + override_->arg);
      out.degraded = true;
      scene.add_relation(rel("on", x, override_->arg));
      return done("missed and dropped " + x + " onto " + override_->arg);
    }
    const SceneObject* target = scene.object(y);
    if (!target) return fail("no such target");
    if (!target->reachable) return fail("target is not reachable");
    if (skill.name == "place_on") {
      scene.add_relation(rel("on", x, y));
      return done("placed " + x + " on " + y);
    }
    if (override_ && override_->kind == "land-on-top") {
      out.degraded = true;
      scene.add_relation(rel("on", x, y));
      return done(x + " ended up on top of " + y);
    }
    if (scene.satisfied(rel("occupied", y))) {
      // No room: the object settles on top of the container instead.
      out.degraded = true;
      out.violation = PhysicsViolation{"occupied_target", skill, y};
      scene.add_relation(rel("on", x, y));
      return done(y + " was occupied; " + x + " ended up on top of it");
    }
    if (!target->container) return fail("target is not a container");
    scene.add_relation(rel("inside", x, y));
    return done("placed " + x + " inside " + y);
  }

  if (skill.name == "open_drawer" || skill.name == "close_drawer") {
    std::string d = arg_of(skill, "D");
    if (!scene.has_object(d)) return fail("no such drawer");
    if (skill.name == "open_drawer") {
      if (!scene.held_object().empty()) return fail("gripper is occupied");
      for (const Literal& r : scene.relations())
        if (r.predicate == "on" && r.args[1].name == d) {
          out.violation = PhysicsViolation{"blocked_drawer", skill, d};
          return fail("drawer is weighed down by " + r.args[0].name);
        }
      scene.set_attribute(d, "reachable", true);
      return done("opened " + d);
    }
    scene.set_attribute(d, "reachable", false);
    return done("closed " + d);
  }

  if (skill.name == "push") {
    std::string x = arg_of(skill, "X");
    std::string z = arg_of(skill, "Z");
    const SceneObject* obj = scene.object(x);
    if (!obj) return fail("no such object");
    if (!scene.held_object().empty()) return fail("gripper is occupied");
    if (!obj->reachable) return fail("object is not reachable");
    if (!scene.has_object(z)) return fail("no such zone");
    scene.add_relation(rel("at", x, z));
    return done("pushed " + x + " to " + z);
  }

  throw SkillError("no physics rule for skill '" + skill.name + "'");
}

World::World(const Scenario& s) : scene_(s.initial_scene()), faults_(s.faults) {}

std::optional<SkillOverride> World::consume_override(const std::string& skill) {
  for (auto it = armed_.begin(); it != armed_.end(); ++it) {
    if (it->skill == skill) {
      SkillOverride ov = *it;
      armed_.erase(it);
      return ov;
    }
  }
  return std::nullopt;
}

ExecOutcome World::execute(const GroundSkill& skill) {
  std::optional<SkillOverride> ov = consume_override(skill.name);
  ExecOutcome out = execute_physics(scene_, skill, ov);
  ++executions_;
  return out;
}

std::vector<FaultApplication> World::fire_faults(FaultTrigger::Phase phase, int ordinal) {
  std::vector<FaultApplication> applied;
  for (Fault& f : faults_) {
    if (f.fired || f.trigger.phase != phase) continue;
    if (phase != FaultTrigger::Phase::PreExecution && f.trigger.ordinal != ordinal) continue;
    f.fired = true;
    if (f.override_) {
      armed_.push_back(*f.override_);
      continue;
    }
    SceneGraph before = scene_;
    scene_.apply(*f.edit);
    applied.push_back(FaultApplication{f.edit->to_string(), diff_scenes(before, scene_)});
  }
  return applied;
}

}  // namespace btrec
