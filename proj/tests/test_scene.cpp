#include <doctest.h>

#include <random>

#include "btrec/scene.hpp"

using namespace btrec;

namespace {

SceneGraph tabletop() {
  SceneGraph g;
  g.add_object({"table", "zone", "grey", false, false, true});
  g.add_object({"blue_peg", "peg", "blue", true, false, true});
  g.add_object({"black_cube", "cube", "black", true, false, true});
  g.add_object({"green_hole", "hole", "green", false, true, true});
  g.add_object({"drawer_1", "drawer", "brown", false, true, false});
  return g;
}

}  // namespace

TEST_CASE("object admission is validated") {
  SceneGraph g;
  CHECK_THROWS_AS(g.add_object({"Big", "cube", "red", false, false, false}), SceneError);
  CHECK_THROWS_AS(g.add_object({"c1", "slab", "red", false, false, false}), SceneError);
  g.add_object({"c1", "cube", "red", false, false, false});
  CHECK_THROWS_AS(g.add_object({"c1", "cube", "blue", false, false, false}), SceneError);
  CHECK(g.has_object("c1"));
}

TEST_CASE("relation invariants reject malformed additions") {
  SceneGraph g = tabletop();
  CHECK_THROWS_AS(g.add_relation(parse_literal("on(ghost, table)")), SceneError);
  CHECK_THROWS_AS(g.add_relation(parse_literal("~on(blue_peg, table)")), SceneError);
  CHECK_THROWS_AS(g.add_relation(parse_literal("on(X, table)")), SceneError);
  CHECK_THROWS_AS(g.add_relation(parse_literal("on(table, blue_peg)")), SceneError);  // zone subject
  CHECK_THROWS_AS(g.add_relation(parse_literal("on(blue_peg, blue_peg)")), SceneError);
  CHECK_THROWS_AS(g.add_relation(parse_literal("inside(blue_peg, black_cube)")),
                  SceneError);  // not a container
  CHECK_THROWS_AS(g.add_relation(parse_literal("at(blue_peg, green_hole)")),
                  SceneError);  // at needs a zone
  CHECK_THROWS_AS(g.add_relation(parse_literal("pickable(blue_peg)")),
                  SceneError);  // attributes are flags, not relations

  g.add_relation(parse_literal("held(blue_peg)"));
  CHECK_THROWS_AS(g.add_relation(parse_literal("held(black_cube)")), SceneError);  // one gripper

  g.add_relation(parse_literal("on(black_cube, green_hole)"));
  CHECK_THROWS_AS(g.add_relation(parse_literal("on(green_hole, black_cube)")),
                  SceneError);  // support cycle
  CHECK_THROWS_AS(g.add_relation(parse_literal("on(black_cube, green_hole)")), SceneError);
}

TEST_CASE("a subject keeps at most one location descriptor") {
  SceneGraph g = tabletop();
  g.add_relation(parse_literal("on(blue_peg, table)"));
  g.add_relation(parse_literal("held(blue_peg)"));
  CHECK_FALSE(g.satisfied(parse_literal("on(blue_peg, table)")));
  CHECK(g.satisfied(parse_literal("held(blue_peg)")));
  g.add_relation(parse_literal("inside(blue_peg, green_hole)"));
  CHECK_FALSE(g.satisfied(parse_literal("held(blue_peg)")));
  g.add_relation(parse_literal("at(blue_peg, table)"));
  CHECK_FALSE(g.satisfied(parse_literal("inside(blue_peg, green_hole)")));
  CHECK(g.relations_about("blue_peg").size() == 1);
}

TEST_CASE("removal and attribute edits are validated") {
  SceneGraph g = tabletop();
  CHECK_THROWS_AS(g.remove_relation(parse_literal("on(blue_peg, table)")), SceneError);
  g.add_relation(parse_literal("inside(black_cube, green_hole)"));
  CHECK_THROWS_AS(g.set_attribute("green_hole", "container", false), SceneError);
  g.remove_relation(parse_literal("inside(black_cube, green_hole)"));
  g.set_attribute("green_hole", "container", false);
  CHECK_THROWS_AS(g.add_relation(parse_literal("inside(black_cube, green_hole)")), SceneError);
  CHECK_THROWS_AS(g.set_attribute("green_hole", "colorful", true), SceneError);

  g.add_relation(parse_literal("on(black_cube, table)"));
  g.remove_object("black_cube");
  CHECK_FALSE(g.satisfied(parse_literal("on(_, table)")));
  CHECK_THROWS_AS(g.remove_object("black_cube"), SceneError);
}

TEST_CASE("satisfied evaluates base, derived, and attribute literals") {
  SceneGraph g = tabletop();
  g.add_relation(parse_literal("on(black_cube, green_hole)"));
  CHECK(g.satisfied(parse_literal("occupied(green_hole)")));
  CHECK(g.satisfied(parse_literal("~occupied(drawer_1)")));
  CHECK(g.satisfied(parse_literal("hand_empty")));
  g.add_relation(parse_literal("held(blue_peg)"));
  CHECK_FALSE(g.satisfied(parse_literal("hand_empty")));
  CHECK(g.held_object() == "blue_peg");

  CHECK(g.satisfied(parse_literal("on(_, green_hole)")));
  CHECK_FALSE(g.satisfied(parse_literal("on(_, table)")));
  CHECK(g.satisfied(parse_literal("pickable(blue_peg)")));
  CHECK(g.satisfied(parse_literal("~pickable(table)")));
  CHECK(g.satisfied(parse_literal("reachable(_)")));
  CHECK_THROWS_AS(g.satisfied(parse_literal("on(X, table)")), SceneError);

  g.add_relation(parse_literal("inside(black_cube, drawer_1)"));
  CHECK(g.satisfied(parse_literal("occupied(drawer_1)")));
}

TEST_CASE("ground_derived_negation names the facts to clear") {
  SceneGraph g = tabletop();
  g.add_relation(parse_literal("on(black_cube, green_hole)"));
  g.add_relation(parse_literal("held(blue_peg)"));

  auto occ = ground_derived_negation(g, parse_literal("~occupied(green_hole)"));
  REQUIRE(occ.size() == 1);
  CHECK(occ[0].to_string() == "~on(black_cube, green_hole)");

  auto hand = ground_derived_negation(g, parse_literal("hand_empty"));
  REQUIRE(hand.size() == 1);
  CHECK(hand[0].to_string() == "~held(blue_peg)");

  CHECK_THROWS_AS(ground_derived_negation(g, parse_literal("on(blue_peg, table)")), SceneError);
}

TEST_CASE("scene edits parse and print both ways") {
  SceneEdit e = parse_scene_edit("add-object c2 cube red pickable reachable");
  CHECK(e.kind == SceneEdit::Kind::AddObject);
  CHECK(e.object.pickable);
  CHECK_FALSE(e.object.container);
  CHECK(e.to_string() == "add-object c2 cube red pickable reachable");

  CHECK(parse_scene_edit("add held(c2)").to_string() == "add held(c2)");
  CHECK(parse_scene_edit("remove on(a, b)").to_string() == "remove on(a, b)");
  CHECK(parse_scene_edit("set reachable(d1) true").to_string() == "set reachable(d1) true");
  CHECK(parse_scene_edit("remove-object c2").to_string() == "remove-object c2");
  CHECK_THROWS_AS(parse_scene_edit("warp c2"), SceneError);
  CHECK_THROWS_AS(parse_scene_edit("set sticky(d1) true"), SceneError);
  CHECK_THROWS_AS(parse_scene_edit("set reachable(d1) maybe"), SceneError);
}

TEST_CASE("diffs capture exact deltas and apply cleanly") {
  SceneGraph a = tabletop();
  a.add_relation(parse_literal("on(blue_peg, table)"));
  SceneGraph b = a;
  b.add_relation(parse_literal("held(blue_peg)"));
  b.add_object({"c9", "cube", "white", true, false, true});
  b.add_relation(parse_literal("on(c9, table)"));
  b.set_attribute("drawer_1", "reachable", true);
  b.remove_object("black_cube");

  SceneDiff d = diff_scenes(a, b);
  CHECK(d.added_objects.size() == 1);
  CHECK(d.removed_objects == std::vector<std::string>{"black_cube"});
  SceneGraph replay = a;
  apply_diff(replay, d);
  CHECK(replay == b);
  CHECK(serialize_scene(replay) == serialize_scene(b));

  SceneDiff back = diff_scenes(b, a);
  SceneGraph undo = b;
  apply_diff(undo, back);
  CHECK(undo == a);

  SceneGraph changed = a;
  changed.remove_object("black_cube");
  changed.add_object({"black_cube", "peg", "black", true, false, true});
  CHECK_THROWS_AS(diff_scenes(a, changed), SceneError);
}

namespace {

// Every id keeps one fixed class/color so remove-then-readd never fabricates
// an identity change.
struct EditFuzzer {
  std::mt19937 rng;
  std::vector<SceneObject> pool;

  explicit EditFuzzer(unsigned seed) : rng(seed) {
    const char* cls[] = {"cube", "peg", "hole", "bin", "zone"};
    const char* col[] = {"red", "green", "blue", "white"};
    for (int i = 0; i < 10; ++i) {
      SceneObject o;
      o.id = std::string("obj") + char('0' + i);
      o.object_class = cls[i % 5];
      o.color = col[i % 4];
      o.pickable = i % 2 == 0;
      o.container = std::string(o.object_class) == "hole" || std::string(o.object_class) == "bin";
      o.reachable = i % 3 != 0;
      pool.push_back(o);
    }
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  const std::string& any_id() { return pool[pick(int(pool.size()))].id; }

  SceneEdit next(const SceneGraph& scene) {
    SceneEdit e;
    switch (pick(6)) {
      case 0:
        e.kind = SceneEdit::Kind::AddObject;
        e.object = pool[pick(int(pool.size()))];
        break;
      case 1:
        e.kind = SceneEdit::Kind::RemoveObject;
        e.object_id = any_id();
        break;
      case 2:
      case 3: {
        e.kind = SceneEdit::Kind::AddRelation;
        const char* preds[] = {"on", "inside", "held", "at"};
        const std::string p = preds[pick(4)];
        e.relation.predicate = p;
        e.relation.args.push_back(Term::constant(any_id()));
        if (p != "held") e.relation.args.push_back(Term::constant(any_id()));
        break;
      }
      case 4: {
        e.kind = SceneEdit::Kind::RemoveRelation;
        const auto& rels = scene.relations();
        if (!rels.empty() && pick(4) != 0) {
          auto it = rels.begin();
          std::advance(it, pick(int(rels.size())));
          e.relation = *it;
        } else {
          e.relation = Literal{"on", {Term::constant(any_id()), Term::constant(any_id())}, false};
        }
        break;
      }
      default: {
        e.kind = SceneEdit::Kind::SetAttribute;
        const char* attrs[] = {"pickable", "container", "reachable"};
        e.attribute = attrs[pick(3)];
        e.object_id = any_id();
        e.value = pick(2) == 1;
        break;
      }
    }
    return e;
  }
};

}  // namespace

TEST_CASE("1000 random edits: incremental state equals rebuild and diffs round-trip") {
  EditFuzzer fuzz(20260822);
  int accepted = 0;
  for (int round = 0; round < 40; ++round) {
    SceneGraph scene;
    std::vector<SceneEdit> log;
    SceneGraph snapshot;
    // A populated board up front; an empty scene rejects nearly every edit.
    for (int i = 0; i < 6; ++i) {
      SceneEdit seed;
      seed.kind = SceneEdit::Kind::AddObject;
      seed.object = fuzz.pool[i];
      scene.apply(seed);
      log.push_back(seed);
    }
    for (int step = 0; step < 25; ++step) {
      SceneEdit e = fuzz.next(scene);
      try {
        scene.apply(e);
        log.push_back(e);
        ++accepted;
      } catch (const SceneError&) {
      }
      if (step == 12) snapshot = scene;
    }

    SceneGraph rebuilt;
    for (const SceneEdit& e : log) rebuilt.apply(e);
    CHECK(rebuilt == scene);
    CHECK(serialize_scene(rebuilt) == serialize_scene(scene));

    SceneDiff forward = diff_scenes(snapshot, scene);
    SceneGraph replay = snapshot;
    apply_diff(replay, forward);
    CHECK(replay == scene);
    SceneDiff backward = diff_scenes(scene, snapshot);
    SceneGraph undo = scene;
    apply_diff(undo, backward);
    CHECK(undo == snapshot);
  }
  // The fuzzer must exercise the accepting paths, not only rejections.
  CHECK(accepted > 300);
}
