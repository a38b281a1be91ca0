#include <doctest.h>

#include "btrec/skill.hpp"

using namespace btrec;

namespace {

SceneGraph blocked_hole_scene() {
  SceneGraph g;
  g.add_object({"table", "zone", "grey", false, false, true});
  g.add_object({"blue_peg", "peg", "blue", true, false, true});
  g.add_object({"black_cube", "cube", "black", true, false, true});
  g.add_object({"red_cube", "cube", "red", false, false, true});  // too heavy to grasp
  g.add_object({"green_hole", "hole", "green", false, true, true});
  g.add_object({"red_bin", "bin", "red", false, true, true});
  g.add_relation(parse_literal("on(blue_peg, table)"));
  g.add_relation(parse_literal("on(black_cube, green_hole)"));
  return g;
}

std::vector<std::string> names_of(const std::vector<GroundSkillSpec>& specs) {
  std::vector<std::string> out;
  for (const auto& s : specs) out.push_back(s.skill.to_string());
  return out;
}

}  // namespace

TEST_CASE("builtin catalog declares the tabletop repertoire in order") {
  SkillCatalog cat = builtin_catalog();
  REQUIRE(cat.active().size() == 5);
  CHECK(cat.active()[0].name == "grasp");
  CHECK(cat.active()[1].name == "place_on");
  CHECK(cat.active()[2].name == "place_inside");
  CHECK(cat.active()[3].name == "open_drawer");
  CHECK(cat.active()[4].name == "close_drawer");
  REQUIRE(cat.latent().size() == 1);
  CHECK(cat.latent()[0].name == "push");
  CHECK(cat.find("grasp") != nullptr);
  CHECK(cat.find("push") == nullptr);
  CHECK(cat.find_latent("push") != nullptr);
}

TEST_CASE("instantiate grounds a template through its binding") {
  SkillCatalog cat = builtin_catalog();
  GroundSkillSpec spec = cat.instantiate("grasp", {{"X", "blue_peg"}});
  CHECK(spec.skill.to_string() == "grasp(blue_peg)");
  CHECK(to_string(spec.preconditions) == "hand_empty, reachable(blue_peg), pickable(blue_peg)");
  CHECK(to_string(spec.postconditions) == "held(blue_peg)");
  CHECK_THROWS_AS(cat.instantiate("grasp", {}), SkillError);
  CHECK_THROWS_AS(cat.instantiate("warp", {{"X", "blue_peg"}}), SkillError);
}

TEST_CASE("achievers match postconditions with class and attribute filters") {
  SkillCatalog cat = builtin_catalog();
  SceneGraph g = blocked_hole_scene();

  CHECK(names_of(cat.achievers(parse_literal("held(blue_peg)"), g)) ==
        std::vector<std::string>{"grasp(blue_peg)"});
  // red_cube is not pickable: nothing active achieves holding it.
  CHECK(cat.achievers(parse_literal("held(red_cube)"), g).empty());
  // table is a zone, not a graspable class.
  CHECK(cat.achievers(parse_literal("held(table)"), g).empty());

  auto inside = cat.achievers(parse_literal("inside(blue_peg, green_hole)"), g);
  REQUIRE(inside.size() == 1);
  CHECK(inside[0].skill.to_string() == "place_inside(blue_peg, green_hole)");
  // The goal literal is already a stated postcondition, not appended twice.
  CHECK(to_string(inside[0].postconditions) ==
        "inside(blue_peg, green_hole), ~held(blue_peg)");

  CHECK(cat.achievers(parse_literal("inside(blue_peg, table)"), g).empty());
  CHECK(cat.achievers(parse_literal("reachable(green_hole)"), g).empty());
}

TEST_CASE("achieve patterns adopt the goal as an extra postcondition") {
  SkillCatalog cat = builtin_catalog();
  SceneGraph g = blocked_hole_scene();
  auto clear = cat.achievers(parse_literal("~on(black_cube, green_hole)"), g);
  REQUIRE(clear.size() == 1);
  CHECK(clear[0].skill.to_string() == "grasp(black_cube)");
  CHECK(to_string(clear[0].postconditions) ==
        "held(black_cube), ~on(black_cube, green_hole)");
  // A non-pickable occupant leaves the pattern with no active achiever.
  CHECK(cat.achievers(parse_literal("~on(red_cube, green_hole)"), g).empty());
}

TEST_CASE("unbound parameters enumerate qualifying objects in id order") {
  SkillCatalog cat = builtin_catalog();
  SceneGraph g = blocked_hole_scene();
  // Putdown options: zones first (catalog order), then containers by id.
  CHECK(names_of(cat.achievers(parse_literal("~held(black_cube)"), g)) ==
        std::vector<std::string>{"place_on(black_cube, table)",
                                 "place_inside(black_cube, green_hole)",
                                 "place_inside(black_cube, red_bin)"});
}

TEST_CASE("overrides prepend to instantiated preconditions") {
  SkillCatalog cat = builtin_catalog();
  cat.add_precondition_override("place_inside", parse_literal("~occupied(Y)"));
  GroundSkillSpec spec =
      cat.instantiate("place_inside", {{"X", "blue_peg"}, {"Y", "green_hole"}});
  CHECK(to_string(spec.preconditions) ==
        "~occupied(green_hole), reachable(green_hole), held(blue_peg)");
  // Duplicate overrides collapse.
  cat.add_precondition_override("place_inside", parse_literal("~occupied(Y)"));
  CHECK(cat.overrides_of("place_inside").size() == 1);
  CHECK_THROWS_AS(cat.add_precondition_override("warp", parse_literal("~occupied(Y)")),
                  SkillError);
}

TEST_CASE("latent skills are probed separately and admitted on demand") {
  SkillCatalog cat = builtin_catalog();
  SceneGraph g = blocked_hole_scene();
  Literal stuck = parse_literal("~on(red_cube, green_hole)");

  CHECK(cat.achievers(stuck, g).empty());
  CHECK(cat.latent_achievers(stuck, g) == std::vector<std::string>{"push"});
  CHECK(cat.latent_achievers(parse_literal("reachable(red_cube)"), g).empty());

  cat.admit_latent("push");
  CHECK(cat.latent().empty());
  CHECK(cat.active().back().name == "push");
  CHECK(names_of(cat.achievers(stuck, g)) == std::vector<std::string>{"push(red_cube, table)"});
  CHECK_THROWS_AS(cat.admit_latent("push"), SkillError);
  CHECK_THROWS_AS(cat.admit_latent("warp"), SkillError);
}
