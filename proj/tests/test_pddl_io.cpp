#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace testing;

namespace {

Domain random_domain(std::mt19937_64& rng, const RandomWorld& w) {
  Domain d;
  for (const auto& [name, arity] : w.predicates) d.predicates.add(PredicateSchema(name, arity));
  d.universe = w.universe();
  const std::size_t n_ops = rng() % 6;
  for (std::size_t i = 0; i < n_ops; ++i) d.operators.push_back(w.random_operator(rng, "Op" + std::to_string(i)));
  return d;
}


}  // namespace

TEST_CASE("parse_domain: the fifteen-predicate vocabulary") {
  auto d = parse_domain(read_fixture("predicates.txt"));
  CHECK(d.predicates.size() == 15);
  CHECK(d.operators.empty());
  CHECK(d.predicates.at("OnTopOf").arity() == 2);
  CHECK(d.predicates.at("GripperOpen").arity() == 0);
  for (const auto& p : physics_predicates()) CHECK(d.predicates.contains(p));
  for (const auto& p : embodiment_predicates()) CHECK(d.predicates.contains(p));
}

TEST_CASE("parse_domain: operators with forall guards") {
  auto d = parse_domain(read_fixture("orange_domain.txt"));
  const auto& op = find_op(d, "MoveGripperToSurroundOrange");
  REQUIRE(op.pre().quantified().size() == 1);
  CHECK(op.pre().quantified()[0].str() == "(forall (?y - thing) (not (GripperHolding ?y)))");
  CHECK(op.eff().adds() == std::set<Atom>{atom("(GripperClosed)"), atom("(GripperHolding orange)")});
  CHECK(d.universe.contains(ObjectName("hinge_lid")));
}

TEST_CASE("parse_domain: undeclared predicate in an operator is a parse error") {
  const char* text =
      "(Open ?x)\n\nOpenLid\n- Preconditions:\n    - (Shut lid)\n- Effects:\n    - (Open lid)\n";
  CHECK_THROWS_AS(parse_domain(text), ParseError);
}

TEST_CASE("parse_domain: PDDL form is accepted for import") {
  const char* text = R"((define (domain toy)
  (:predicates (Open ?x) (Closed ?x) (GripperHolding ?x))
  (:constants lid)
  (:action OpenLid
    :precondition (and (Closed lid) (forall (?y - thing) (not (GripperHolding ?y))))
    :effect (and (Open lid) (not (Closed lid)))))
)";
  auto d = parse_domain(text);
  REQUIRE(d.operators.size() == 1);
  CHECK(d.operators[0].name() == "OpenLid");
  CHECK(d.operators[0].pre().quantified().size() == 1);
  CHECK(d.operators[0].eff().adds().count(atom("(Open lid)")) == 1);
}

TEST_CASE("domain round-trip on random domains") {
  RandomWorld w(6);
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    auto d = random_domain(rng, w);
    auto text = serialize_domain(d);
    auto back = parse_domain(text);
    REQUIRE(back == d);
    REQUIRE(serialize_domain(back) == text);
  }
}

TEST_CASE("parse_trajectory: two-frame grasp document") {
  auto t = parse_trajectory(read_fixture("orange_grasp.json"));
  REQUIRE(t.frames.size() == 2);
  CHECK(t.frames[0].state.contains(atom("(GripperOpen)")));
  CHECK(t.frames[1].state.contains(atom("(GripperHolding orange)")));
  CHECK(t.instruction == "Grasp the orange.");
}

TEST_CASE("parse_trajectory: single frame and index gaps") {
  auto one = parse_trajectory(R"J({"instruction": "x", "frames": [{"index": 1, "atoms": ["(GripperOpen)"]}]})J");
  CHECK(one.frames.size() == 1);
  CHECK_THROWS_AS(parse_trajectory(R"J({"instruction": "x", "frames": [
      {"index": 1, "atoms": []}, {"index": 3, "atoms": []}]})J"),
                  ParseError);
  CHECK_THROWS_AS(parse_trajectory(""), ParseError);
  CHECK_THROWS_AS(parse_trajectory(R"J({"frames": []})J"), ParseError);
}

TEST_CASE("parse_trajectory: arity disagreement and unknown predicates") {
  CHECK_THROWS_AS(parse_trajectory(R"J({"instruction": "", "frames": [
      {"index": 1, "atoms": ["(Open a)"]}, {"index": 2, "atoms": ["(Open a b)"]}]})J"),
                  ParseError);
  auto d = parse_domain(read_fixture("predicates.txt"));
  CHECK_THROWS_AS(parse_trajectory(R"J({"instruction": "", "frames": [{"index": 1, "atoms": ["(Shiny a)"]}]})J",
                                   &d.predicates),
                  ParseError);
}

TEST_CASE("trajectory round-trip") {
  for (const char* name : {"orange_grasp.json", "orange_demo.json", "magnetic_hook/demo.json"}) {
    auto t = parse_trajectory(read_fixture(name));
    auto text = serialize_trajectory(t);
    auto back = parse_trajectory(text);
    CHECK(back == t);
    CHECK(serialize_trajectory(back) == text);
  }
}

TEST_CASE("parse_patch: the exploration fixture") {
  auto text = read_fixture("exploration.patch");
  auto p = parse_patch(text);
  REQUIRE_FALSE(p.search.empty());
  CHECK(p.search.front()->name() == "OpenGripperToDropOrangeIntoHingeBody");
  REQUIRE_FALSE(p.replace.empty());
  CHECK(p.replace.front()->name() == "MoveHeldOrangeOverFloor");
  CHECK(serialize_patch(p) == text);
}

TEST_CASE("parse_patch: removal patch with an empty REPLACE round-trips") {
  auto text = read_fixture("magnetic_hook/removal.patch");
  auto p = parse_patch(text);
  CHECK(p.search.size() == 4);
  CHECK(p.replace.empty());
  CHECK(serialize_patch(p) == text);
}

TEST_CASE("parse_patch: identical SEARCH and REPLACE is an identity patch") {
  auto block = format_operator_block(op_from("RotateHingeLidClosed\n- Preconditions:\n    - (Open hinge_lid)\n"
                                             "- Effects:\n    - (Closed hinge_lid)\n    - (not (Open hinge_lid))\n"));
  auto p = parse_patch("<<<<<<< SEARCH\n" + block + "\n=======\n" + block + "\n>>>>>>> REPLACE\n");
  CHECK(p.is_identity());
}

TEST_CASE("parse_patch: missing or malformed markers are named") {
  auto bad = read_fixture("exploration_malformed.patch");
  try {
    (void)parse_patch(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("=======") != std::string::npos);
  }
  auto good = read_fixture("exploration.patch");
  auto no_replace = good.substr(0, good.find(">>>>>>> REPLACE"));
  try {
    (void)parse_patch(no_replace);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(">>>>>>> REPLACE") != std::string::npos);
  }
  std::string six = good;
  six.replace(six.find("<<<<<<< SEARCH"), 14, "<<<<<< SEARCH");
  CHECK_THROWS_AS(parse_patch(six), ParseError);
}

TEST_CASE("parse_patch: block bodies tolerate whitespace changes") {
  auto good = read_fixture("exploration.patch");
  std::string loose;
  for (char c : good) {
    loose += c;
    if (c == '\n') loose += "  ";
  }
  // Marker lines must stay exact, so restore them.
  for (std::string_view m : {kSearchMarker, kDividerMarker, kReplaceMarker}) {
    auto at = loose.find("  " + std::string(m));
    if (at != std::string::npos) loose.erase(at, 2);
  }
  auto p = parse_patch(loose);
  auto q = parse_patch(good);
  CHECK(unwrap(p.search) == unwrap(q.search));
  CHECK(unwrap(p.replace) == unwrap(q.replace));
}

TEST_CASE("parser never escapes with anything but a parse error") {
  const std::string good = read_fixture("exploration.patch");
  std::mt19937_64 rng(99);
  std::size_t errors = 0;
  for (int i = 0; i < 2000; ++i) {
    auto text = mutate(good, rng);
    try {
      (void)parse_patch(text);
    } catch (const ParseError&) {
      ++errors;
    } catch (const std::exception& e) {
      FAIL("unexpected exception: " << e.what() << "\n" << text);
    }
  }
  CHECK(errors > 0);
  for (int i = 0; i < 500; ++i) {
    auto text = mutate(read_fixture("orange_domain.txt"), rng);
    try {
      (void)parse_domain(text);
    } catch (const ParseError&) {
    } catch (const std::exception& e) {
      FAIL("unexpected exception: " << e.what());
    }
  }
}

TEST_CASE("operator block text round-trip") {
  RandomWorld w(5);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    auto op = w.random_operator(rng, "Op" + std::to_string(i));
    auto text = format_operator_block(op);
    auto back = parse_operator_block(text);
    REQUIRE(back == op);
    REQUIRE(format_operator_block(back) == text);
  }
}

TEST_CASE("emit_task_specification") {
  CHECK(emit_task_specification(Procedure{}).empty());
  auto eff = EffectSpec({atom("(GripperOpen)")}, {});
  std::vector<ActionOperator> two{ActionOperator("CloseGripperOnGreenCylinder", Condition{}, eff),
                                  ActionOperator("RotateHingeLidClosed", Condition{}, eff)};
  CHECK(emit_task_specification(std::span<const ActionOperator>(two)) ==
        "1. Close gripper on green cylinder\n2. Rotate hinge lid closed\n");
}

TEST_CASE("emit_task_specification: the long-horizon example lines") {
  auto eff = EffectSpec({atom("(GripperOpen)")}, {});
  const std::vector<std::string> head{"MoveGripperToSurroundGreenCylinder", "CloseGripperOnGreenCylinder",
                                      "MoveHeldGreenCylinderOverBottomDrawer", "ReleaseGreenCylinderIntoBottomDrawer"};
  const std::vector<std::string> tail{"MoveGripperToSurroundRedCube", "CloseGripperOnRedCube",
                                      "MoveHeldRedCubeOverToyBox", "OpenGripperToPlaceRedCubeIntoToyBox"};
  std::vector<ActionOperator> proc;
  for (const auto& n : head) proc.emplace_back(n, Condition{}, eff);
  for (int i = 5; i <= 45; ++i) proc.emplace_back("IntermediateStep" + std::to_string(i), Condition{}, eff);
  for (const auto& n : tail) proc.emplace_back(n, Condition{}, eff);
  REQUIRE(proc.size() == 49);
  auto spec = emit_task_specification(std::span<const ActionOperator>(proc));
  std::vector<std::string> lines;
  std::istringstream in(spec);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 49);
  CHECK(lines[0] == "1. Move gripper to surround green cylinder");
  CHECK(lines[1] == "2. Close gripper on green cylinder");
  CHECK(lines[2] == "3. Move held green cylinder over bottom drawer");
  CHECK(lines[3] == "4. Release green cylinder into bottom drawer");
  CHECK(lines[45] == "46. Move gripper to surround red cube");
  CHECK(lines[46] == "47. Close gripper on red cube");
  CHECK(lines[47] == "48. Move held red cube over toy box");
  CHECK(lines[48] == "49. Open gripper to place red cube into toy box");
  CHECK(spec.back() == '\n');
  CHECK(spec.find('\r') == std::string::npos);
}

TEST_CASE("semantic descriptions take precedence") {
  ActionOperator op("Xyz", Condition{}, EffectSpec({atom("(GripperOpen)")}, {}), "Open the gripper");
  CHECK(describe(op) == "Open the gripper");
  CHECK(split_camel_case("SlideBottomDrawerClosed") == "Slide bottom drawer closed");
}

TEST_CASE("atom and literal parsing") {
  CHECK(atom("(OnTopOf apple floor)").str() == "(OnTopOf apple floor)");
  CHECK(lit("(not (Closed hinge_lid))").str() == "(not (Closed hinge_lid))");
  CHECK(lit("  ( not   ( Closed  hinge_lid ) ) ").str() == "(not (Closed hinge_lid))");
  CHECK_THROWS_AS(parse_atom("(OnTopOf apple"), ParseError);
  CHECK_THROWS_AS(parse_atom("OnTopOf apple floor"), ParseError);
}
