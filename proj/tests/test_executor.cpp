#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace testing;

namespace {

Domain orange_domain() { return parse_domain(read_fixture("orange_domain.txt")); }

std::set<std::string> rendered(const std::vector<Violation>& v) {
  std::set<std::string> out;
  for (const auto& x : v) out.insert(x.str());
  return out;
}

}  // namespace

TEST_CASE("symbolic_execute: the orange grasp operator") {
  auto d = orange_domain();
  const auto& op = find_op(d, "MoveGripperToSurroundOrange");
  auto s = state({"(FingerGripper)", "(GripperOpen)", "(GripperSurrounding orange)", "(OnTopOf orange floor)",
                  "(OnTopOf apple floor)"});
  auto u = universe_of(s);
  u.merge(d.universe);
  auto r = symbolic_execute(s, op, u);
  REQUIRE(r.ok());
  CHECK(r.next->contains(atom("(GripperClosed)")));
  CHECK(r.next->contains(atom("(GripperHolding orange)")));
  CHECK_FALSE(r.next->contains(atom("(GripperOpen)")));
  CHECK_FALSE(r.next->contains(atom("(GripperSurrounding orange)")));
  CHECK(*r.next == state({"(FingerGripper)", "(GripperClosed)", "(GripperHolding orange)", "(OnTopOf orange floor)",
                          "(OnTopOf apple floor)"}));
}

TEST_CASE("symbolic_execute: the forall guard blocks a second grasp") {
  auto d = orange_domain();
  const auto& op = find_op(d, "MoveGripperToSurroundOrange");
  auto s = state({"(GripperOpen)", "(GripperSurrounding orange)", "(GripperHolding apple)"});
  auto u = universe_of(s);
  u.merge(d.universe);
  auto r = symbolic_execute(s, op, u);
  REQUIRE_FALSE(r.ok());
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].str() == "(not (GripperHolding apple))");
  CHECK(r.violations[0].action_name == "MoveGripperToSurroundOrange");
}

TEST_CASE("symbolic_execute: a flagged no-op leaves the state alone") {
  ActionOperator noop("NoOp", Condition{}, EffectSpec{}, std::nullopt, true);
  auto s = state({"(Open lid)", "(OnTopOf a b)"});
  auto r = symbolic_execute(s, noop, universe_of(s));
  REQUIRE(r.ok());
  CHECK(*r.next == s);
}

TEST_CASE("symbolic_execute: unknown objects are a vocabulary error") {
  auto op = op_from("OpenLid\n- Preconditions:\n    - (Closed lid)\n- Effects:\n    - (Open lid)\n");
  CHECK_THROWS_AS(symbolic_execute(state({"(Closed box)"}), op, universe_of({"box"})), VocabularyError);
}

TEST_CASE("symbolic_execute: random pairs match the set-algebra oracle") {
  RandomWorld w(8);
  std::mt19937_64 rng(1234);
  auto u = w.universe();
  for (int i = 0; i < 1000; ++i) {
    auto s = w.random_state(rng);
    auto op = w.random_operator(rng);
    auto r = symbolic_execute(s, op, u);
    auto o = oracle_execute(s, op, u);
    REQUIRE(r.ok() == o.ok);
    if (o.ok) {
      REQUIRE(*r.next == State(o.next));
    } else {
      REQUIRE(rendered(r.violations) == o.unmet);
      REQUIRE(r.violations.size() == o.unmet.size());
    }
  }
}

TEST_CASE("frame axiom: untouched atoms survive execution") {
  RandomWorld w(6);
  std::mt19937_64 rng(77);
  auto u = w.universe();
  for (int i = 0; i < 500; ++i) {
    auto s = w.random_state(rng);
    auto op = w.random_operator(rng);
    auto r = symbolic_execute(s, op, u);
    if (!r.ok()) continue;
    for (const auto& a : s)
      if (!op.eff().adds().count(a) && !op.eff().dels().count(a)) REQUIRE(r.next->contains(a));
    for (const auto& a : *r.next)
      if (!op.eff().adds().count(a)) REQUIRE(s.contains(a));
  }
}

TEST_CASE("violations are sorted by predicate then arguments, deterministically") {
  auto op = op_from(
      "Multi\n- Preconditions:\n    - (Open z)\n    - (Closed b)\n    - (Closed a)\n    - (InsideOf a b)\n"
      "- Effects:\n    - (GripperOpen)\n");
  auto s = state({"(GripperClosed)"});
  auto u = universe_of({"a", "b", "z"});
  auto r1 = symbolic_execute(s, op, u);
  auto r2 = symbolic_execute(s, op, u);
  REQUIRE(r1.violations.size() == 4);
  std::vector<std::string> got;
  for (const auto& v : r1.violations) got.push_back(v.str());
  CHECK(got == std::vector<std::string>{"(Closed a)", "(Closed b)", "(InsideOf a b)", "(Open z)"});
  CHECK(r1.violations == r2.violations);
}

TEST_CASE("symbolic_verify: the hinge-lid identification example") {
  auto d = orange_domain();
  const auto& op = find_op(d, "OpenGripperToDropOrangeIntoHingeBody");
  auto s = state({"(Closed hinge_lid)", "(GripperHolding orange)", "(OverOf orange hinge_body)", "(GripperClosed)"});
  auto v = symbolic_verify(s, op, d.universe);
  CHECK_FALSE(v.pass);
  REQUIRE(v.violations.size() == 1);
  CHECK(v.violations[0].str() == "(not (Closed hinge_lid))");
}

TEST_CASE("symbolic_verify agrees with symbolic_execute") {
  RandomWorld w(5);
  std::mt19937_64 rng(8);
  auto u = w.universe();
  for (int i = 0; i < 300; ++i) {
    auto s = w.random_state(rng);
    auto op = w.random_operator(rng);
    auto e = symbolic_execute(s, op, u);
    auto v = symbolic_verify(s, op, u);
    REQUIRE(v.pass == e.ok());
    if (v.pass) REQUIRE(v.next == *e.next);
    else REQUIRE(v.violations == e.violations);
  }
}

TEST_CASE("rollout: empty procedure") {
  auto s = state({"(Open lid)"});
  auto r = rollout(s, Procedure{}, universe_of(s));
  REQUIRE(r.states.size() == 1);
  CHECK(r.states[0] == s);
  CHECK_FALSE(r.first_inconsistency);
}

TEST_CASE("rollout: first inconsistency at the drop action") {
  auto d = orange_domain();
  auto demo = parse_trajectory(read_fixture("orange_demo.json"));
  Procedure proc;
  for (const char* n : {"MoveGripperToSurroundOrange", "MoveHeldOrangeOverHingeBody",
                        "OpenGripperToDropOrangeIntoHingeBody", "RotateHingeLidClosed"})
    proc.push_back(make_operator(find_op(d, n)));
  auto u = d.universe;
  u.merge(universe_of(demo.frames[0].state));
  auto clean = rollout(demo.frames[0].state, proc, u);
  CHECK_FALSE(clean.first_inconsistency);
  CHECK(clean.states == demo.states());

  auto deploy = read_state("orange_deploy_state.json");
  auto r = rollout(deploy, proc, u);
  REQUIRE(r.first_inconsistency);
  CHECK(r.first_inconsistency->index == 2);
  REQUIRE(r.first_inconsistency->violations.size() == 1);
  CHECK(r.first_inconsistency->violations[0].str() == "(not (Closed hinge_lid))");
  CHECK(r.first_inconsistency->violations[0].action_index == 2);
  CHECK(r.executed == 2);
  CHECK(r.states.size() == 3);
}

TEST_CASE("rollout: chained random actions agree with step-by-step execution") {
  RandomWorld w(6);
  std::mt19937_64 rng(31);
  auto u = w.universe();
  for (int i = 0; i < 200; ++i) {
    auto s0 = w.random_state(rng);
    Procedure proc;
    State s = s0;
    std::vector<State> expect{s0};
    for (int k = 0; k < 8; ++k) {
      auto op = w.random_operator(rng, "Step" + std::to_string(k));
      auto o = oracle_execute(s, op, u);
      if (!o.ok) continue;
      proc.push_back(make_operator(op));
      s = State(o.next);
      expect.push_back(s);
    }
    auto r = rollout(s0, proc, u);
    REQUIRE_FALSE(r.first_inconsistency);
    REQUIRE(r.states == expect);
  }
}

TEST_CASE("verify_trajectory: the grasp fixture with its operator") {
  auto d = orange_domain();
  auto t = parse_trajectory(read_fixture("orange_grasp.json"));
  auto u = d.universe;
  u.merge(universe_of(t.frames[0].state));
  auto states = t.states();
  auto v = verify_trajectory(states, Procedure{make_operator(find_op(d, "MoveGripperToSurroundOrange"))}, u);
  CHECK(v.verified);
}

TEST_CASE("verify_trajectory: rollouts verify and edited frames are caught") {
  RandomWorld w(6);
  std::mt19937_64 rng(55);
  auto u = w.universe();
  int mutated = 0;
  for (int i = 0; i < 200; ++i) {
    auto s0 = w.random_state(rng);
    Procedure proc;
    State s = s0;
    for (int k = 0; k < 6; ++k) {
      auto op = w.random_operator(rng, "Step" + std::to_string(k));
      auto r = symbolic_execute(s, op, u);
      if (!r.ok()) continue;
      proc.push_back(make_operator(op));
      s = *r.next;
    }
    auto roll = rollout(s0, proc, u);
    REQUIRE(verify_trajectory(roll.states, proc, u).verified);
    REQUIRE(verify_trajectory(roll.states, proc, u, EntailmentMode::subset).verified);

    // Drop one effect atom from a frame that has one.
    for (std::size_t t = 0; t < proc.size(); ++t) {
      const auto& adds = proc[t]->eff().adds();
      if (adds.empty()) continue;
      const Atom victim = *adds.begin();
      auto edited = roll.states;
      edited[t + 1] = edited[t + 1].without(victim);
      auto v = verify_trajectory(edited, proc, u);
      REQUIRE_FALSE(v.verified);
      // An earlier step cannot fail: frames before t + 1 are untouched.
      REQUIRE(v.t == t);
      REQUIRE(v.reason == TrajectoryVerdict::Reason::effect_mismatch);
      REQUIRE(v.missing == std::vector<Atom>{victim});
      ++mutated;
      break;
    }
  }
  CHECK(mutated > 50);
}

TEST_CASE("verify_trajectory: a partial frame fails only in exact mode") {
  auto d = orange_domain();
  auto t = parse_trajectory(read_fixture("orange_grasp.json"));
  auto u = d.universe;
  u.merge(universe_of(t.frames[0].state));
  auto states = t.states();
  Procedure proc{make_operator(find_op(d, "MoveGripperToSurroundOrange"))};
  auto partial = states;
  partial[1] = partial[1].without(atom("(OnTopOf apple floor)"));
  CHECK(verify_trajectory(partial, proc, u, EntailmentMode::subset).verified);
  auto v = verify_trajectory(partial, proc, u, EntailmentMode::exact);
  CHECK_FALSE(v.verified);
  CHECK(v.missing == std::vector<Atom>{atom("(OnTopOf apple floor)")});
  CHECK(v.unexpected.empty());
}

TEST_CASE("verify_trajectory: length mismatch is rejected") {
  std::vector<State> states{State{}};
  auto op = make_operator(op_from("A\n- Preconditions:\n- Effects:\n    - (GripperOpen)\n"));
  CHECK_THROWS_AS(verify_trajectory(states, Procedure{op}, ObjectUniverse{}), InvalidValue);
}

TEST_CASE("verified trajectories replay to the same states") {
  RandomWorld w(5);
  std::mt19937_64 rng(66);
  auto u = w.universe();
  for (int i = 0; i < 100; ++i) {
    std::vector<State> states{w.random_state(rng)};
    Procedure proc;
    for (int k = 0; k < 5; ++k) {
      auto op = w.random_operator(rng, "S" + std::to_string(k));
      auto r = symbolic_execute(states.back(), op, u);
      if (!r.ok()) continue;
      proc.push_back(make_operator(op));
      states.push_back(*r.next);
    }
    if (verify_trajectory(states, proc, u).verified) REQUIRE(rollout(states[0], proc, u).states == states);
  }
}
