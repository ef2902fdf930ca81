#pragma once

// The symbolic tool: precondition-checked STRIPS execution, verification,
// rollout and whole-trajectory checking.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "counterplan/symbolic.hpp"

namespace counterplan {

struct Violation {
  Literal literal;  // the unmet grounded precondition
  std::size_t action_index = 0;
  std::string action_name;

  std::string str() const { return literal.str(); }

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ExecutionResult {
  std::optional<State> next;
  std::vector<Violation> violations;  // sorted by predicate, then args

  bool ok() const noexcept { return next.has_value(); }
};

// (state \ dels) ∪ adds when every grounded precondition holds. Throws
// VocabularyError when the operator names objects outside the universe.
ExecutionResult symbolic_execute(const State& state, const ActionOperator& action,
                                 const ObjectUniverse& universe, std::size_t action_index = 0);

struct VerifyOutcome {
  bool pass = false;
  State next;                         // meaningful on pass
  std::vector<Violation> violations;  // non-empty on fail
};

VerifyOutcome symbolic_verify(const State& state, const ActionOperator& action,
                              const ObjectUniverse& universe, std::size_t action_index = 0);

struct Inconsistency {
  std::size_t index = 0;
  std::vector<Violation> violations;

  friend bool operator==(const Inconsistency&, const Inconsistency&) = default;
};

struct RolloutResult {
  std::vector<State> states;  // states[0] is the input state
  std::size_t executed = 0;
  std::optional<Inconsistency> first_inconsistency;

  const State& final_state() const { return states.back(); }
};

RolloutResult rollout(const State& initial, const Procedure& procedure, const ObjectUniverse& universe);
RolloutResult rollout(const State& initial, std::span<const ActionOperator> procedure,
                      const ObjectUniverse& universe);

enum class EntailmentMode {
  exact,   // executed next state must equal the recorded frame
  subset,  // recorded frame within the executed next state, adds within the frame
};

struct TrajectoryVerdict {
  enum class Reason { none, precondition, effect_mismatch };

  bool verified = true;
  std::size_t t = 0;  // failing transition (0-based)
  Reason reason = Reason::none;
  std::vector<Violation> violations;
  std::vector<Atom> missing;     // produced (subset mode: added), absent from the frame
  std::vector<Atom> unexpected;  // in the frame, not produced

  std::string describe() const;
};

// Throws InvalidValue when actions.size() != states.size() - 1.
TrajectoryVerdict verify_trajectory(std::span<const State> states, const Procedure& actions,
                                    const ObjectUniverse& universe,
                                    EntailmentMode mode = EntailmentMode::exact);

}  // namespace counterplan
