#pragma once

// Counterfactual adaptation: roll the demonstrated procedure out from a
// deployment state, ask a proposer to patch the first failing action, verify
// the patch and repeat until the goal holds or the budget runs out.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "counterplan/executor.hpp"
#include "counterplan/patch.hpp"
#include "counterplan/proposers.hpp"
#include "counterplan/world_model.hpp"

namespace counterplan {

struct Goal {
  std::set<Atom> required;
  std::set<Atom> forbidden;

  Goal() = default;
  // Throws InvalidValue when an atom is both required and forbidden.
  Goal(std::set<Atom> required, std::set<Atom> forbidden = {});

  friend bool operator==(const Goal&, const Goal&) = default;
};

bool goal_satisfied(const State& state, const Goal& goal);

// Literals of the goal that do not hold: missing required atoms as positive
// literals, present forbidden atoms as negative ones. Sorted.
std::vector<Literal> unmet_goal_literals(const State& state, const Goal& goal);

struct GoalProjection {
  // Predicates to keep; nullopt keeps every predicate.
  std::optional<std::set<std::string>> keep;
  // Object correspondence. Objects without an entry map to themselves unless
  // `strict` is set, in which case they are unmapped.
  std::map<ObjectName, ObjectName> objects;
  bool strict = false;

  static GoalProjection keep_all();
  static GoalProjection physics();  // the default
};

class ProjectionError : public Error {
 public:
  using Error::Error;
};

// Throws ProjectionError when a kept atom names an unmapped object.
Goal derive_goal(const State& final_demo_state, const GoalProjection& mapping = GoalProjection::physics());

enum class AdaptationStatus { success, budget_exhausted, patch_rejected, stuck };

std::string to_string(AdaptationStatus status);

struct PatchLogEntry {
  enum class Outcome { accepted, rejected, declined, failed };

  std::size_t exploration = 0;  // 1-based proposer request number
  std::size_t attempt = 0;      // 0 first proposal, 1 retry after a rejection
  bool goal_gap = false;
  std::optional<Inconsistency> inconsistency;
  std::vector<Literal> unmet_goal;
  std::optional<std::string> erroneous_action;
  std::optional<State> anchor;  // demonstration state after the erroneous step
  std::optional<std::string> rejection_reason;  // sent with this request
  std::optional<Patch> patch;
  Outcome outcome = Outcome::declined;
  std::string detail;
  std::string rationale;
  std::string raw;  // unparsed payload of a failed response
};

std::string to_string(PatchLogEntry::Outcome outcome);

struct AdaptationReport {
  AdaptationStatus status = AdaptationStatus::stuck;
  Procedure adapted;
  std::vector<PatchLogEntry> patches;
  std::vector<State> counterfactual_states;  // rollout of `adapted`
  std::size_t explorations_used = 0;
  std::size_t budget = 0;
  std::size_t transport_failures = 0;
  std::size_t iterations = 0;  // rollouts performed
  std::string message;
  ObjectUniverse universe;  // working universe (model plus deployment objects)
};

struct AdaptOptions {
  bool retry_rejected = true;  // one re-proposal with the rejection reason
};

// Throws InvalidValue when budget is zero.
AdaptationReport adapt(const WorldModel& model, const State& counterfactual_initial, const Goal& goal,
                       Proposer& proposer, std::size_t budget, const AdaptOptions& options = {});

// Text rendering of the accepted and rejected patches, for audit.
std::string format_patch_log(const AdaptationReport& report);

}  // namespace counterplan
