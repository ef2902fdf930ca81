#pragma once

// Symbolic benchmark scenarios: long-horizon tasks composed from
// pick-and-place, sweep, rotate and slide subtasks, with domain factors that
// open a gap between the demonstration and the deployment.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "counterplan/adaptation.hpp"
#include "counterplan/metrics.hpp"
#include "counterplan/pddl_io.hpp"
#include "counterplan/proposers.hpp"

namespace counterplan {

enum class SubtaskKind { pick_place, sweep, rotate, slide };
enum class Complexity { low, medium, high };
enum class Factor { obstruction, affordance, kinematic_gripper, combination };

std::string to_string(SubtaskKind k);
std::string to_string(Complexity c);
std::string to_string(Factor f);

std::size_t subtask_count(Complexity c);        // 2, 3, 4
std::size_t objects_per_subtask(Complexity c);  // 1, 1, 2

struct ScenarioSpec {
  std::string id;
  std::vector<SubtaskKind> subtasks;
  Complexity complexity = Complexity::low;
  Factor factor = Factor::obstruction;
  int level = 0;  // obstruction level 0..2
  std::uint64_t seed = 0;

  // Throws InvalidValue when the subtask count does not match the tier or
  // the level is out of range.
  void validate() const;
};

// Predicate schemas of the manipulation domain (15 predicates).
PredicateSet manipulation_predicates();

struct SubtaskGoal {
  std::string label;
  std::set<Atom> atoms;
};

struct ScenarioInstance {
  ScenarioSpec spec;
  TrajectoryDocument demonstration;
  Procedure demo_procedure;  // the operators that generated the frames
  State deployment_initial;
  Goal goal;
  Procedure library;  // deployment operator library
  std::map<std::string, std::string> labels;  // operator name -> subtask label
  std::vector<SubtaskGoal> subtask_goals;
  std::size_t oracle_depth = 1;  // edits needed by the worst single repair
  std::size_t budget = 10;

  std::vector<std::string> label_sequence(const Procedure& procedure) const;

  // Subtask labels in the order their goal groups first hold along
  // `states` (states[0] before procedure[0]); ties within one step follow
  // the declared subtask order. Each executed auxiliary operator (label
  // "resolve") contributes a "resolve" entry at its step.
  std::vector<std::string> achievement_sequence(const std::vector<State>& states,
                                                const Procedure& procedure) const;
};

// Deterministic for a fixed spec.
ScenarioInstance generate_scenario(const ScenarioSpec& spec);

enum class PerturbMode { drop, noise };

// Relation atoms are atoms whose predicate is outside the embodiment group.
// Drop removes floor(fraction * relations) of them; noise inserts as many
// new well-formed relation atoms over the state's objects.
State perturb_scene(const State& state, PerturbMode mode, double fraction, std::uint64_t seed);

// Exploration budgets: 10 / 20 (low-medium / high), 15 / 30 for combination.
std::size_t default_budget(Factor factor, Complexity complexity);

// Named spec lists: "full" (the 440-scenario distribution), "zero-gap",
// "obstruction-1", "obstruction-2", "affordance", "kinematic", "combination".
// `mini` shrinks each cell to 10 scenarios (single-factor suites to 20).
std::vector<ScenarioSpec> suite_profile(const std::string& name, bool mini, std::uint64_t seed = 1);
std::vector<std::string> suite_profile_names();

// Evaluation cell a spec belongs to, e.g. "Obstruction & Affordance".
std::string factor_group(const ScenarioSpec& spec);

struct ScenarioResult {
  ScenarioSpec spec;
  std::optional<AdaptationReport> report;
  TaskOutcome outcome;
  std::string error;  // non-empty when the scenario could not be run
};

struct SuiteResult {
  std::vector<ScenarioResult> scenarios;  // sorted by id
  std::vector<MetricsRow> rows;           // one per (group, complexity) cell
};

using ProposerFactory = std::function<std::unique_ptr<Proposer>(const ScenarioInstance&)>;

struct SuiteOptions {
  ProposerFactory proposer;       // default: search over the deployment library
  std::size_t depth = 3;          // for the default proposer
  std::optional<std::size_t> budget;  // overrides the per-spec default
  std::size_t threads = 1;
  MetricsConfig metrics;
  // Applied to the deployment state before adaptation, when set.
  std::optional<std::pair<PerturbMode, double>> perturbation;
};

// Replays `procedure` from the deployment state and scores the subtasks.
TaskOutcome score_outcome(const ScenarioInstance& instance, const Procedure& procedure,
                          const ObjectUniverse& universe, bool adapted_successfully);

ScenarioResult run_scenario(const ScenarioInstance& instance, const SuiteOptions& options);
SuiteResult evaluate_suite(const std::vector<ScenarioSpec>& specs, const SuiteOptions& options = {});

}  // namespace counterplan
