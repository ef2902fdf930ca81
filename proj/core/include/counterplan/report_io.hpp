#pragma once

// JSON renderings of reports, states, goals and scenario files.

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "counterplan/adaptation.hpp"
#include "counterplan/scenario.hpp"
#include "counterplan/world_model.hpp"

namespace counterplan {

// Either a bare array of atom strings or {"atoms": [...]}.
State parse_state_json(std::string_view text, const PredicateSet* predicates = nullptr);
std::string state_to_json(const State& state);

// Either a bare array of required atoms or {"required": [...], "forbidden": [...]}.
Goal parse_goal_json(std::string_view text, const PredicateSet* predicates = nullptr);
std::string goal_to_json(const Goal& goal);

std::string report_to_json(const AdaptationReport& report);

// One JSON object per patch log entry, newline separated.
std::string patch_log_jsonl(const AdaptationReport& report);

// Summary of a built world model: operators (prose blocks), procedure names,
// object and predicate vocabularies.
std::string world_model_to_json(const WorldModel& model);

// Deployment side of a scenario, carried next to the demonstration in the
// trajectory file under the "scenario" key.
struct ScenarioEnvelope {
  State deployment_initial;
  Goal goal;
  Procedure library;
  Procedure demo_operators;  // operators that produced the demonstration
  std::map<std::string, std::string> labels;
};

std::string serialize_scenario(const ScenarioInstance& instance);
// Absent when the document has no "scenario" key. Throws ParseError on a
// malformed envelope.
std::optional<ScenarioEnvelope> parse_scenario_envelope(std::string_view text,
                                                        const PredicateSet* predicates = nullptr);

std::string suite_result_to_json(const SuiteResult& result);

}  // namespace counterplan
