#include "counterplan/report_io.hpp"

#include <json.hpp>

#include "counterplan/pddl_io.hpp"

namespace counterplan {

using json = nlohmann::ordered_json;

namespace {

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed ") + what + " JSON: " + e.what());
  }
}

std::set<Atom> atom_set(const json& arr, const char* what, const PredicateSet* predicates) {
  if (!arr.is_array()) throw ParseError(std::string(what) + " must be an array of atom strings");
  std::set<Atom> out;
  for (const auto& a : arr) {
    if (!a.is_string()) throw ParseError(std::string(what) + " must contain only strings");
    out.insert(parse_atom(a.get<std::string>(), predicates));
  }
  return out;
}

json atoms_json(const State& s) {
  json arr = json::array();
  for (const auto& a : s) arr.push_back(a.str());
  return arr;
}

json atoms_json(const std::set<Atom>& s) {
  json arr = json::array();
  for (const auto& a : s) arr.push_back(a.str());
  return arr;
}

json names_json(const Procedure& p) {
  json arr = json::array();
  for (const auto& op : p) arr.push_back(op->name());
  return arr;
}

json inconsistency_json(const Inconsistency& inc) {
  json v = json::array();
  for (const auto& x : inc.violations) v.push_back(x.str());
  json out;
  out["action_index"] = inc.index + 1;
  out["action"] = inc.violations.empty() ? std::string() : inc.violations.front().action_name;
  out["violations"] = std::move(v);
  return out;
}

json entry_json(const PatchLogEntry& e) {
  json j;
  j["exploration"] = e.exploration;
  j["attempt"] = e.attempt;
  j["outcome"] = to_string(e.outcome);
  j["goal_gap"] = e.goal_gap;
  j["inconsistency"] = e.inconsistency ? inconsistency_json(*e.inconsistency) : json(nullptr);
  json unmet = json::array();
  for (const auto& l : e.unmet_goal) unmet.push_back(l.str());
  j["unmet_goal"] = std::move(unmet);
  j["erroneous_action"] = e.erroneous_action ? json(*e.erroneous_action) : json(nullptr);
  j["anchor"] = e.anchor ? atoms_json(*e.anchor) : json(nullptr);
  j["rejection_reason"] = e.rejection_reason ? json(*e.rejection_reason) : json(nullptr);
  j["patch"] = e.patch ? json(serialize_patch(*e.patch)) : json(nullptr);
  j["detail"] = e.detail;
  j["rationale"] = e.rationale;
  if (!e.raw.empty()) j["raw"] = e.raw;
  return j;
}

}  // namespace

State parse_state_json(std::string_view text, const PredicateSet* predicates) {
  auto doc = parse_json(text, "state");
  if (doc.is_object()) {
    if (!doc.contains("atoms")) throw ParseError("state object needs an 'atoms' array");
    return State(atom_set(doc["atoms"], "'atoms'", predicates));
  }
  return State(atom_set(doc, "state", predicates));
}

std::string state_to_json(const State& state) {
  json j;
  j["atoms"] = atoms_json(state);
  return j.dump(2) + "\n";
}

Goal parse_goal_json(std::string_view text, const PredicateSet* predicates) {
  auto doc = parse_json(text, "goal");
  if (doc.is_array()) return Goal(atom_set(doc, "goal", predicates));
  if (!doc.is_object()) throw ParseError("goal must be an array or an object");
  for (const auto& [k, v] : doc.items())
    if (k != "required" && k != "forbidden") throw ParseError("unknown goal key '" + k + "'");
  std::set<Atom> req, forb;
  if (doc.contains("required")) req = atom_set(doc["required"], "'required'", predicates);
  if (doc.contains("forbidden")) forb = atom_set(doc["forbidden"], "'forbidden'", predicates);
  try {
    return Goal(std::move(req), std::move(forb));
  } catch (const InvalidValue& e) {
    throw ParseError(e.what());
  }
}

std::string goal_to_json(const Goal& goal) {
  json j;
  j["required"] = atoms_json(goal.required);
  j["forbidden"] = atoms_json(goal.forbidden);
  return j.dump(2) + "\n";
}

std::string report_to_json(const AdaptationReport& report) {
  json j;
  j["status"] = to_string(report.status);
  j["message"] = report.message;
  j["explorations_used"] = report.explorations_used;
  j["budget"] = report.budget;
  j["iterations"] = report.iterations;
  j["transport_failures"] = report.transport_failures;
  j["adapted_procedure"] = names_json(report.adapted);
  j["operators"] = format_operator_blocks(report.adapted);
  json states = json::array();
  for (const auto& s : report.counterfactual_states) states.push_back(atoms_json(s));
  j["counterfactual_states"] = std::move(states);
  json patches = json::array();
  for (const auto& e : report.patches) patches.push_back(entry_json(e));
  j["patches"] = std::move(patches);
  return j.dump(2) + "\n";
}

std::string patch_log_jsonl(const AdaptationReport& report) {
  std::string out;
  for (const auto& e : report.patches) out += entry_json(e).dump() + "\n";
  return out;
}

std::string world_model_to_json(const WorldModel& model) {
  json j;
  j["instruction"] = model.instruction;
  json objs = json::array();
  for (const auto& [o, t] : model.universe.objects()) objs.push_back(o.str());
  j["objects"] = std::move(objs);
  json preds = json::array();
  for (const auto& p : model.predicates.schemas()) preds.push_back(p.name);
  j["predicates"] = std::move(preds);
  j["procedure"] = names_json(model.procedure);
  j["operators"] = format_operator_blocks(model.operators);
  return j.dump(2) + "\n";
}

std::string serialize_scenario(const ScenarioInstance& instance) {
  auto doc = json::parse(serialize_trajectory(instance.demonstration));
  json env;
  env["id"] = instance.spec.id;
  env["deployment_initial"] = atoms_json(instance.deployment_initial);
  env["goal"] = json::parse(goal_to_json(instance.goal));
  env["library"] = format_operator_blocks(instance.library);
  Procedure demo_ops;
  std::set<std::string> seen;
  for (const auto& op : instance.demo_procedure)
    if (seen.insert(op->name()).second) demo_ops.push_back(op);
  env["demonstration_operators"] = format_operator_blocks(demo_ops);
  json labels = json::object();
  for (const auto& [k, v] : instance.labels) labels[k] = v;
  env["labels"] = std::move(labels);
  env["budget"] = instance.budget;
  doc["scenario"] = std::move(env);
  return doc.dump(2) + "\n";
}

std::optional<ScenarioEnvelope> parse_scenario_envelope(std::string_view text, const PredicateSet* predicates) {
  auto doc = parse_json(text, "scenario");
  if (!doc.is_object() || !doc.contains("scenario")) return std::nullopt;
  const auto& env = doc["scenario"];
  if (!env.is_object()) throw ParseError("'scenario' must be an object");
  ScenarioEnvelope out;
  if (env.contains("deployment_initial"))
    out.deployment_initial = State(atom_set(env["deployment_initial"], "'deployment_initial'", predicates));
  if (env.contains("goal")) out.goal = parse_goal_json(env["goal"].dump(), predicates);
  if (env.contains("library")) {
    if (!env["library"].is_string()) throw ParseError("'library' must be a string of operator blocks");
    out.library = wrap(parse_operator_blocks(env["library"].get<std::string>(), predicates));
  }
  if (env.contains("demonstration_operators")) {
    if (!env["demonstration_operators"].is_string())
      throw ParseError("'demonstration_operators' must be a string of operator blocks");
    out.demo_operators = wrap(parse_operator_blocks(env["demonstration_operators"].get<std::string>(), predicates));
  }
  if (env.contains("labels")) {
    if (!env["labels"].is_object()) throw ParseError("'labels' must be an object");
    for (const auto& [k, v] : env["labels"].items()) {
      if (!v.is_string()) throw ParseError("label of '" + k + "' must be a string");
      out.labels[k] = v.get<std::string>();
    }
  }
  return out;
}

std::string suite_result_to_json(const SuiteResult& result) {
  json j;
  json rows = json::array();
  for (const auto& r : result.rows) {
    json row;
    row["factor"] = r.factor;
    row["complexity"] = r.complexity;
    row["tasks"] = r.tasks;
    row["SR"] = {{"mean", r.sr.mean}, {"se", r.sr.se}};
    row["GC"] = {{"mean", r.gc.mean}, {"se", r.gc.se}};
    row["PD"] = r.pd ? json{{"mean", r.pd->mean}, {"se", r.pd->se}} : json(nullptr);
    row["composite"] = r.composite ? json(*r.composite) : json(nullptr);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  json scenarios = json::array();
  for (const auto& s : result.scenarios) {
    json e;
    e["id"] = s.spec.id;
    e["factor"] = to_string(s.spec.factor);
    e["complexity"] = to_string(s.spec.complexity);
    e["level"] = s.spec.level;
    e["success"] = s.outcome.success;
    e["subtasks_achieved"] = s.outcome.subtasks_achieved;
    e["subtasks_total"] = s.outcome.subtasks_total;
    e["status"] = s.report ? json(to_string(s.report->status)) : json(nullptr);
    e["explorations_used"] = s.report ? json(s.report->explorations_used) : json(nullptr);
    e["patches"] = s.report ? json(s.report->patches.size()) : json(nullptr);
    if (!s.error.empty()) e["error"] = s.error;
    scenarios.push_back(std::move(e));
  }
  j["scenarios"] = std::move(scenarios);
  return j.dump(2) + "\n";
}

}  // namespace counterplan
