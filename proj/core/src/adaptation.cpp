#include "counterplan/adaptation.hpp"

#include <algorithm>

#include "counterplan/pddl_io.hpp"

namespace counterplan {

Goal::Goal(std::set<Atom> req, std::set<Atom> forb) : required(std::move(req)), forbidden(std::move(forb)) {
  for (const auto& a : required)
    if (forbidden.count(a)) throw InvalidValue("goal both requires and forbids " + a.str());
}

bool goal_satisfied(const State& state, const Goal& goal) {
  for (const auto& a : goal.required)
    if (!state.contains(a)) return false;
  for (const auto& a : goal.forbidden)
    if (state.contains(a)) return false;
  return true;
}

std::vector<Literal> unmet_goal_literals(const State& state, const Goal& goal) {
  std::vector<Literal> out;
  for (const auto& a : goal.required)
    if (!state.contains(a)) out.push_back(Literal::pos(a));
  for (const auto& a : goal.forbidden)
    if (state.contains(a)) out.push_back(Literal::neg(a));
  std::sort(out.begin(), out.end());
  return out;
}

GoalProjection GoalProjection::keep_all() { return GoalProjection{}; }

GoalProjection GoalProjection::physics() {
  GoalProjection p;
  p.keep = physics_predicates();
  return p;
}

Goal derive_goal(const State& final_demo_state, const GoalProjection& mapping) {
  std::set<Atom> required;
  for (const auto& a : final_demo_state) {
    if (mapping.keep && !mapping.keep->count(a.predicate())) continue;
    std::vector<ObjectName> args;
    for (const auto& o : a.args()) {
      auto it = mapping.objects.find(o);
      if (it != mapping.objects.end()) {
        args.push_back(it->second);
      } else if (mapping.strict) {
        throw ProjectionError("goal atom " + a.str() + " names unmapped object '" + o.str() +
                              "'; supply an explicit goal");
      } else {
        args.push_back(o);
      }
    }
    required.insert(Atom(a.predicate(), std::move(args)));
  }
  return Goal(std::move(required));
}

std::string to_string(AdaptationStatus status) {
  switch (status) {
    case AdaptationStatus::success: return "Success";
    case AdaptationStatus::budget_exhausted: return "BudgetExhausted";
    case AdaptationStatus::patch_rejected: return "PatchRejected";
    case AdaptationStatus::stuck: return "Stuck";
  }
  return "Unknown";
}

std::string to_string(PatchLogEntry::Outcome outcome) {
  switch (outcome) {
    case PatchLogEntry::Outcome::accepted: return "accepted";
    case PatchLogEntry::Outcome::rejected: return "rejected";
    case PatchLogEntry::Outcome::declined: return "declined";
    case PatchLogEntry::Outcome::failed: return "failed";
  }
  return "unknown";
}

namespace {

void admit_objects(ObjectUniverse& universe, PredicateSet& predicates, const State& state) {
  for (const auto& a : state) {
    for (const auto& o : a.args())
      if (!universe.contains(o)) universe.add(o);
    if (!predicates.contains(a.predicate())) predicates.add(PredicateSchema(a.predicate(), a.arity()));
  }
}

std::optional<State> anchor_for(const WorldModel& model, const Procedure& executed, const OperatorPtr& op) {
  const auto earlier = static_cast<std::size_t>(std::count(executed.begin(), executed.end(), op));
  std::size_t seen = 0;
  for (std::size_t j = 0; j < model.procedure.size(); ++j) {
    if (model.procedure[j] != op) continue;
    if (seen++ == earlier) {
      if (j + 1 < model.demonstration.size()) return model.demonstration[j + 1];
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::string violations_text(const std::vector<Violation>& vs) {
  std::string out;
  for (const auto& v : vs) out += (out.empty() ? "" : " ") + v.str();
  return out;
}

struct Verification {
  bool accepted = false;
  std::string reason;
  Procedure procedure;
};

Verification verify_patch(const Procedure& procedure, const Patch& patch, const State& initial,
                          const ObjectUniverse& universe) {
  Verification v;
  PatchApplication applied;
  try {
    applied = apply_patch(procedure, patch);
  } catch (const PatchError& e) {
    v.reason = e.what();
    return v;
  }
  try {
    auto r = rollout(initial, applied.procedure, universe);
    const std::size_t window_end = applied.window_start + applied.window_length;
    if (r.first_inconsistency && r.first_inconsistency->index < window_end) {
      const auto& inc = *r.first_inconsistency;
      v.reason = "patched action " + std::to_string(inc.index + 1) + " (" +
                 applied.procedure[inc.index]->name() + ") still has unmet preconditions: " +
                 violations_text(inc.violations);
      return v;
    }
  } catch (const Error& e) {
    v.reason = std::string("patched procedure does not execute: ") + e.what();
    return v;
  }
  v.accepted = true;
  v.procedure = std::move(applied.procedure);
  return v;
}

}  // namespace

AdaptationReport adapt(const WorldModel& model, const State& counterfactual_initial, const Goal& goal,
                       Proposer& proposer, std::size_t budget, const AdaptOptions& options) {
  if (budget == 0) throw InvalidValue("exploration budget must be at least 1");
  AdaptationReport report;
  report.budget = budget;
  report.universe = model.universe;
  PredicateSet predicates = model.predicates;
  admit_objects(report.universe, predicates, counterfactual_initial);
  admit_objects(report.universe, predicates, State(goal.required));
  admit_objects(report.universe, predicates, State(goal.forbidden));

  Procedure procedure = model.procedure;
  auto finish = [&](AdaptationStatus status, std::string message, const RolloutResult& r) {
    report.status = status;
    report.message = std::move(message);
    report.adapted = procedure;
    report.counterfactual_states = r.states;
    return report;
  };

  for (;;) {
    auto r = rollout(counterfactual_initial, procedure, report.universe);
    ++report.iterations;
    if (!r.first_inconsistency && goal_satisfied(r.final_state(), goal))
      return finish(AdaptationStatus::success, "goal reached", r);
    if (report.explorations_used >= budget)
      return finish(AdaptationStatus::budget_exhausted,
                    "exploration budget of " + std::to_string(budget) + " used up", r);

    ProposerContext ctx;
    ctx.kind = ProposerContext::Kind::patch;
    ctx.instruction = model.instruction;
    ctx.universe = report.universe;
    ctx.predicates = predicates;
    ctx.prefix_states = r.states;
    if (r.first_inconsistency) {
      const auto& inc = *r.first_inconsistency;
      const auto t = static_cast<std::ptrdiff_t>(inc.index);
      ctx.executed.assign(procedure.begin(), procedure.begin() + t);
      ctx.erroneous = procedure[inc.index];
      ctx.remaining.assign(procedure.begin() + t + 1, procedure.end());
      ctx.current_state = r.states[inc.index];
      for (const auto& v : inc.violations) ctx.violated.push_back(v.literal);
      ctx.anchor = anchor_for(model, ctx.executed, ctx.erroneous);
    } else {
      ctx.goal_gap = true;
      ctx.executed = procedure;
      ctx.current_state = r.final_state();
      ctx.violated = unmet_goal_literals(r.final_state(), goal);
    }

    bool progressed = false;
    for (std::size_t attempt = 0; attempt < 2 && !progressed; ++attempt) {
      if (report.explorations_used >= budget)
        return finish(AdaptationStatus::budget_exhausted,
                      "exploration budget of " + std::to_string(budget) + " used up before a retry", r);
      ++report.explorations_used;
      auto response = proposer.propose(ctx);

      PatchLogEntry entry;
      entry.exploration = report.explorations_used;
      entry.attempt = attempt;
      entry.goal_gap = ctx.goal_gap;
      entry.inconsistency = r.first_inconsistency;
      if (ctx.goal_gap) entry.unmet_goal = ctx.violated;
      if (ctx.erroneous) entry.erroneous_action = ctx.erroneous->name();
      entry.anchor = ctx.anchor;
      entry.rejection_reason = ctx.rejection_reason;
      entry.rationale = response.rationale;

      if (response.declined()) {
        entry.outcome = PatchLogEntry::Outcome::declined;
        entry.detail = "proposer declined";
        report.patches.push_back(std::move(entry));
        if (ctx.goal_gap)
          return finish(AdaptationStatus::stuck, "procedure completes but the goal is unmet and the proposer declined",
                        r);
        break;
      }
      if (const auto* f = response.failure()) {
        entry.outcome = PatchLogEntry::Outcome::failed;
        entry.detail = to_string(f->kind) + ": " + f->message;
        entry.raw = f->raw;
        if (f->transport_level()) ++report.transport_failures;
        report.patches.push_back(std::move(entry));
        break;
      }

      std::string reason;
      if (const auto* patch = response.patch()) {
        entry.patch = *patch;
        auto v = verify_patch(procedure, *patch, counterfactual_initial, report.universe);
        if (v.accepted) {
          procedure = std::move(v.procedure);
          entry.outcome = PatchLogEntry::Outcome::accepted;
          entry.detail = "patched window executes";
          progressed = true;
        } else {
          reason = v.reason;
        }
      } else {
        reason = "expected a patch, received an operator";
      }
      if (!progressed) {
        entry.outcome = PatchLogEntry::Outcome::rejected;
        entry.detail = reason;
      }
      report.patches.push_back(std::move(entry));
      if (progressed) break;
      if (attempt == 0 && options.retry_rejected) {
        ctx.rejection_reason = reason;
        continue;
      }
      return finish(AdaptationStatus::patch_rejected, "patch rejected: " + reason, r);
    }
  }
}

std::string format_patch_log(const AdaptationReport& report) {
  std::string out;
  for (const auto& e : report.patches) {
    out += "# exploration " + std::to_string(e.exploration);
    if (e.attempt > 0) out += " (retry)";
    out += ": " + to_string(e.outcome);
    if (e.goal_gap) {
      out += " | goal gap:";
      for (const auto& l : e.unmet_goal) out += " " + l.str();
    } else if (e.inconsistency) {
      out += " | action " + std::to_string(e.inconsistency->index + 1);
      if (e.erroneous_action) out += " " + *e.erroneous_action;
      out += " unmet: " + violations_text(e.inconsistency->violations);
    }
    out += "\n";
    if (!e.detail.empty()) out += "# " + e.detail + "\n";
    if (e.patch) out += serialize_patch(*e.patch);
    out += "\n";
  }
  return out;
}

}  // namespace counterplan
