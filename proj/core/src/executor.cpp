#include "counterplan/executor.hpp"

#include <algorithm>

#include "counterplan/errors.hpp"

namespace counterplan {

ExecutionResult symbolic_execute(const State& state, const ActionOperator& action,
                                 const ObjectUniverse& universe, std::size_t action_index) {
  check_vocabulary(action, universe);
  ExecutionResult out;
  for (auto& lit : unmet_literals(state, action.pre(), universe))
    out.violations.push_back({std::move(lit), action_index, action.name()});
  if (out.violations.empty()) out.next = state.apply(action.eff().adds(), action.eff().dels());
  return out;
}

VerifyOutcome symbolic_verify(const State& state, const ActionOperator& action,
                              const ObjectUniverse& universe, std::size_t action_index) {
  auto r = symbolic_execute(state, action, universe, action_index);
  VerifyOutcome out;
  out.pass = r.ok();
  if (r.ok()) out.next = std::move(*r.next);
  out.violations = std::move(r.violations);
  return out;
}

namespace {

template <typename Get>
RolloutResult rollout_impl(const State& initial, std::size_t n, Get get, const ObjectUniverse& universe) {
  RolloutResult out;
  out.states.reserve(n + 1);
  out.states.push_back(initial);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = symbolic_execute(out.states.back(), get(i), universe, i);
    if (!r.ok()) {
      out.first_inconsistency = Inconsistency{i, std::move(r.violations)};
      break;
    }
    out.states.push_back(std::move(*r.next));
    ++out.executed;
  }
  return out;
}

}  // namespace

RolloutResult rollout(const State& initial, const Procedure& procedure, const ObjectUniverse& universe) {
  return rollout_impl(
      initial, procedure.size(), [&](std::size_t i) -> const ActionOperator& { return *procedure[i]; },
      universe);
}

RolloutResult rollout(const State& initial, std::span<const ActionOperator> procedure,
                      const ObjectUniverse& universe) {
  return rollout_impl(
      initial, procedure.size(), [&](std::size_t i) -> const ActionOperator& { return procedure[i]; },
      universe);
}

std::string TrajectoryVerdict::describe() const {
  if (verified) return "verified";
  std::string out = "transition " + std::to_string(t + 1) + ": ";
  if (reason == Reason::precondition) {
    out += "unmet preconditions";
    for (const auto& v : violations) out += " " + v.str();
  } else {
    out += "effect mismatch";
    if (!missing.empty()) {
      out += "; missing";
      for (const auto& a : missing) out += " " + a.str();
    }
    if (!unexpected.empty()) {
      out += "; unexpected";
      for (const auto& a : unexpected) out += " " + a.str();
    }
  }
  return out;
}

TrajectoryVerdict verify_trajectory(std::span<const State> states, const Procedure& actions,
                                    const ObjectUniverse& universe, EntailmentMode mode) {
  if (states.empty() || actions.size() != states.size() - 1)
    throw InvalidValue("verify_trajectory needs exactly one action per transition (" +
                       std::to_string(states.size()) + " states, " + std::to_string(actions.size()) +
                       " actions)");
  TrajectoryVerdict out;
  for (std::size_t t = 0; t < actions.size(); ++t) {
    auto r = symbolic_execute(states[t], *actions[t], universe, t);
    if (!r.ok()) {
      out.verified = false;
      out.t = t;
      out.reason = TrajectoryVerdict::Reason::precondition;
      out.violations = std::move(r.violations);
      return out;
    }
    const State& recorded = states[t + 1];
    if (mode == EntailmentMode::exact) {
      std::set_difference(r.next->begin(), r.next->end(), recorded.begin(), recorded.end(),
                          std::back_inserter(out.missing));
    } else {
      const auto& adds = actions[t]->eff().adds();
      std::copy_if(adds.begin(), adds.end(), std::back_inserter(out.missing),
                   [&](const Atom& a) { return !recorded.contains(a); });
    }
    std::set_difference(recorded.begin(), recorded.end(), r.next->begin(), r.next->end(),
                        std::back_inserter(out.unexpected));
    if (!out.missing.empty() || !out.unexpected.empty()) {
      out.verified = false;
      out.t = t;
      out.reason = TrajectoryVerdict::Reason::effect_mismatch;
      return out;
    }
  }
  return out;
}

}  // namespace counterplan
