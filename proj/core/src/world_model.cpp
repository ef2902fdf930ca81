#include "counterplan/world_model.hpp"

#include <cstdint>
#include <cstdio>
#include <map>

namespace counterplan {

Vocabulary collect_vocabulary(std::span<const State> states) {
  Vocabulary v;
  std::map<std::string, std::size_t> arity;
  for (const auto& s : states) {
    for (const auto& a : s) {
      auto [it, inserted] = arity.emplace(a.predicate(), a.arity());
      if (!inserted && it->second != a.arity())
        throw VocabularyError("predicate '" + a.predicate() + "' appears with arities " +
                              std::to_string(it->second) + " and " + std::to_string(a.arity()));
      for (const auto& o : a.args()) v.universe.add(o);
    }
  }
  for (const auto& [name, n] : arity) v.predicates.add(PredicateSchema(name, n));
  return v;
}

namespace {

std::uint32_t fnv1a(const std::string& text) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : text) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

}  // namespace

ActionOperator abduce_operator_default(const State& prev, const State& next) {
  if (prev == next) return ActionOperator("NoOp", Condition{}, EffectSpec{}, std::nullopt, true);
  auto d = state_diff(prev, next);
  std::vector<Literal> pre;
  std::vector<Literal> eff;
  std::string key;
  for (const auto& a : d.dels) pre.push_back(Literal::pos(a));
  for (const auto& a : d.adds) pre.push_back(Literal::neg(a));
  for (const auto& a : d.adds) {
    eff.push_back(Literal::pos(a));
    key += "+" + a.str();
  }
  for (const auto& a : d.dels) {
    eff.push_back(Literal::neg(a));
    key += "-" + a.str();
  }
  char name[24];
  std::snprintf(name, sizeof name, "Abduced_%08x", static_cast<unsigned>(fnv1a(key)));
  return ActionOperator(name, Condition(std::move(pre)), EffectSpec(std::move(eff)));
}

WorldModelError::WorldModelError(std::size_t transition, std::vector<Violation> violations,
                                 const std::string& detail)
    : Error("transition " + std::to_string(transition) + ": " + detail),
      transition_(transition),
      violations_(std::move(violations)) {}

namespace {

OperatorPtr intern(Procedure& operators, ActionOperator op) {
  for (const auto& existing : operators)
    if (*existing == op) return existing;
  operators.push_back(make_operator(std::move(op)));
  return operators.back();
}

// Empty string when `op` reproduces prev -> next exactly.
std::string check_operator(const ActionOperator& op, const State& prev, const State& next,
                           const WorldModel& model, std::vector<Violation>& violations) {
  try {
    check_vocabulary(op, model.universe, &model.predicates);
    auto r = symbolic_verify(prev, op, model.universe);
    if (!r.pass) {
      violations = r.violations;
      std::string out = "operator '" + op.name() + "' has unmet preconditions:";
      for (const auto& v : r.violations) out += " " + v.str();
      return out;
    }
    if (r.next != next) {
      auto d = state_diff(next, r.next);
      std::string out = "operator '" + op.name() + "' does not reproduce the next frame;";
      if (!d.dels.empty()) {
        out += " fails to produce";
        for (const auto& a : d.dels) out += " " + a.str();
      }
      if (!d.adds.empty()) {
        out += " also produces";
        for (const auto& a : d.adds) out += " " + a.str();
      }
      violations.clear();
      return out;
    }
  } catch (const Error& e) {
    violations.clear();
    return std::string("operator '") + op.name() + "' rejected: " + e.what();
  }
  return {};
}

}  // namespace

WorldModel build_world_model(const TrajectoryDocument& trajectory, Proposer* proposer,
                             const BuildOptions& options) {
  if (trajectory.frames.empty()) throw InvalidValue("trajectory has no frames");
  if (options.retry_limit < 1) throw InvalidValue("retry_limit must be at least 1");

  WorldModel model;
  model.instruction = trajectory.instruction;
  model.demonstration = trajectory.states();
  auto vocab = collect_vocabulary(model.demonstration);
  if (options.domain != nullptr) {
    model.universe = options.domain->universe;
    model.universe.merge(vocab.universe);
    model.predicates = options.domain->predicates;
    for (const auto& s : vocab.predicates.schemas()) {
      if (!model.predicates.contains(s.name))
        throw VocabularyError("frames use predicate '" + s.name + "' missing from the domain");
      if (model.predicates.at(s.name).arity() != s.arity())
        throw VocabularyError("frames use predicate '" + s.name + "' with arity " + std::to_string(s.arity()));
    }
  } else {
    model.universe = std::move(vocab.universe);
    model.predicates = std::move(vocab.predicates);
  }

  const auto& states = model.demonstration;
  for (std::size_t t = 0; t + 1 < states.size(); ++t) {
    const State& prev = states[t];
    const State& next = states[t + 1];
    std::optional<ActionOperator> accepted;
    std::vector<Violation> last_violations;
    std::string last_reason;

    if (proposer == nullptr) {
      accepted = abduce_operator_default(prev, next);
    } else {
      auto ctx = ProposerContext::for_operator(prev, next, model.universe, model.instruction, t);
      ctx.predicates = model.predicates;
      for (std::size_t attempt = 0; attempt <= options.retry_limit && !accepted; ++attempt) {
        auto response = proposer->propose(ctx);
        std::optional<ActionOperator> candidate;
        if (response.declined()) {
          candidate = abduce_operator_default(prev, next);
        } else if (const auto* op = response.op()) {
          candidate = *op;
        } else if (const auto* f = response.failure()) {
          last_reason = "proposer failure (" + to_string(f->kind) + "): " + f->message;
        } else {
          last_reason = "proposer returned a patch for an operator request";
        }
        if (candidate) {
          last_reason = check_operator(*candidate, prev, next, model, last_violations);
          if (last_reason.empty()) accepted = std::move(candidate);
        }
        ctx.rejection_reason = last_reason;
      }
    }
    if (!accepted)
      throw WorldModelError(t + 1, std::move(last_violations),
                            "no verified operator after " + std::to_string(options.retry_limit + 1) +
                                " proposals; last: " + last_reason);
    model.procedure.push_back(intern(model.operators, std::move(*accepted)));
  }

  auto verdict = verify_trajectory(states, model.procedure, model.universe);
  if (!verdict.verified) throw WorldModelError(verdict.t + 1, verdict.violations, verdict.describe());
  return model;
}

}  // namespace counterplan
