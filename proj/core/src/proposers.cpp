#include "counterplan/proposers.hpp"

namespace counterplan {

Procedure ProposerContext::full_procedure() const {
  Procedure out = executed;
  if (erroneous) out.push_back(erroneous);
  out.insert(out.end(), remaining.begin(), remaining.end());
  return out;
}

ProposerContext ProposerContext::for_operator(const State& prev, const State& next,
                                              const ObjectUniverse& universe, std::string instruction,
                                              std::size_t transition) {
  ProposerContext ctx;
  ctx.kind = Kind::operator_abduction;
  ctx.instruction = std::move(instruction);
  ctx.universe = universe;
  ctx.prev = prev;
  ctx.next = next;
  ctx.diff = state_diff(prev, next);
  ctx.transition = transition;
  return ctx;
}

std::string to_string(ProposerFailure::Kind kind) {
  switch (kind) {
    case ProposerFailure::Kind::timeout: return "timeout";
    case ProposerFailure::Kind::transport: return "transport";
    case ProposerFailure::Kind::malformed: return "malformed";
  }
  return "unknown";
}

ProposerResponse ProposerResponse::decline(std::string rationale) {
  ProposerResponse r;
  r.payload = Decline{};
  r.rationale = std::move(rationale);
  return r;
}

ProposerResponse ProposerResponse::fail(ProposerFailure::Kind kind, std::string message, std::string raw) {
  ProposerResponse r;
  r.payload = ProposerFailure{kind, std::move(message), std::move(raw)};
  return r;
}

ScriptedProposer::ScriptedProposer(std::vector<RawResponse> fixture) : fixture_(std::move(fixture)) {}

ProposerResponse ScriptedProposer::propose(const ProposerContext& ctx) {
  if (next_ >= fixture_.size()) return ProposerResponse::decline("fixture exhausted");
  return interpret_response(fixture_[next_++], ctx);
}

}  // namespace counterplan
