#include "counterplan/pddl_io.hpp"
#include "counterplan/proposers.hpp"
#include "json.hpp"

namespace counterplan {

using nlohmann::ordered_json;

namespace {

ordered_json state_json(const State& s) {
  auto out = ordered_json::array();
  for (const auto& a : s) out.push_back(a.str());
  return out;
}

ordered_json actions_json(const Procedure& p) {
  auto out = ordered_json::array();
  for (const auto& op : p) out.push_back(format_operator_block(*op));
  return out;
}

}  // namespace

std::string encode_request(const ProposerContext& ctx) {
  ordered_json j;
  auto objects = ordered_json::array();
  for (const auto& [name, type] : ctx.universe.objects()) objects.push_back(name.str());

  if (ctx.kind == ProposerContext::Kind::operator_abduction) {
    j["kind"] = "operator";
    j["instruction"] = ctx.instruction;
    j["objects"] = std::move(objects);
    j["prev_state"] = state_json(ctx.prev);
    j["next_state"] = state_json(ctx.next);
    auto added = ordered_json::array();
    for (const auto& a : ctx.diff.adds) added.push_back(a.str());
    auto deleted = ordered_json::array();
    for (const auto& a : ctx.diff.dels) deleted.push_back(a.str());
    j["added"] = std::move(added);
    j["deleted"] = std::move(deleted);
  } else {
    j["kind"] = "patch";
    j["instruction"] = ctx.instruction;
    j["objects"] = std::move(objects);
    j["executed_actions"] = actions_json(ctx.executed);
    j["erroneous_action"] = ctx.erroneous ? ordered_json(format_operator_block(*ctx.erroneous)) : ordered_json();
    j["remaining_actions"] = actions_json(ctx.remaining);
    j["error_state"] = state_json(ctx.current_state);
    auto unmet = ordered_json::array();
    for (const auto& l : ctx.violated) unmet.push_back(l.str());
    j["unfulfilled_preconditions"] = std::move(unmet);
  }
  if (ctx.rejection_reason) j["rejection_reason"] = *ctx.rejection_reason;
  return j.dump();
}

RawResponse decode_response(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(std::string("response is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("response must be a JSON object");
  RawResponse out;
  if (j.contains("decline")) {
    if (!j["decline"].is_boolean()) throw ParseError("'decline' must be a boolean");
    out.decline = j["decline"].get<bool>();
  }
  if (j.contains("rationale")) {
    if (!j["rationale"].is_string()) throw ParseError("'rationale' must be a string");
    out.rationale = j["rationale"].get<std::string>();
  }
  if (!out.decline) {
    if (!j.contains("payload") || !j["payload"].is_string())
      throw ParseError("response needs a string 'payload' or \"decline\": true");
    out.payload = j["payload"].get<std::string>();
  }
  return out;
}

std::string encode_response(const RawResponse& response) {
  ordered_json j;
  if (response.decline) {
    j["decline"] = true;
    if (!response.rationale.empty()) j["rationale"] = response.rationale;
  } else {
    j["rationale"] = response.rationale;
    j["payload"] = response.payload;
  }
  return j.dump();
}

ProposerResponse interpret_response(const RawResponse& raw, const ProposerContext& ctx) {
  if (raw.decline) return ProposerResponse::decline(raw.rationale);
  const PredicateSet* preds = ctx.predicates.empty() ? nullptr : &ctx.predicates;
  ProposerResponse out;
  out.rationale = raw.rationale;
  try {
    if (ctx.kind == ProposerContext::Kind::patch) {
      auto patch = parse_patch(raw.payload, preds);
      patch.rationale = raw.rationale;
      out.payload = std::move(patch);
    } else {
      out.payload = parse_operator_block(raw.payload, preds);
    }
  } catch (const Error& e) {
    return ProposerResponse::fail(ProposerFailure::Kind::malformed, e.what(), raw.payload);
  }
  return out;
}

std::vector<RawResponse> parse_scripted_fixture(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(std::string("fixture is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("fixture must be a JSON array of responses");
  std::vector<RawResponse> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      out.push_back(decode_response(j[i].dump()));
    } catch (const ParseError& e) {
      throw ParseError("fixture entry " + std::to_string(i + 1) + ": " + e.detail());
    }
  }
  return out;
}

}  // namespace counterplan
