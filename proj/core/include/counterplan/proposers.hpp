#pragma once

// The proposer abstraction: given an operator or patch request, return an
// operator, a patch, a decline, or a structured failure.

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "counterplan/errors.hpp"
#include "counterplan/executor.hpp"
#include "counterplan/patch.hpp"
#include "counterplan/symbolic.hpp"

namespace counterplan {

struct ProposerContext {
  enum class Kind { operator_abduction, patch };

  Kind kind = Kind::patch;
  std::string instruction;
  ObjectUniverse universe;
  PredicateSet predicates;  // empty means "do not check predicate names"
  std::optional<std::string> rejection_reason;

  // operator requests
  State prev;
  State next;
  StateDiff diff;
  std::size_t transition = 0;  // 0-based

  // patch requests
  Procedure executed;     // prefix before the erroneous action
  OperatorPtr erroneous;  // null for goal-gap requests
  Procedure remaining;    // suffix after the erroneous action
  State current_state;    // state in which the erroneous action failed
  std::vector<Literal> violated;  // unmet preconditions, or unmet goal literals
  bool goal_gap = false;
  // prefix_states[i] is the state before executed[i]; the last entry is current_state.
  std::vector<State> prefix_states;
  // Demonstration state that followed the erroneous action, when it maps
  // back to a demonstrated step.
  std::optional<State> anchor;

  std::size_t erroneous_index() const noexcept { return executed.size(); }
  Procedure full_procedure() const;

  static ProposerContext for_operator(const State& prev, const State& next, const ObjectUniverse& universe,
                                      std::string instruction = {}, std::size_t transition = 0);
};

struct Decline {
  friend bool operator==(const Decline&, const Decline&) = default;
};

struct ProposerFailure {
  enum class Kind { timeout, transport, malformed };

  Kind kind = Kind::malformed;
  std::string message;
  std::string raw;  // unparsed payload, kept for audit

  bool transport_level() const noexcept { return kind != Kind::malformed; }
};

std::string to_string(ProposerFailure::Kind kind);

struct ProposerResponse {
  std::variant<Decline, ActionOperator, Patch, ProposerFailure> payload;
  std::string rationale;

  bool declined() const noexcept { return std::holds_alternative<Decline>(payload); }
  const ActionOperator* op() const noexcept { return std::get_if<ActionOperator>(&payload); }
  const Patch* patch() const noexcept { return std::get_if<Patch>(&payload); }
  const ProposerFailure* failure() const noexcept { return std::get_if<ProposerFailure>(&payload); }

  static ProposerResponse decline(std::string rationale = {});
  static ProposerResponse fail(ProposerFailure::Kind kind, std::string message, std::string raw = {});
};

class Proposer {
 public:
  virtual ~Proposer() = default;
  virtual ProposerResponse propose(const ProposerContext& ctx) = 0;
  virtual std::string name() const = 0;
};

// --- wire protocol ---------------------------------------------------------

// A response before interpretation against a context: either a decline or a
// payload string (patch text or an operator block).
struct RawResponse {
  bool decline = false;
  std::string rationale;
  std::string payload;
};

// One JSON object, no trailing newline. Patch requests carry exactly the
// fields kind, instruction, objects, executed_actions, erroneous_action,
// remaining_actions, error_state, unfulfilled_preconditions and, when set,
// rejection_reason.
std::string encode_request(const ProposerContext& ctx);

// Throws ParseError for malformed JSON or missing fields.
RawResponse decode_response(std::string_view text);
std::string encode_response(const RawResponse& response);

// Parses the payload according to ctx.kind. Parse failures become a
// malformed ProposerFailure carrying the raw text.
ProposerResponse interpret_response(const RawResponse& raw, const ProposerContext& ctx);

// --- scripted --------------------------------------------------------------

// Replays a fixed list of responses in order, then declines.
class ScriptedProposer : public Proposer {
 public:
  explicit ScriptedProposer(std::vector<RawResponse> fixture);

  ProposerResponse propose(const ProposerContext& ctx) override;
  std::string name() const override { return "scripted"; }

  std::size_t consumed() const noexcept { return next_; }
  std::size_t size() const noexcept { return fixture_.size(); }

 private:
  std::vector<RawResponse> fixture_;
  std::size_t next_ = 0;
};

// Fixture file: a JSON array of response objects ({"rationale", "payload"}
// or {"decline": true}).
std::vector<RawResponse> parse_scripted_fixture(std::string_view text);

// --- search ----------------------------------------------------------------

// Predicate renaming applied before comparing outcomes, so that operators
// of one embodiment can stand in for their counterparts.
using CounterpartMap = std::map<std::string, std::string>;
const CounterpartMap& default_counterparts();

struct SearchOptions {
  std::size_t depth = 2;  // maximum edits, also the window radius
  CounterpartMap counterparts = default_counterparts();
};

struct SearchCandidate {
  std::size_t window_start = 0;
  std::size_t window_end = 0;  // exclusive
  Procedure replace;
  std::size_t edits = 0;
};

// Deterministic bounded repair search over windows around the erroneous
// action. Reentrant. A patch request identical to the previous one reuses
// its answer, so repeated rounds on an unrepairable gap stay cheap.
class SearchProposer : public Proposer {
 public:
  SearchProposer(Procedure library, SearchOptions options);

  ProposerResponse propose(const ProposerContext& ctx) override;
  std::string name() const override { return "search"; }

  // Best candidate, or nullopt when nothing within depth qualifies.
  std::optional<SearchCandidate> search(const ProposerContext& ctx) const;

  const Procedure& library() const noexcept { return library_; }
  const SearchOptions& options() const noexcept { return options_; }

 private:
  struct Memo;
  ProposerResponse search_response(const ProposerContext& ctx) const;

  Procedure library_;
  SearchOptions options_;
  std::shared_ptr<Memo> memo_;
};

ProposerResponse search_propose(const Procedure& library, const ProposerContext& ctx, std::size_t depth);

// Window outcome test shared by the search proposer and its tests. The
// window's net effects (later effects override earlier ones) must hold in
// `outcome` after counterpart renaming: every net add present, every net
// delete absent. Side effects outside the window's footprint are tolerated.
bool covers_window_effects(const Procedure& window, const State& outcome, const CounterpartMap& counterparts);

// --- external --------------------------------------------------------------

struct ExternalEndpoint {
  enum class Kind { process, http };

  Kind kind = Kind::process;
  std::string command;  // process: shell command line
  std::string host;     // http
  int port = 80;
  std::string path = "/";

  // "exec:<command line>" or "http://host[:port][/path]". A bare string is
  // treated as a command line. Throws ParseError.
  static ExternalEndpoint parse(std::string_view spec);
  std::string str() const;
};

class TransportError : public Error {
 public:
  TransportError(const std::string& message, bool timeout = false) : Error(message), timeout_(timeout) {}
  bool timeout() const noexcept { return timeout_; }

 private:
  bool timeout_;
};

// Request/response transport. One request line in, one response line out.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string exchange(const std::string& request, std::chrono::milliseconds timeout) = 0;
};

std::unique_ptr<Transport> make_transport(const ExternalEndpoint& endpoint);

// Talks to an external proposer over line-delimited JSON. Requests on one
// instance are serialized.
class ExternalProposer : public Proposer {
 public:
  ExternalProposer(ExternalEndpoint endpoint, std::chrono::milliseconds timeout);
  ExternalProposer(std::unique_ptr<Transport> transport, std::chrono::milliseconds timeout);
  ~ExternalProposer() override;

  ProposerResponse propose(const ProposerContext& ctx) override;
  std::string name() const override { return "external"; }

  std::size_t transport_failures() const noexcept { return transport_failures_; }

 private:
  std::unique_ptr<Transport> transport_;
  std::chrono::milliseconds timeout_;
  std::mutex mutex_;
  std::size_t transport_failures_ = 0;
};

}  // namespace counterplan
