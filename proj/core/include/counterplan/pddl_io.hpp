#pragma once

// Text formats: the operator/domain PDDL subset (prose operator blocks, with
// the parenthesized (:action ...) form accepted for import), the trajectory
// JSON document, SEARCH/REPLACE patch text and numbered task specifications.
//
// Prose operator block:
//
//   MoveGripperToSurroundOrange
//   - Semantic: optional free text
//   - Preconditions:
//       - (GripperSurrounding orange)
//       - (forall (?y - thing) (not (GripperHolding ?y)))
//   - Effects:
//       - (GripperClosed)
//       - (not (GripperOpen))
//
// Domain document: predicate declarations `(Name ?a ?b - type)`, optional
// `objects: a b - type c` lines, then operator blocks. Lines starting with
// '#' or ';' are comments. A document starting with `(define` is read as a
// PDDL domain whose :action forms are grounded.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "counterplan/patch.hpp"
#include "counterplan/symbolic.hpp"

namespace counterplan {

inline constexpr std::string_view kSearchMarker = "<<<<<<< SEARCH";
inline constexpr std::string_view kDividerMarker = "=======";
inline constexpr std::string_view kReplaceMarker = ">>>>>>> REPLACE";

struct Domain {
  PredicateSet predicates;
  ObjectUniverse universe;
  std::vector<ActionOperator> operators;

  friend bool operator==(const Domain&, const Domain&) = default;
};

Domain parse_domain(std::string_view text);
std::string serialize_domain(const Domain& domain);

// Single atoms and literals, e.g. "(OnTopOf apple floor)", "(not (Open x))".
// With a predicate set, unknown predicates and arity mismatches are errors.
Atom parse_atom(std::string_view text, const PredicateSet* predicates = nullptr);
Literal parse_literal(std::string_view text, const PredicateSet* predicates = nullptr);

// One or more prose operator blocks (or (:action ...) forms).
std::vector<ActionOperator> parse_operator_blocks(std::string_view text,
                                                  const PredicateSet* predicates = nullptr,
                                                  std::size_t first_line = 1);
ActionOperator parse_operator_block(std::string_view text, const PredicateSet* predicates = nullptr);

std::string format_operator_block(const ActionOperator& op);
// Blocks separated by one blank line.
std::string format_operator_blocks(std::span<const ActionOperator> ops);
std::string format_operator_blocks(const Procedure& ops);

struct TrajectoryFrame {
  int index = 0;
  State state;
  std::optional<std::string> meta;

  friend bool operator==(const TrajectoryFrame&, const TrajectoryFrame&) = default;
};

struct TrajectoryDocument {
  std::string instruction;
  std::vector<TrajectoryFrame> frames;

  std::vector<State> states() const;

  friend bool operator==(const TrajectoryDocument&, const TrajectoryDocument&) = default;
};

// {"instruction": str, "frames": [{"index": int, "atoms": [str], "meta"?: str}]}
// Without a predicate set the atoms must only agree on arity among themselves.
TrajectoryDocument parse_trajectory(std::string_view text, const PredicateSet* predicates = nullptr);
std::string serialize_trajectory(const TrajectoryDocument& doc);

// Marker lines are matched byte-for-byte; block bodies are whitespace
// tolerant. Throws ParseError naming the offending marker or block.
Patch parse_patch(std::string_view text, const PredicateSet* predicates = nullptr);
std::string serialize_patch(const Patch& patch);

// Semantic description, or the name split on CamelCase/underscores with the
// first word capitalized ("CloseGripperOnGreenCylinder" -> "Close gripper on
// green cylinder").
std::string describe(const ActionOperator& op);
std::string split_camel_case(std::string_view name);

// "1. ...\n2. ...\n"; empty procedure gives the empty string.
std::string emit_task_specification(std::span<const ActionOperator> procedure);
std::string emit_task_specification(const Procedure& procedure);

}  // namespace counterplan
