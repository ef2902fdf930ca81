#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "counterplan/errors.hpp"
#include "counterplan/executor.hpp"
#include "counterplan/pddl_io.hpp"
#include "counterplan/proposers.hpp"
#include "counterplan/symbolic.hpp"

namespace counterplan {

struct WorldModel {
  ObjectUniverse universe;
  PredicateSet predicates;
  Procedure operators;  // A, deduplicated
  Procedure procedure;  // one entry per transition, pointing into `operators`
  std::vector<State> demonstration;
  std::string instruction;
};

struct Vocabulary {
  ObjectUniverse universe;
  PredicateSet predicates;  // lexicographic by name
};

// Unions of objects and predicates over all frames. Throws VocabularyError
// when one predicate appears with two arities.
Vocabulary collect_vocabulary(std::span<const State> states);

// pre = dels as positive literals + adds as negative literals, eff = diff.
// Identical states give a no-op operator named "NoOp".
ActionOperator abduce_operator_default(const State& prev, const State& next);

class WorldModelError : public Error {
 public:
  WorldModelError(std::size_t transition, std::vector<Violation> violations, const std::string& detail);

  std::size_t transition() const noexcept { return transition_; }  // 1-based
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::size_t transition_;
  std::vector<Violation> violations_;
};

struct BuildOptions {
  std::size_t retry_limit = 3;  // re-requests after the first proposal
  const Domain* domain = nullptr;  // declared vocabulary, merged with the frames'
};

// Abduces and verifies one operator per transition. A null proposer, or a
// decline, uses abduce_operator_default.
WorldModel build_world_model(const TrajectoryDocument& trajectory, Proposer* proposer,
                             const BuildOptions& options = {});

}  // namespace counterplan
