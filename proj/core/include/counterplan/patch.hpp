#pragma once

#include <cstddef>
#include <string>

#include "counterplan/errors.hpp"
#include "counterplan/symbolic.hpp"

namespace counterplan {

// SEARCH/REPLACE rewrite over a contiguous window of a procedure.
struct Patch {
  Procedure search;   // non-empty
  Procedure replace;  // empty means pure removal
  std::string rationale;

  bool is_identity() const;
};

class PatchError : public Error {
 public:
  enum class Kind { no_match, ambiguous, invalid };

  PatchError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct PatchApplication {
  Procedure procedure;
  std::size_t window_start = 0;  // where the replacement begins
  std::size_t window_length = 0; // size of the replacement
};

// Replaces the single window structurally equal to `patch.search`. Operators
// outside the window keep their identity (same pointers).
// Throws PatchError::no_match / ::ambiguous.
PatchApplication apply_patch(const Procedure& procedure, const Patch& patch);

// Number of (possibly overlapping) windows of `procedure` matching `search`.
std::size_t count_matches(const Procedure& procedure, const Procedure& search);

}  // namespace counterplan
