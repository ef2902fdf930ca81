#include "counterplan/patch.hpp"

#include <algorithm>

namespace counterplan {

namespace {

bool same_operator(const OperatorPtr& a, const OperatorPtr& b) { return a == b || *a == *b; }

bool matches_at(const Procedure& procedure, const Procedure& search, std::size_t start) {
  for (std::size_t i = 0; i < search.size(); ++i)
    if (!same_operator(procedure[start + i], search[i])) return false;
  return true;
}

}  // namespace

bool Patch::is_identity() const {
  return search.size() == replace.size() &&
         std::equal(search.begin(), search.end(), replace.begin(), same_operator);
}

std::size_t count_matches(const Procedure& procedure, const Procedure& search) {
  if (search.empty() || search.size() > procedure.size()) return 0;
  std::size_t n = 0;
  for (std::size_t s = 0; s + search.size() <= procedure.size(); ++s)
    if (matches_at(procedure, search, s)) ++n;
  return n;
}

PatchApplication apply_patch(const Procedure& procedure, const Patch& patch) {
  if (patch.search.empty()) throw PatchError(PatchError::Kind::invalid, "patch has an empty SEARCH block");
  std::size_t found = procedure.size();
  std::size_t count = 0;
  for (std::size_t s = 0; s + patch.search.size() <= procedure.size(); ++s) {
    if (matches_at(procedure, patch.search, s)) {
      if (count == 0) found = s;
      ++count;
    }
  }
  if (count == 0)
    throw PatchError(PatchError::Kind::no_match,
                     "SEARCH block starting with '" + patch.search.front()->name() +
                         "' does not match any window of the procedure");
  if (count > 1)
    throw PatchError(PatchError::Kind::ambiguous,
                     "SEARCH block matches " + std::to_string(count) + " windows of the procedure");

  PatchApplication out;
  out.window_start = found;
  out.window_length = patch.replace.size();
  out.procedure.reserve(procedure.size() - patch.search.size() + patch.replace.size());
  out.procedure.insert(out.procedure.end(), procedure.begin(), procedure.begin() + found);
  out.procedure.insert(out.procedure.end(), patch.replace.begin(), patch.replace.end());
  out.procedure.insert(out.procedure.end(), procedure.begin() + found + patch.search.size(),
                       procedure.end());
  return out;
}

}  // namespace counterplan
