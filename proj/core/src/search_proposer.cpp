#include <algorithm>
#include <mutex>
#include <tuple>

#include "counterplan/proposers.hpp"

namespace counterplan {

namespace {

// Precondition test without building the grounded literal list. A forall-not
// guard fails iff some state atom instantiates its pattern.
bool applicable(const State& s, const ActionOperator& op, const ObjectUniverse& universe) {
  for (const auto& l : op.pre().literals())
    if (s.contains(l.atom) != l.positive()) return false;
  for (const auto& q : op.pre().quantified()) {
    for (const auto& atom : s) {
      if (atom.predicate() != q.predicate || atom.arity() != q.args.size()) continue;
      const ObjectName* bound = nullptr;
      bool match = true;
      for (std::size_t i = 0; i < q.args.size() && match; ++i) {
        if (const auto* o = std::get_if<ObjectName>(&q.args[i])) {
          match = *o == atom.args()[i];
        } else if (bound == nullptr) {
          bound = &atom.args()[i];
        } else {
          match = *bound == atom.args()[i];
        }
      }
      if (!match || bound == nullptr || !universe.contains(*bound)) continue;
      const auto& type = universe.type_of(*bound);
      if (q.type == kRootType || type == q.type) return false;
    }
  }
  return true;
}

bool references_known_objects(const ActionOperator& op, const ObjectUniverse& universe) {
  for (const auto& o : objects_of(op))
    if (!universe.contains(o)) return false;
  return true;
}

Atom rename(const Atom& a, const CounterpartMap& m) {
  auto it = m.find(a.predicate());
  return it == m.end() ? a : Atom(it->second, a.args());
}

std::set<Atom> rename_all(const State& s, const CounterpartMap& m) {
  std::set<Atom> out;
  for (const auto& a : s) out.insert(rename(a, m));
  return out;
}

struct Key {
  std::size_t edits;
  std::size_t window_size;
  std::vector<std::string> names;
  std::size_t window_start;

  bool operator<(const Key& o) const {
    return std::tie(edits, window_size, names, window_start) <
           std::tie(o.edits, o.window_size, o.names, o.window_start);
  }
};

class WindowSearch {
 public:
  WindowSearch(const Procedure& window, std::size_t erroneous_offset, const State& start,
               const Procedure& library, const ObjectUniverse& universe, const CounterpartMap& counterparts,
               std::size_t budget)
      : window_(window),
        erroneous_offset_(erroneous_offset),
        start_(start),
        library_(library),
        universe_(universe),
        counterparts_(counterparts),
        budget_(budget) {}

  // Calls `found(replace, edits)` for every qualifying replacement.
  template <typename F>
  void run(F&& found) {
    Procedure replace;
    dfs(0, 0, 0, false, start_, replace, found);
  }

 private:
  template <typename F>
  void dfs(std::size_t i, unsigned moved, std::size_t cost, bool has_erroneous, const State& s,
           Procedure& replace, F& found) {
    while (i < window_.size() && (moved & (1u << i))) ++i;
    if (i == window_.size()) {
      if (has_erroneous || covers_window_effects(window_, s, counterparts_)) found(replace, cost);
    }
    if (cost < budget_) {
      for (const auto& lib : library_) {
        if (!applicable(s, *lib, universe_)) continue;
        State next = s.apply(lib->eff().adds(), lib->eff().dels());
        replace.push_back(lib);
        dfs(i, moved, cost + 1, has_erroneous, next, replace, found);  // insert
        if (i < window_.size() && !(*lib == *window_[i]))
          dfs(i + 1, moved, cost + 1, has_erroneous, next, replace, found);  // substitute
        replace.pop_back();
      }
    }
    if (i == window_.size()) return;
    const auto& op = window_[i];
    if (applicable(s, *op, universe_)) {  // keep
      State next = s.apply(op->eff().adds(), op->eff().dels());
      replace.push_back(op);
      dfs(i + 1, moved, cost, has_erroneous || i == erroneous_offset_, next, replace, found);
      replace.pop_back();
    }
    if (cost < budget_) {
      dfs(i + 1, moved, cost + 1, has_erroneous, s, replace, found);  // delete
      for (std::size_t j = i + 1; j < window_.size(); ++j) {          // move window_[j] here
        if (moved & (1u << j)) continue;
        const auto& later = window_[j];
        if (!applicable(s, *later, universe_)) continue;
        State next = s.apply(later->eff().adds(), later->eff().dels());
        replace.push_back(later);
        dfs(i, moved | (1u << j), cost + 1, has_erroneous || j == erroneous_offset_, next, replace, found);
        replace.pop_back();
      }
    }
  }

  const Procedure& window_;
  std::size_t erroneous_offset_;
  const State& start_;
  const Procedure& library_;
  const ObjectUniverse& universe_;
  const CounterpartMap& counterparts_;
  std::size_t budget_;
};

}  // namespace

const CounterpartMap& default_counterparts() {
  static const CounterpartMap kMap = {
      {"VacuumAttached", "GripperHolding"},  {"VacuumActive", "GripperClosed"},
      {"VacuumInactive", "GripperOpen"},     {"VacuumAligned", "GripperSurrounding"},
      {"VacuumSuction", "FingerGripper"},
  };
  return kMap;
}

bool covers_window_effects(const Procedure& window, const State& outcome, const CounterpartMap& counterparts) {
  std::set<Atom> adds, dels;
  for (const auto& op : window) {
    for (const auto& d : op->eff().dels()) {
      auto a = rename(d, counterparts);
      adds.erase(a);
      dels.insert(a);
    }
    for (const auto& d : op->eff().adds()) {
      auto a = rename(d, counterparts);
      dels.erase(a);
      adds.insert(a);
    }
  }
  const auto reached = rename_all(outcome, counterparts);
  for (const auto& a : adds)
    if (!reached.count(a)) return false;
  for (const auto& d : dels)
    if (reached.count(d)) return false;
  return true;
}

struct SearchProposer::Memo {
  std::mutex mutex;
  std::optional<ProposerContext> request;
  ProposerResponse response;
};

namespace {

bool same_procedure(const Procedure& a, const Procedure& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i] && !(*a[i] == *b[i])) return false;
  return true;
}

// Fields the patch search reads.
bool same_patch_request(const ProposerContext& a, const ProposerContext& b) {
  return a.kind == b.kind && a.goal_gap == b.goal_gap && (a.erroneous == nullptr) == (b.erroneous == nullptr) &&
         same_procedure(a.full_procedure(), b.full_procedure()) && a.executed.size() == b.executed.size() &&
         a.current_state == b.current_state && a.prefix_states == b.prefix_states && a.violated == b.violated &&
         a.universe == b.universe;
}

}  // namespace

SearchProposer::SearchProposer(Procedure library, SearchOptions options)
    : library_(std::move(library)), options_(std::move(options)), memo_(std::make_shared<Memo>()) {
  std::stable_sort(library_.begin(), library_.end(),
                   [](const OperatorPtr& a, const OperatorPtr& b) { return a->name() < b->name(); });
}

namespace {

// Best candidate over all windows at exactly this edit budget.
template <typename StateBefore>
std::optional<SearchCandidate> search_at(const Procedure& full, std::size_t t, std::size_t first_start,
                                         std::size_t last_end, std::size_t budget, const Procedure& library,
                                         const ProposerContext& ctx, const CounterpartMap& counterparts,
                                         const StateBefore& state_before) {
  {
    std::optional<std::pair<Key, SearchCandidate>> best;
    for (std::size_t w0 = first_start; w0 <= t; ++w0) {
      const State* start = state_before(w0);
      if (start == nullptr) continue;
      for (std::size_t w1 = t + 1; w1 <= last_end; ++w1) {
        Procedure window(full.begin() + static_cast<std::ptrdiff_t>(w0),
                         full.begin() + static_cast<std::ptrdiff_t>(w1));
        if (window.size() > 16 || count_matches(full, window) != 1) continue;
        WindowSearch ws(window, t - w0, *start, library, ctx.universe, counterparts, budget);
        ws.run([&](const Procedure& replace, std::size_t edits) {
          Key key{edits, window.size(), {}, w0};
          key.names.reserve(replace.size());
          for (const auto& op : replace) key.names.push_back(op->name());
          if (!best || key < best->first) best = {std::move(key), SearchCandidate{w0, w1, replace, edits}};
        });
      }
    }
    if (best) return best->second;
  }
  return std::nullopt;
}

}  // namespace

std::optional<SearchCandidate> SearchProposer::search(const ProposerContext& ctx) const {
  if (ctx.kind != ProposerContext::Kind::patch || ctx.goal_gap || !ctx.erroneous) return std::nullopt;
  const Procedure full = ctx.full_procedure();
  const std::size_t t = ctx.erroneous_index();
  const std::size_t n = full.size();
  const std::size_t depth = options_.depth;

  Procedure library;
  for (const auto& op : library_)
    if (references_known_objects(*op, ctx.universe)) library.push_back(op);

  auto state_before = [&](std::size_t w0) -> const State* {
    if (w0 == t) return &ctx.current_state;
    if (w0 < ctx.prefix_states.size()) return &ctx.prefix_states[w0];
    return nullptr;
  };

  const std::size_t first_start = t >= depth ? t - depth : 0;
  const std::size_t last_end = std::min(n, t + 1 + depth);
  // Operators touching the failing action's objects or the unmet literals
  // are tried first at each edit budget; the full library is the fallback,
  // so the edit count stays minimal.
  std::set<ObjectName> focus = objects_of(*ctx.erroneous);
  for (const auto& l : ctx.violated) focus.insert(l.atom.args().begin(), l.atom.args().end());
  Procedure relevant;
  for (const auto& op : library) {
    const auto objs = objects_of(*op);
    if (std::any_of(objs.begin(), objs.end(), [&](const ObjectName& o) { return focus.count(o) > 0; }))
      relevant.push_back(op);
  }
  std::vector<const Procedure*> tiers = {&relevant};
  if (relevant.size() != library.size()) tiers.push_back(&library);

  for (std::size_t budget = 0; budget <= depth; ++budget)
    for (const Procedure* tier : tiers)
      if (auto c = search_at(full, t, first_start, last_end, budget, *tier, ctx, options_.counterparts, state_before)) return c;
  return std::nullopt;
}

namespace {

std::string describe_candidate(const SearchCandidate& c) {
  std::string out = std::to_string(c.edits) + (c.edits == 1 ? " edit" : " edits") + " over actions " +
                    std::to_string(c.window_start + 1) + ".." + std::to_string(c.window_end);
  if (c.replace.empty()) return out + "; window removed";
  out += "; replacement:";
  for (const auto& op : c.replace) out += " " + op->name();
  return out;
}

}  // namespace

ProposerResponse SearchProposer::propose(const ProposerContext& ctx) {
  if (ctx.kind == ProposerContext::Kind::operator_abduction) {
    for (const auto& op : library_) {
      if (!references_known_objects(*op, ctx.universe)) continue;
      auto r = symbolic_verify(ctx.prev, *op, ctx.universe);
      if (r.pass && r.next == ctx.next) {
        ProposerResponse out;
        out.payload = *op;
        out.rationale = "library operator reproduces the transition";
        return out;
      }
    }
    return ProposerResponse::decline("no library operator reproduces the transition");
  }
  if (ctx.goal_gap) return ProposerResponse::decline("search only repairs failing actions");
  {
    std::lock_guard lock(memo_->mutex);
    if (memo_->request && same_patch_request(*memo_->request, ctx)) return memo_->response;
  }
  ProposerResponse out = search_response(ctx);
  std::lock_guard lock(memo_->mutex);
  memo_->request = ctx;
  memo_->response = out;
  return out;
}

ProposerResponse SearchProposer::search_response(const ProposerContext& ctx) const {
  auto c = search(ctx);
  if (!c) return ProposerResponse::decline("no repair within depth " + std::to_string(options_.depth));
  const Procedure full = ctx.full_procedure();
  Patch patch;
  patch.search.assign(full.begin() + static_cast<std::ptrdiff_t>(c->window_start),
                      full.begin() + static_cast<std::ptrdiff_t>(c->window_end));
  patch.replace = c->replace;
  patch.rationale = describe_candidate(*c);
  ProposerResponse out;
  out.rationale = patch.rationale;
  out.payload = std::move(patch);
  return out;
}

ProposerResponse search_propose(const Procedure& library, const ProposerContext& ctx, std::size_t depth) {
  SearchOptions options;
  options.depth = depth;
  SearchProposer p(library, std::move(options));
  return p.propose(ctx);
}

}  // namespace counterplan
