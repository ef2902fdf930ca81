#pragma once

// Shared helpers for the test binaries. Besides fixture loading, this holds
// the independent reference implementations used as oracles.

#include <algorithm>
#include <filesystem>
#include <optional>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "counterplan/executor.hpp"
#include "counterplan/pddl_io.hpp"
#include "counterplan/report_io.hpp"
#include "counterplan/symbolic.hpp"

namespace testing {

using namespace counterplan;

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(COUNTERPLAN_FIXTURES) / name;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string read_fixture(const std::string& name) { return read_text(fixture_path(name)); }

inline State read_state(const std::string& name) { return parse_state_json(read_fixture(name)); }
inline Goal read_goal(const std::string& name) { return parse_goal_json(read_fixture(name)); }

inline Atom atom(const std::string& text) { return parse_atom(text); }
inline Literal lit(const std::string& text) { return parse_literal(text); }

inline State state(std::initializer_list<const char*> atoms) {
  std::vector<Atom> v;
  for (const char* a : atoms) v.push_back(parse_atom(a));
  return State(std::move(v));
}

inline ObjectUniverse universe_of(std::initializer_list<const char*> names) {
  ObjectUniverse u;
  for (const char* n : names) u.add(ObjectName(n));
  return u;
}

inline ObjectUniverse universe_of(const State& s) {
  ObjectUniverse u;
  for (const auto& o : s.objects()) u.add(o);
  return u;
}

inline ActionOperator op_from(const std::string& block) { return parse_operator_block(block); }

inline const ActionOperator& find_op(const Domain& d, const std::string& name) {
  for (const auto& op : d.operators)
    if (op.name() == name) return op;
  throw std::runtime_error("no operator " + name);
}

// --- oracles -----------------------------------------------------------------

// Reference executor: expands each quantified negation by hand over the
// universe and applies effects with plain set algebra.
struct OracleResult {
  bool ok = false;
  std::set<Atom> next;
  std::set<std::string> unmet;  // rendered literals
};

inline OracleResult oracle_execute(const State& s, const ActionOperator& op, const ObjectUniverse& u) {
  std::set<Atom> have(s.begin(), s.end());
  OracleResult r;
  for (const auto& l : op.pre().literals()) {
    const bool present = have.count(l.atom) > 0;
    if (present != l.positive()) r.unmet.insert(l.str());
  }
  for (const auto& q : op.pre().quantified()) {
    for (const auto& [obj, type] : u.objects()) {
      if (q.type != kRootType && type != q.type) continue;
      std::vector<ObjectName> args;
      for (const auto& t : q.args) {
        if (std::holds_alternative<Variable>(t) && std::get<Variable>(t) == q.variable)
          args.push_back(obj);
        else
          args.push_back(std::get<ObjectName>(t));
      }
      Atom a(q.predicate, args);
      if (have.count(a)) r.unmet.insert("(not " + a.str() + ")");
    }
  }
  if (!r.unmet.empty()) return r;
  r.ok = true;
  std::set<Atom> next;
  for (const auto& a : have)
    if (!op.eff().dels().count(a)) next.insert(a);
  next.insert(op.eff().adds().begin(), op.eff().adds().end());
  r.next = std::move(next);
  return r;
}

// Textbook dynamic-programming Levenshtein distance (full matrix).
inline std::size_t oracle_levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

inline std::vector<std::string> names_of(const Procedure& p) {
  std::vector<std::string> out;
  for (const auto& op : p) out.push_back(op->name());
  return out;
}

// Exhaustive repair enumeration: breadth-first over single insertions,
// deletions and substitutions (library operators) of the procedure, up to
// `depth` edits. A variant is a repair when it rolls out without an
// inconsistency and ends in a state satisfying `goal_ok`. Stops at the first
// level containing a repair and returns every repair found there.
struct RepairOracle {
  std::optional<std::size_t> min_edits;
  std::set<std::vector<std::string>> repairs;
};

template <typename GoalCheck>
RepairOracle oracle_min_repair(const Procedure& procedure, const Procedure& library, const State& initial,
                               const ObjectUniverse& universe, std::size_t depth, GoalCheck goal_ok) {
  auto is_repair = [&](const Procedure& p) {
    auto r = rollout(initial, p, universe);
    return !r.first_inconsistency && goal_ok(r.final_state());
  };
  RepairOracle out;
  if (is_repair(procedure)) {
    out.min_edits = 0;
    out.repairs.insert(names_of(procedure));
    return out;
  }
  std::vector<Procedure> frontier{procedure};
  std::set<std::vector<std::string>> seen{names_of(procedure)};
  for (std::size_t k = 1; k <= depth; ++k) {
    std::vector<Procedure> next;
    auto consider = [&](Procedure p) {
      auto key = names_of(p);
      if (!seen.insert(key).second) return;
      if (is_repair(p)) out.repairs.insert(key);
      next.push_back(std::move(p));
    };
    for (const auto& base : frontier) {
      for (std::size_t i = 0; i <= base.size(); ++i) {
        for (const auto& op : library) {
          Procedure p = base;
          p.insert(p.begin() + static_cast<std::ptrdiff_t>(i), op);
          consider(std::move(p));
        }
        if (i == base.size()) continue;
        Procedure d = base;
        d.erase(d.begin() + static_cast<std::ptrdiff_t>(i));
        consider(std::move(d));
        for (const auto& op : library) {
          if (op->name() == base[i]->name()) continue;
          Procedure p = base;
          p[i] = op;
          consider(std::move(p));
        }
      }
    }
    if (!out.repairs.empty()) {
      out.min_edits = k;
      return out;
    }
    frontier = std::move(next);
  }
  return out;
}

// Exhaustive local repair: the fewest library edits to `procedure` after
// which its rollout gets past the action at `failing_index`. Every original
// action up to the failing one must survive, and either no inconsistency
// remains or the first one falls on a later original action. Since the
// actions up to the failing one are kept and later edits cannot change the
// states before it, only insertions ahead of it need enumerating.
inline std::optional<std::size_t> oracle_min_local_repair(const Procedure& procedure, const Procedure& library,
                                                   const State& initial, const ObjectUniverse& universe,
                                                   std::size_t failing_index, std::size_t depth) {
  using Tagged = std::vector<std::pair<OperatorPtr, long>>;  // operator, original index or -1
  auto progresses = [&](const Tagged& v) {
    std::size_t kept = 0;
    for (const auto& [op, origin] : v)
      if (origin >= 0 && origin <= static_cast<long>(failing_index)) ++kept;
    if (kept != failing_index + 1) return false;
    Procedure p;
    for (const auto& [op, origin] : v) p.push_back(op);
    auto r = rollout(initial, p, universe);
    if (!r.first_inconsistency) return true;
    const long origin = v[r.first_inconsistency->index].second;
    return origin > static_cast<long>(failing_index);
  };
  auto key_of = [](const Tagged& v) {
    std::vector<std::string> k;
    for (const auto& [op, origin] : v) k.push_back(op->name() + "#" + std::to_string(origin));
    return k;
  };
  Tagged start;
  for (std::size_t i = 0; i < procedure.size(); ++i) start.emplace_back(procedure[i], static_cast<long>(i));
  if (progresses(start)) return 0;
  std::vector<Tagged> frontier{start};
  std::set<std::vector<std::string>> seen{key_of(start)};
  for (std::size_t k = 1; k <= depth; ++k) {
    std::vector<Tagged> next;
    bool found = false;
    auto consider = [&](Tagged v) {
      if (!seen.insert(key_of(v)).second) return;
      if (progresses(v)) found = true;
      next.push_back(std::move(v));
    };
    for (const auto& base : frontier) {
      std::size_t failing_pos = 0;
      while (base[failing_pos].second != static_cast<long>(failing_index)) ++failing_pos;
      for (std::size_t i = 0; i <= failing_pos; ++i) {
        for (const auto& op : library) {
          Tagged v = base;
          v.insert(v.begin() + static_cast<std::ptrdiff_t>(i), {op, -1});
          consider(std::move(v));
        }
      }
    }
    if (found) return k;
    frontier = std::move(next);
  }
  return std::nullopt;
}

// --- random generators ---------------------------------------------------------

struct RandomWorld {
  std::vector<std::string> objects;
  std::vector<std::pair<std::string, std::size_t>> predicates = {
      {"OnTopOf", 2}, {"InsideOf", 2}, {"Open", 1}, {"Closed", 1}, {"GripperHolding", 1}, {"GripperOpen", 0}};

  explicit RandomWorld(std::size_t n_objects) {
    for (std::size_t i = 0; i < n_objects; ++i) objects.push_back("obj" + std::to_string(i));
  }

  ObjectUniverse universe() const {
    ObjectUniverse u;
    for (const auto& o : objects) u.add(ObjectName(o));
    return u;
  }

  Atom random_atom(std::mt19937_64& rng) const {
    const auto& [p, arity] = predicates[rng() % predicates.size()];
    std::vector<ObjectName> args;
    for (std::size_t k = 0; k < arity; ++k) args.emplace_back(objects[rng() % objects.size()]);
    return Atom(p, std::move(args));
  }

  State random_state(std::mt19937_64& rng, std::size_t max_atoms = 10) const {
    std::set<Atom> s;
    const std::size_t n = rng() % (max_atoms + 1);
    for (std::size_t i = 0; i < n; ++i) s.insert(random_atom(rng));
    return State(s);
  }

  ActionOperator random_operator(std::mt19937_64& rng, const std::string& name = "RandomOp") const {
    std::vector<Literal> pre;
    std::set<Atom> used;
    const std::size_t n_pre = rng() % 4;
    for (std::size_t i = 0; i < n_pre; ++i) {
      auto a = random_atom(rng);
      if (!used.insert(a).second) continue;
      pre.push_back(rng() % 2 ? Literal::pos(a) : Literal::neg(a));
    }
    std::vector<QuantifiedNegation> quant;
    if (rng() % 3 == 0) {
      QuantifiedNegation q;
      q.variable.name = "y";
      q.predicate = "GripperHolding";
      q.args.emplace_back(Variable{"y"});
      quant.push_back(q);
    }
    std::set<Atom> adds, dels;
    const std::size_t n_eff = 1 + rng() % 3;
    for (std::size_t i = 0; i < n_eff; ++i) {
      auto a = random_atom(rng);
      if (adds.count(a) || dels.count(a)) continue;
      (rng() % 2 ? adds : dels).insert(a);
    }
    return ActionOperator(name, Condition(pre, quant), EffectSpec(adds, dels));
  }
};

// Random single-point edits of a text: delete, insert, replace a byte, or
// drop, duplicate, swap and truncate lines.
inline std::string mutate(const std::string& text, std::mt19937_64& rng) {
  std::string s = text;
  static const std::string kAlphabet = "<>=()-? \nabcXYZ\t";
  const int edits = 1 + static_cast<int>(rng() % 3);
  for (int e = 0; e < edits; ++e) {
    if (s.empty()) s = "x";
    const std::size_t pos = rng() % s.size();
    switch (rng() % 7) {
      case 0: s.erase(pos, 1); break;
      case 1: s.insert(pos, 1, kAlphabet[rng() % kAlphabet.size()]); break;
      case 2: s[pos] = kAlphabet[rng() % kAlphabet.size()]; break;
      case 3: s.resize(pos); break;
      default: {
        std::vector<std::string> lines;
        std::istringstream in(s);
        for (std::string l; std::getline(in, l);) lines.push_back(l);
        if (lines.empty()) break;
        const std::size_t i = rng() % lines.size(), j = rng() % lines.size();
        const auto kind = rng() % 3;
        if (kind == 0) lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(i));
        else if (kind == 1) lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(i), lines[j]);
        else std::swap(lines[i], lines[j]);
        s.clear();
        for (const auto& l : lines) s += l + "\n";
      }
    }
  }
  return s;
}

// Generate-by-execution: a random start state followed by random executable
// operators, recorded as frames.
inline TrajectoryDocument random_trajectory(std::mt19937_64& rng, const RandomWorld& w, std::size_t max_len) {
  TrajectoryDocument doc;
  doc.instruction = "random";
  State s = w.random_state(rng);
  auto u = w.universe();
  doc.frames.push_back({1, s, std::nullopt});
  const std::size_t len = rng() % (max_len + 1);
  int guard = 0;
  while (doc.frames.size() < len + 1 && guard++ < 200) {
    auto op = w.random_operator(rng);
    auto r = symbolic_execute(s, op, u);
    if (!r.ok()) continue;
    s = *r.next;
    doc.frames.push_back({static_cast<int>(doc.frames.size()) + 1, s, std::nullopt});
  }
  return doc;
}

}  // namespace testing
