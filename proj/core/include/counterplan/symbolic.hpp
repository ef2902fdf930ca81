#pragma once

// Core symbolic vocabulary: grounded atoms in closed-world states, and STRIPS
// operators whose conditions may carry single-variable forall-not guards.

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace counterplan {

// Identifier rules. Objects are lower-case snake tokens; predicate and
// operator names are free-form identifiers (CamelCase in practice).
bool is_object_token(std::string_view token);
bool is_identifier(std::string_view token);

inline constexpr std::string_view kRootType = "thing";

class ObjectName {
 public:
  explicit ObjectName(std::string token);

  const std::string& str() const noexcept { return token_; }

  friend bool operator==(const ObjectName&, const ObjectName&) = default;
  friend auto operator<=>(const ObjectName&, const ObjectName&) = default;

 private:
  std::string token_;
};

struct Variable {
  std::string name;  // without the leading '?'

  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

using Term = std::variant<Variable, ObjectName>;

struct PredicateSchema {
  std::string name;
  std::vector<std::string> param_names;  // without '?'
  std::vector<std::string> param_types;

  PredicateSchema(std::string name, std::size_t arity);
  PredicateSchema(std::string name, std::vector<std::string> param_names,
                  std::vector<std::string> param_types);

  std::size_t arity() const noexcept { return param_types.size(); }

  friend bool operator==(const PredicateSchema&, const PredicateSchema&) = default;
};

class Atom;

// Predicate vocabulary P. Names are unique.
class PredicateSet {
 public:
  PredicateSet() = default;

  void add(PredicateSchema schema);
  bool contains(std::string_view name) const;
  const PredicateSchema& at(std::string_view name) const;
  std::size_t size() const noexcept { return schemas_.size(); }
  bool empty() const noexcept { return schemas_.empty(); }

  // Declared order is preserved for serialization.
  const std::vector<PredicateSchema>& schemas() const noexcept { return schemas_; }

  // Throws VocabularyError when the predicate is unknown or the arity is off.
  void check(const Atom& atom) const;

  friend bool operator==(const PredicateSet&, const PredicateSet&) = default;

 private:
  std::vector<PredicateSchema> schemas_;
};

class Atom {
 public:
  Atom(std::string predicate, std::vector<ObjectName> args = {});

  const std::string& predicate() const noexcept { return predicate_; }
  const std::vector<ObjectName>& args() const noexcept { return args_; }
  std::size_t arity() const noexcept { return args_.size(); }

  std::string str() const;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;

 private:
  std::string predicate_;
  std::vector<ObjectName> args_;
};

enum class Polarity { positive, negative };

struct Literal {
  Atom atom;
  Polarity polarity = Polarity::positive;

  static Literal pos(Atom a) { return {std::move(a), Polarity::positive}; }
  static Literal neg(Atom a) { return {std::move(a), Polarity::negative}; }

  bool positive() const noexcept { return polarity == Polarity::positive; }
  std::string str() const;

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

// (forall (?var - type) (not (pred t1 ... tn)))
struct QuantifiedNegation {
  Variable variable;
  std::string type = std::string(kRootType);
  std::string predicate;
  std::vector<Term> args;

  std::string str() const;

  friend bool operator==(const QuantifiedNegation&, const QuantifiedNegation&) = default;
  friend auto operator<=>(const QuantifiedNegation&, const QuantifiedNegation&) = default;
};

// Conjunction of literals plus forall-not guards. Declaration order is kept
// for rendering; equality is order- and duplicate-insensitive.
class Condition {
 public:
  Condition() = default;
  Condition(std::vector<Literal> literals, std::vector<QuantifiedNegation> quantified = {});

  const std::vector<Literal>& literals() const noexcept { return literals_; }
  const std::vector<QuantifiedNegation>& quantified() const noexcept { return quantified_; }
  bool empty() const noexcept { return literals_.empty() && quantified_.empty(); }

  friend bool operator==(const Condition& a, const Condition& b);

 private:
  std::vector<Literal> literals_;
  std::vector<QuantifiedNegation> quantified_;
};

class EffectSpec {
 public:
  EffectSpec() = default;
  // Throws InvalidValue if an atom is both added and deleted.
  EffectSpec(std::set<Atom> adds, std::set<Atom> dels);
  // Positive literals are adds, negative literals are dels. Declaration order
  // is kept for rendering.
  explicit EffectSpec(std::vector<Literal> effects);

  const std::set<Atom>& adds() const noexcept { return adds_; }
  const std::set<Atom>& dels() const noexcept { return dels_; }
  const std::vector<Literal>& literals() const noexcept { return order_; }
  bool empty() const noexcept { return adds_.empty() && dels_.empty(); }

  friend bool operator==(const EffectSpec& a, const EffectSpec& b) {
    return a.adds_ == b.adds_ && a.dels_ == b.dels_;
  }

 private:
  void check_conflicts() const;

  std::set<Atom> adds_;
  std::set<Atom> dels_;
  std::vector<Literal> order_;
};

// Closed-world state: a finite set of grounded atoms. Stored sorted and
// unique so equality is permutation- and duplicate-insensitive.
class State {
 public:
  using const_iterator = std::vector<Atom>::const_iterator;

  State() = default;
  State(std::initializer_list<Atom> atoms);
  explicit State(std::vector<Atom> atoms);
  explicit State(const std::set<Atom>& atoms);

  bool contains(const Atom& atom) const;
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }
  const_iterator begin() const noexcept { return atoms_.begin(); }
  const_iterator end() const noexcept { return atoms_.end(); }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  // (this \ dels) ∪ adds
  State apply(const std::set<Atom>& adds, const std::set<Atom>& dels) const;
  State with(const Atom& atom) const;
  State without(const Atom& atom) const;

  std::set<ObjectName> objects() const;
  std::set<std::string> predicates() const;

  friend bool operator==(const State&, const State&) = default;

 private:
  std::vector<Atom> atoms_;
};

// Object set Q with a type-tag per object. The root type matches every object.
class ObjectUniverse {
 public:
  ObjectUniverse() = default;

  void add(const ObjectName& object, std::string type = std::string(kRootType));
  void declare_type(std::string type);
  void merge(const ObjectUniverse& other);

  bool contains(const ObjectName& object) const;
  bool knows_type(std::string_view type) const;
  const std::string& type_of(const ObjectName& object) const;
  std::size_t size() const noexcept { return objects_.size(); }
  bool empty() const noexcept { return objects_.empty(); }

  // Objects matching a type-tag, in lexicographic order.
  std::vector<ObjectName> objects_of_type(std::string_view type) const;
  const std::map<ObjectName, std::string>& objects() const noexcept { return objects_; }
  // Type-tags declared without (necessarily) having objects.
  const std::set<std::string>& declared_types() const noexcept { return extra_types_; }

  friend bool operator==(const ObjectUniverse&, const ObjectUniverse&) = default;

 private:
  std::map<ObjectName, std::string> objects_;
  std::set<std::string> extra_types_;
};

class ActionOperator {
 public:
  // Throws InvalidValue for an empty name, or empty effects without `noop`.
  ActionOperator(std::string name, Condition pre, EffectSpec eff,
                 std::optional<std::string> semantic = std::nullopt, bool noop = false);

  const std::string& name() const noexcept { return name_; }
  const Condition& pre() const noexcept { return pre_; }
  const EffectSpec& eff() const noexcept { return eff_; }
  const std::optional<std::string>& semantic() const noexcept { return semantic_; }
  bool noop() const noexcept { return noop_; }

  // Structural identity used for patch matching: name, normalized pre/eff
  // and the no-op flag. The semantic description does not participate.
  friend bool operator==(const ActionOperator& a, const ActionOperator& b);

 private:
  std::string name_;
  Condition pre_;
  EffectSpec eff_;
  std::optional<std::string> semantic_;
  bool noop_ = false;
};

using OperatorPtr = std::shared_ptr<const ActionOperator>;
using Procedure = std::vector<OperatorPtr>;

OperatorPtr make_operator(ActionOperator op);
std::vector<ActionOperator> unwrap(const Procedure& procedure);
Procedure wrap(std::vector<ActionOperator> ops);

struct StateDiff {
  std::set<Atom> adds;
  std::set<Atom> dels;

  friend bool operator==(const StateDiff&, const StateDiff&) = default;
};

// adds = next \ prev, dels = prev \ next
StateDiff state_diff(const State& prev, const State& next);

// Plain literals followed by the expansion of every forall-not guard, as a
// sorted duplicate-free list. Throws GroundingError for unknown type-tags or
// patterns that mention a variable other than the quantified one.
std::vector<Literal> ground_condition(const Condition& cond, const ObjectUniverse& universe);

bool holds(const State& state, const Literal& literal);

// Grounded literals of `cond` that do not hold in `state`, sorted by
// predicate name then arguments. Throws VocabularyError if the condition
// mentions an object outside `universe`.
std::vector<Literal> unmet_literals(const State& state, const Condition& cond,
                                    const ObjectUniverse& universe);

bool entails(const State& state, const Condition& cond, const ObjectUniverse& universe);

// Throws VocabularyError if any object named by the operator lies outside
// the universe, or (when a predicate set is given) a predicate is unknown.
void check_vocabulary(const ActionOperator& op, const ObjectUniverse& universe,
                      const PredicateSet* predicates = nullptr);

std::set<ObjectName> objects_of(const ActionOperator& op);

// The two predicate groups of the manipulation predicate set.
const std::set<std::string>& physics_predicates();
const std::set<std::string>& embodiment_predicates();

}  // namespace counterplan
