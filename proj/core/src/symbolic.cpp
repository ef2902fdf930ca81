#include "counterplan/symbolic.hpp"

#include <algorithm>
#include <iterator>

#include "counterplan/errors.hpp"

namespace counterplan {

namespace {

bool is_lower_or_digit(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::string term_str(const Term& t) {
  if (const auto* v = std::get_if<Variable>(&t)) return "?" + v->name;
  return std::get<ObjectName>(t).str();
}

}  // namespace

bool is_object_token(std::string_view token) {
  if (token.empty() || token.front() < 'a' || token.front() > 'z') return false;
  return std::all_of(token.begin(), token.end(), is_lower_or_digit);
}

bool is_identifier(std::string_view token) {
  if (token.empty()) return false;
  char first = token.front();
  if (!((first >= 'a' && first <= 'z') || (first >= 'A' && first <= 'Z'))) return false;
  return std::all_of(token.begin(), token.end(),
                     [](char c) { return is_alnum(c) || c == '_' || c == '-'; });
}

ObjectName::ObjectName(std::string token) : token_(std::move(token)) {
  if (!is_object_token(token_)) throw InvalidValue("invalid object name '" + token_ + "'");
}

// --- PredicateSchema / PredicateSet ----------------------------------------

PredicateSchema::PredicateSchema(std::string n, std::size_t arity) : name(std::move(n)) {
  static constexpr std::string_view kNames = "abcdefghijklmnopqrstuvwxyz";
  for (std::size_t i = 0; i < arity; ++i) {
    param_names.push_back(i < kNames.size() ? std::string(1, kNames[i]) : "p" + std::to_string(i));
    param_types.emplace_back(kRootType);
  }
  if (!is_identifier(name)) throw InvalidValue("invalid predicate name '" + name + "'");
}

PredicateSchema::PredicateSchema(std::string n, std::vector<std::string> names,
                                 std::vector<std::string> types)
    : name(std::move(n)), param_names(std::move(names)), param_types(std::move(types)) {
  if (!is_identifier(name)) throw InvalidValue("invalid predicate name '" + name + "'");
  if (param_names.size() != param_types.size())
    throw InvalidValue("predicate '" + name + "': parameter names and types differ in length");
}

void PredicateSet::add(PredicateSchema schema) {
  if (contains(schema.name)) throw VocabularyError("duplicate predicate '" + schema.name + "'");
  schemas_.push_back(std::move(schema));
}

bool PredicateSet::contains(std::string_view name) const {
  return std::any_of(schemas_.begin(), schemas_.end(),
                     [&](const PredicateSchema& s) { return s.name == name; });
}

const PredicateSchema& PredicateSet::at(std::string_view name) const {
  for (const auto& s : schemas_)
    if (s.name == name) return s;
  throw VocabularyError("unknown predicate '" + std::string(name) + "'");
}

void PredicateSet::check(const Atom& atom) const {
  const auto& schema = at(atom.predicate());
  if (schema.arity() != atom.arity())
    throw VocabularyError("arity mismatch for " + atom.str() + ": expected " +
                          std::to_string(schema.arity()));
}

// --- Atom / Literal / QuantifiedNegation ------------------------------------

Atom::Atom(std::string predicate, std::vector<ObjectName> args)
    : predicate_(std::move(predicate)), args_(std::move(args)) {
  if (!is_identifier(predicate_)) throw InvalidValue("invalid predicate name '" + predicate_ + "'");
}

std::string Atom::str() const {
  std::string out = "(" + predicate_;
  for (const auto& a : args_) out += " " + a.str();
  return out + ")";
}

std::string Literal::str() const {
  return positive() ? atom.str() : "(not " + atom.str() + ")";
}

std::string QuantifiedNegation::str() const {
  std::string pattern = "(" + predicate;
  for (const auto& t : args) pattern += " " + term_str(t);
  pattern += ")";
  return "(forall (?" + variable.name + " - " + type + ") (not " + pattern + "))";
}

// --- Condition --------------------------------------------------------------

Condition::Condition(std::vector<Literal> literals, std::vector<QuantifiedNegation> quantified) {
  for (auto& l : literals)
    if (std::find(literals_.begin(), literals_.end(), l) == literals_.end())
      literals_.push_back(std::move(l));
  for (auto& q : quantified)
    if (std::find(quantified_.begin(), quantified_.end(), q) == quantified_.end())
      quantified_.push_back(std::move(q));
}

bool operator==(const Condition& a, const Condition& b) {
  return sorted_unique(a.literals_) == sorted_unique(b.literals_) &&
         sorted_unique(a.quantified_) == sorted_unique(b.quantified_);
}

// --- EffectSpec -------------------------------------------------------------

EffectSpec::EffectSpec(std::set<Atom> adds, std::set<Atom> dels)
    : adds_(std::move(adds)), dels_(std::move(dels)) {
  check_conflicts();
  for (const auto& a : adds_) order_.push_back(Literal::pos(a));
  for (const auto& a : dels_) order_.push_back(Literal::neg(a));
}

EffectSpec::EffectSpec(std::vector<Literal> effects) {
  for (auto& l : effects) {
    auto& bucket = l.positive() ? adds_ : dels_;
    if (bucket.insert(l.atom).second) order_.push_back(std::move(l));
  }
  check_conflicts();
}

void EffectSpec::check_conflicts() const {
  for (const auto& a : adds_)
    if (dels_.count(a)) throw InvalidValue("conflicting effect: " + a.str() + " is both added and deleted");
}

// --- State ------------------------------------------------------------------

State::State(std::initializer_list<Atom> atoms) : State(std::vector<Atom>(atoms)) {}

State::State(std::vector<Atom> atoms) : atoms_(sorted_unique(std::move(atoms))) {}

State::State(const std::set<Atom>& atoms) : atoms_(atoms.begin(), atoms.end()) {}

bool State::contains(const Atom& atom) const {
  return std::binary_search(atoms_.begin(), atoms_.end(), atom);
}

State State::apply(const std::set<Atom>& adds, const std::set<Atom>& dels) const {
  std::vector<Atom> kept;
  kept.reserve(atoms_.size());
  std::set_difference(atoms_.begin(), atoms_.end(), dels.begin(), dels.end(),
                      std::back_inserter(kept));
  State out;
  out.atoms_.reserve(kept.size() + adds.size());
  std::set_union(kept.begin(), kept.end(), adds.begin(), adds.end(),
                 std::back_inserter(out.atoms_));
  return out;
}

State State::with(const Atom& atom) const { return apply({atom}, {}); }

State State::without(const Atom& atom) const { return apply({}, {atom}); }

std::set<ObjectName> State::objects() const {
  std::set<ObjectName> out;
  for (const auto& a : atoms_) out.insert(a.args().begin(), a.args().end());
  return out;
}

std::set<std::string> State::predicates() const {
  std::set<std::string> out;
  for (const auto& a : atoms_) out.insert(a.predicate());
  return out;
}

// --- ObjectUniverse ---------------------------------------------------------

void ObjectUniverse::add(const ObjectName& object, std::string type) {
  if (!is_identifier(type)) throw InvalidValue("invalid type-tag '" + type + "'");
  auto [it, inserted] = objects_.emplace(object, type);
  if (!inserted && it->second != type) {
    // A concrete type refines the root type; two concrete types conflict.
    if (it->second == kRootType)
      it->second = type;
    else if (type != kRootType)
      throw VocabularyError("object '" + object.str() + "' declared with types '" + it->second +
                            "' and '" + type + "'");
  }
}

void ObjectUniverse::declare_type(std::string type) {
  if (!is_identifier(type)) throw InvalidValue("invalid type-tag '" + type + "'");
  if (type != kRootType) extra_types_.insert(std::move(type));
}

void ObjectUniverse::merge(const ObjectUniverse& other) {
  for (const auto& [obj, type] : other.objects_) add(obj, type);
  extra_types_.insert(other.extra_types_.begin(), other.extra_types_.end());
}

bool ObjectUniverse::contains(const ObjectName& object) const { return objects_.count(object) > 0; }

bool ObjectUniverse::knows_type(std::string_view type) const {
  if (type == kRootType) return true;
  if (extra_types_.count(std::string(type))) return true;
  return std::any_of(objects_.begin(), objects_.end(),
                     [&](const auto& kv) { return kv.second == type; });
}

const std::string& ObjectUniverse::type_of(const ObjectName& object) const {
  auto it = objects_.find(object);
  if (it == objects_.end()) throw VocabularyError("unknown object '" + object.str() + "'");
  return it->second;
}

std::vector<ObjectName> ObjectUniverse::objects_of_type(std::string_view type) const {
  std::vector<ObjectName> out;
  for (const auto& [obj, t] : objects_)
    if (type == kRootType || t == type) out.push_back(obj);
  return out;
}

// --- ActionOperator ---------------------------------------------------------

ActionOperator::ActionOperator(std::string name, Condition pre, EffectSpec eff,
                               std::optional<std::string> semantic, bool noop)
    : name_(std::move(name)),
      pre_(std::move(pre)),
      eff_(std::move(eff)),
      semantic_(std::move(semantic)),
      noop_(noop) {
  if (!is_identifier(name_)) throw InvalidValue("invalid operator name '" + name_ + "'");
  if (eff_.empty() && !noop_)
    throw InvalidValue("operator '" + name_ + "' has no effects and is not flagged as a no-op");
}

bool operator==(const ActionOperator& a, const ActionOperator& b) {
  return a.name_ == b.name_ && a.noop_ == b.noop_ && a.eff_ == b.eff_ && a.pre_ == b.pre_;
}

OperatorPtr make_operator(ActionOperator op) {
  return std::make_shared<const ActionOperator>(std::move(op));
}

std::vector<ActionOperator> unwrap(const Procedure& procedure) {
  std::vector<ActionOperator> out;
  out.reserve(procedure.size());
  for (const auto& p : procedure) out.push_back(*p);
  return out;
}

Procedure wrap(std::vector<ActionOperator> ops) {
  Procedure out;
  out.reserve(ops.size());
  for (auto& op : ops) out.push_back(make_operator(std::move(op)));
  return out;
}

// --- Operations -------------------------------------------------------------

StateDiff state_diff(const State& prev, const State& next) {
  StateDiff d;
  std::set_difference(next.begin(), next.end(), prev.begin(), prev.end(),
                      std::inserter(d.adds, d.adds.end()));
  std::set_difference(prev.begin(), prev.end(), next.begin(), next.end(),
                      std::inserter(d.dels, d.dels.end()));
  return d;
}

std::vector<Literal> ground_condition(const Condition& cond, const ObjectUniverse& universe) {
  std::vector<Literal> out(cond.literals().begin(), cond.literals().end());
  for (const auto& q : cond.quantified()) {
    if (!universe.knows_type(q.type))
      throw GroundingError("unknown type-tag '" + q.type + "' in " + q.str());
    bool mentions_bound = false;
    for (const auto& t : q.args) {
      if (const auto* v = std::get_if<Variable>(&t)) {
        if (v->name != q.variable.name)
          throw GroundingError("unbound variable ?" + v->name + " in " + q.str());
        mentions_bound = true;
      }
    }
    if (!mentions_bound)
      throw GroundingError("quantified pattern does not mention ?" + q.variable.name + " in " + q.str());
    for (const auto& obj : universe.objects_of_type(q.type)) {
      std::vector<ObjectName> args;
      args.reserve(q.args.size());
      for (const auto& t : q.args)
        args.push_back(std::holds_alternative<Variable>(t) ? obj : std::get<ObjectName>(t));
      out.push_back(Literal::neg(Atom(q.predicate, std::move(args))));
    }
  }
  return sorted_unique(std::move(out));
}

bool holds(const State& state, const Literal& literal) {
  return state.contains(literal.atom) == literal.positive();
}

namespace {

void check_objects(const Condition& cond, const ObjectUniverse& universe) {
  for (const auto& l : cond.literals())
    for (const auto& o : l.atom.args())
      if (!universe.contains(o))
        throw VocabularyError("unknown object '" + o.str() + "' in " + l.str());
  for (const auto& q : cond.quantified())
    for (const auto& t : q.args)
      if (const auto* o = std::get_if<ObjectName>(&t); o && !universe.contains(*o))
        throw VocabularyError("unknown object '" + o->str() + "' in " + q.str());
}

}  // namespace

std::vector<Literal> unmet_literals(const State& state, const Condition& cond,
                                    const ObjectUniverse& universe) {
  check_objects(cond, universe);
  std::vector<Literal> out;
  for (auto& l : ground_condition(cond, universe))
    if (!holds(state, l)) out.push_back(std::move(l));
  return out;
}

bool entails(const State& state, const Condition& cond, const ObjectUniverse& universe) {
  return unmet_literals(state, cond, universe).empty();
}

std::set<ObjectName> objects_of(const ActionOperator& op) {
  std::set<ObjectName> out;
  for (const auto& l : op.pre().literals()) out.insert(l.atom.args().begin(), l.atom.args().end());
  for (const auto& q : op.pre().quantified())
    for (const auto& t : q.args)
      if (const auto* o = std::get_if<ObjectName>(&t)) out.insert(*o);
  for (const auto& a : op.eff().adds()) out.insert(a.args().begin(), a.args().end());
  for (const auto& a : op.eff().dels()) out.insert(a.args().begin(), a.args().end());
  return out;
}

void check_vocabulary(const ActionOperator& op, const ObjectUniverse& universe,
                      const PredicateSet* predicates) {
  for (const auto& o : objects_of(op))
    if (!universe.contains(o))
      throw VocabularyError("operator '" + op.name() + "' references unknown object '" + o.str() + "'");
  if (predicates == nullptr) return;
  for (const auto& l : op.pre().literals()) predicates->check(l.atom);
  for (const auto& q : op.pre().quantified()) {
    const auto& schema = predicates->at(q.predicate);
    if (schema.arity() != q.args.size())
      throw VocabularyError("arity mismatch in " + q.str());
  }
  for (const auto& a : op.eff().adds()) predicates->check(a);
  for (const auto& a : op.eff().dels()) predicates->check(a);
}

const std::set<std::string>& physics_predicates() {
  static const std::set<std::string> kGroup = {"OverOf", "OnTopOf", "InsideOf", "Open", "Closed"};
  return kGroup;
}

const std::set<std::string>& embodiment_predicates() {
  static const std::set<std::string> kGroup = {
      "FingerGripper",  "VacuumSuction", "GripperSurrounding", "GripperHolding",
      "GripperOpen",    "GripperClosed", "VacuumAligned",      "VacuumAttached",
      "VacuumActive",   "VacuumInactive"};
  return kGroup;
}

}  // namespace counterplan
