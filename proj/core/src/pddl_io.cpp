#include "counterplan/pddl_io.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "counterplan/errors.hpp"
#include "json.hpp"
#include "sexpr.hpp"

namespace counterplan {

using detail::SExpr;

namespace {

struct Line {
  std::string_view text;
  std::size_t number;
};

std::vector<Line> split_lines(std::string_view text, std::size_t first_line) {
  std::vector<Line> out;
  std::size_t start = 0;
  std::size_t n = first_line;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back({line, n++});
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  return true;
}

bool is_comment(std::string_view trimmed) {
  return !trimmed.empty() && (trimmed.front() == '#' || trimmed.front() == ';');
}

std::size_t leading_space(std::string_view s) {
  std::size_t n = 0;
  while (n < s.size() && std::isspace(static_cast<unsigned char>(s[n]))) ++n;
  return n;
}

[[noreturn]] void fail(const std::string& message, const SExpr& at) {
  throw ParseError(message, at.line, at.column);
}

ObjectName object_from(const SExpr& e) {
  if (e.is_list) fail("expected an object name, found a list", e);
  if (starts_with(e.token, "?")) fail("variable " + e.token + " in a grounded atom", e);
  if (!is_object_token(e.token))
    fail("invalid object name '" + e.token + "' (expected [a-z][a-z0-9_]*)", e);
  return ObjectName(e.token);
}

void check_predicate(const PredicateSet* predicates, const std::string& name, std::size_t arity,
                     const SExpr& at) {
  if (predicates == nullptr) return;
  if (!predicates->contains(name)) fail("unknown predicate '" + name + "'", at);
  const auto& schema = predicates->at(name);
  if (schema.arity() != arity)
    fail("arity mismatch for '" + name + "': expected " + std::to_string(schema.arity()) +
             ", found " + std::to_string(arity),
         at);
}

Atom atom_from(const SExpr& e, const PredicateSet* predicates) {
  if (!e.is_list) fail("expected an atom '(Predicate args...)', found '" + e.token + "'", e);
  if (e.items.empty()) fail("empty atom '()'", e);
  const auto& head = e.items.front();
  if (head.is_list || !is_identifier(head.token))
    fail("invalid predicate name '" + detail::to_string(head) + "'", head);
  if (head.token == "not" || head.token == "and" || head.token == "or" || head.token == "forall" ||
      head.token == "when" || head.token == "exists")
    fail("expected an atom, found connective '" + head.token + "'", head);
  std::vector<ObjectName> args;
  for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(object_from(e.items[i]));
  check_predicate(predicates, head.token, args.size(), e);
  return Atom(head.token, std::move(args));
}

Literal literal_from(const SExpr& e, const PredicateSet* predicates) {
  if (e.is_list && !e.items.empty() && e.items.front().is_token("not")) {
    if (e.items.size() != 2) fail("'not' takes exactly one atom", e);
    return Literal::neg(atom_from(e.items[1], predicates));
  }
  if (e.is_list && !e.items.empty() && !e.items.front().is_list) {
    const auto& t = e.items.front().token;
    if (t == "or" || t == "when" || t == "exists" || t == "imply")
      fail("'" + t + "' is outside the supported operator subset", e);
  }
  return Literal::pos(atom_from(e, predicates));
}

QuantifiedNegation forall_from(const SExpr& e, const PredicateSet* predicates) {
  // (forall (?y - type) (not (P ... ?y ...)))
  if (e.items.size() != 3) fail("malformed forall: expected (forall (?v - type) (not pattern))", e);
  const auto& vars = e.items[1];
  if (!vars.is_list || vars.items.empty()) fail("malformed forall variable list", vars);
  QuantifiedNegation q;
  const auto& v = vars.items.front();
  if (v.is_list || !starts_with(v.token, "?") || v.token.size() < 2)
    fail("expected a variable '?name' in forall", v);
  q.variable.name = v.token.substr(1);
  if (vars.items.size() == 3 && vars.items[1].is_token("-") && !vars.items[2].is_list) {
    q.type = vars.items[2].token;
    if (!is_identifier(q.type)) fail("invalid type-tag '" + q.type + "'", vars.items[2]);
  } else if (vars.items.size() != 1) {
    fail("forall quantifies exactly one variable", vars);
  }
  const auto& body = e.items[2];
  if (!body.is_list || body.items.size() != 2 || !body.items.front().is_token("not"))
    fail("forall body must be (not pattern)", body);
  const auto& pat = body.items[1];
  if (!pat.is_list || pat.items.empty() || pat.items.front().is_list ||
      !is_identifier(pat.items.front().token))
    fail("malformed forall pattern", pat);
  q.predicate = pat.items.front().token;
  for (std::size_t i = 1; i < pat.items.size(); ++i) {
    const auto& a = pat.items[i];
    if (!a.is_list && starts_with(a.token, "?") && a.token.size() > 1) {
      if (a.token.substr(1) != q.variable.name) fail("unbound variable " + a.token + " in forall", a);
      q.args.emplace_back(Variable{a.token.substr(1)});
    } else {
      q.args.emplace_back(object_from(a));
    }
  }
  if (std::none_of(q.args.begin(), q.args.end(),
                   [](const Term& t) { return std::holds_alternative<Variable>(t); }))
    fail("forall pattern does not mention ?" + q.variable.name, pat);
  check_predicate(predicates, q.predicate, q.args.size(), pat);
  return q;
}

void condition_items(const SExpr& e, const PredicateSet* predicates, std::vector<Literal>& lits,
                     std::vector<QuantifiedNegation>& quants) {
  if (e.is_list && e.items.empty()) return;
  if (e.is_list && e.items.front().is_token("and")) {
    for (std::size_t i = 1; i < e.items.size(); ++i) condition_items(e.items[i], predicates, lits, quants);
    return;
  }
  if (e.is_list && e.items.front().is_token("forall")) {
    quants.push_back(forall_from(e, predicates));
    return;
  }
  lits.push_back(literal_from(e, predicates));
}

void effect_items(const SExpr& e, const PredicateSet* predicates, std::vector<Literal>& effects) {
  if (e.is_list && e.items.empty()) return;
  if (e.is_list && e.items.front().is_token("and")) {
    for (std::size_t i = 1; i < e.items.size(); ++i) effect_items(e.items[i], predicates, effects);
    return;
  }
  if (e.is_list && e.items.front().is_token("forall")) fail("quantified effects are not supported", e);
  effects.push_back(literal_from(e, predicates));
}

ActionOperator make_op(const std::string& name, std::vector<Literal> pre,
                       std::vector<QuantifiedNegation> quants, std::vector<Literal> effects,
                       std::optional<std::string> semantic, std::size_t line) {
  try {
    bool noop = effects.empty();
    return ActionOperator(name, Condition(std::move(pre), std::move(quants)),
                          EffectSpec(std::move(effects)), std::move(semantic), noop);
  } catch (const InvalidValue& e) {
    throw ParseError(e.what(), line, 1);
  }
}

ActionOperator pddl_action_from(const SExpr& e, const PredicateSet* predicates) {
  // (:action Name :parameters () :precondition X :effect Y)
  if (e.items.size() < 2 || e.items[1].is_list) fail("(:action ...) needs a name", e);
  const std::string name = e.items[1].token;
  if (!is_identifier(name)) fail("invalid operator name '" + name + "'", e.items[1]);
  std::vector<Literal> pre, effects;
  std::vector<QuantifiedNegation> quants;
  bool saw_effect = false;
  for (std::size_t i = 2; i < e.items.size(); i += 2) {
    const auto& key = e.items[i];
    if (i + 1 >= e.items.size()) fail("missing value for " + detail::to_string(key), key);
    const auto& value = e.items[i + 1];
    if (key.is_token(":parameters")) {
      if (!value.is_list || !value.items.empty())
        fail("only grounded actions are supported (:parameters must be empty)", value);
    } else if (key.is_token(":precondition")) {
      condition_items(value, predicates, pre, quants);
    } else if (key.is_token(":effect")) {
      effect_items(value, predicates, effects);
      saw_effect = true;
    } else {
      fail("unsupported action field " + detail::to_string(key), key);
    }
  }
  if (!saw_effect) fail("(:action " + name + ") has no :effect", e);
  return make_op(name, std::move(pre), std::move(quants), std::move(effects), std::nullopt, e.line);
}

// Reads an item that may continue on following lines until parentheses balance.
SExpr gather_item(const std::vector<Line>& lines, std::size_t& i, std::string_view first,
                  std::size_t column) {
  std::string text(first);
  std::size_t start_line = lines[i].number;
  int balance = detail::paren_balance(text);
  while (balance > 0 && i + 1 < lines.size()) {
    ++i;
    text += '\n';
    text += lines[i].text;
    balance = detail::paren_balance(text);
  }
  if (balance != 0) throw ParseError("unbalanced parentheses in item", start_line, column);
  return detail::read_sexpr(text, start_line, column);
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> typed_names(const std::vector<std::pair<std::string, std::size_t>>& tokens,
                                     std::vector<std::string>& types, std::size_t line) {
  std::vector<std::string> names;
  std::size_t pending_from = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].first == "-") {
      if (i + 1 >= tokens.size()) throw ParseError("'-' without a type", line, tokens[i].second);
      const auto& type = tokens[i + 1].first;
      if (!is_identifier(type)) throw ParseError("invalid type-tag '" + type + "'", line, tokens[i + 1].second);
      if (pending_from == names.size())
        throw ParseError("type '" + type + "' applies to no names", line, tokens[i].second);
      for (std::size_t k = pending_from; k < names.size(); ++k) types[k] = type;
      pending_from = names.size();
      ++i;
    } else {
      names.push_back(tokens[i].first);
      types.emplace_back(kRootType);
    }
  }
  return names;
}

std::vector<std::pair<std::string, std::size_t>> tokenize(std::string_view s, std::size_t column) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.emplace_back(std::string(s.substr(start, i - start)), column + start);
  }
  return out;
}

PredicateSchema predicate_from(const SExpr& e, ObjectUniverse& universe) {
  if (!e.is_list || e.items.empty() || e.items.front().is_list || !is_identifier(e.items.front().token))
    fail("malformed predicate declaration", e);
  std::vector<std::string> names, types;
  std::size_t pending_from = 0;
  for (std::size_t i = 1; i < e.items.size(); ++i) {
    const auto& item = e.items[i];
    if (item.is_list) fail("unexpected list in predicate declaration", item);
    if (item.token == "-") {
      if (i + 1 >= e.items.size() || e.items[i + 1].is_list || !is_identifier(e.items[i + 1].token))
        fail("'-' must be followed by a type-tag", item);
      if (pending_from == names.size()) fail("type applies to no parameters", item);
      for (std::size_t k = pending_from; k < names.size(); ++k) types[k] = e.items[i + 1].token;
      universe.declare_type(e.items[i + 1].token);
      pending_from = names.size();
      ++i;
      continue;
    }
    if (!starts_with(item.token, "?") || item.token.size() < 2)
      fail("predicate parameters must be variables '?name'", item);
    names.push_back(item.token.substr(1));
    types.emplace_back(kRootType);
  }
  return PredicateSchema(e.items.front().token, std::move(names), std::move(types));
}

void add_objects(ObjectUniverse& universe, std::string_view rest, std::size_t line, std::size_t column) {
  auto tokens = tokenize(rest, column);
  std::vector<std::string> types;
  auto names = typed_names(tokens, types, line);
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (!is_object_token(names[k]))
      throw ParseError("invalid object name '" + names[k] + "'", line, column);
    try {
      universe.add(ObjectName(names[k]), types[k]);
    } catch (const Error& e) {
      throw ParseError(e.what(), line, column);
    }
  }
}

void finish_domain(Domain& d, bool objects_declared, std::size_t line) {
  for (const auto& op : d.operators) {
    for (const auto& o : objects_of(op)) {
      if (objects_declared) {
        if (!d.universe.contains(o))
          throw ParseError("operator '" + op.name() + "' references undeclared object '" + o.str() + "'",
                           line, 1);
      } else {
        d.universe.add(o);
      }
    }
    for (const auto& q : op.pre().quantified())
      if (!d.universe.knows_type(q.type))
        throw ParseError("operator '" + op.name() + "' quantifies over unknown type '" + q.type + "'", line, 1);
  }
}

Domain parse_pddl_domain(std::string_view text) {
  auto top = detail::read_sexprs(text);
  if (top.size() != 1) throw ParseError("expected a single (define ...) form", 1, 1);
  const auto& def = top.front();
  if (!def.is_list || def.items.empty() || !def.items.front().is_token("define"))
    fail("expected (define ...)", def);
  Domain d;
  bool objects_declared = false;
  std::vector<const SExpr*> actions;
  for (std::size_t i = 1; i < def.items.size(); ++i) {
    const auto& section = def.items[i];
    if (!section.is_list || section.items.empty() || section.items.front().is_list)
      fail("malformed domain section", section);
    const auto& key = section.items.front().token;
    if (key == "domain" || key == "problem") continue;
    if (key == ":requirements") {
      static const std::vector<std::string> kAllowed = {":strips", ":typing", ":negative-preconditions",
                                                        ":universal-preconditions"};
      for (std::size_t k = 1; k < section.items.size(); ++k)
        if (std::find(kAllowed.begin(), kAllowed.end(), section.items[k].token) == kAllowed.end())
          fail("unsupported requirement " + detail::to_string(section.items[k]), section.items[k]);
    } else if (key == ":types") {
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        const auto& t = section.items[k];
        if (t.is_list) fail("malformed :types", t);
        if (t.token != "-") d.universe.declare_type(t.token);
      }
    } else if (key == ":predicates") {
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        auto schema = predicate_from(section.items[k], d.universe);
        if (d.predicates.contains(schema.name)) fail("duplicate predicate '" + schema.name + "'", section.items[k]);
        d.predicates.add(std::move(schema));
      }
    } else if (key == ":objects" || key == ":constants") {
      std::string flat;
      for (std::size_t k = 1; k < section.items.size(); ++k) {
        if (section.items[k].is_list) fail("malformed object list", section.items[k]);
        flat += section.items[k].token + " ";
      }
      add_objects(d.universe, flat, section.line, section.column);
      objects_declared = true;
    } else if (key == ":action") {
      actions.push_back(&section);
    } else {
      fail("unsupported domain section " + key, section);
    }
  }
  for (const auto* a : actions) d.operators.push_back(pddl_action_from(*a, &d.predicates));
  finish_domain(d, objects_declared, def.line);
  return d;
}

std::string indent_item(const std::string& s) { return "    - " + s + "\n"; }

}  // namespace

// --- atoms ------------------------------------------------------------------

Atom parse_atom(std::string_view text, const PredicateSet* predicates) {
  return atom_from(detail::read_sexpr(text), predicates);
}

Literal parse_literal(std::string_view text, const PredicateSet* predicates) {
  return literal_from(detail::read_sexpr(text), predicates);
}

// --- operator blocks ----------------------------------------------------------

std::vector<ActionOperator> parse_operator_blocks(std::string_view text, const PredicateSet* predicates,
                                                  std::size_t first_line) {
  auto lines = split_lines(text, first_line);
  std::vector<ActionOperator> ops;
  std::size_t i = 0;
  while (i < lines.size()) {
    auto t = trim(lines[i].text);
    if (t.empty() || is_comment(t)) {
      ++i;
      continue;
    }
    const std::size_t col = leading_space(lines[i].text) + 1;
    if (starts_with(t, "(")) {
      auto e = gather_item(lines, i, lines[i].text, 1);
      if (!e.is_list || e.items.empty() || !e.items.front().is_token(":action"))
        fail("expected an operator name or (:action ...)", e);
      ops.push_back(pddl_action_from(e, predicates));
      ++i;
      continue;
    }
    if (starts_with(t, "-"))
      throw ParseError("expected an operator name, found '" + std::string(t) + "'", lines[i].number, col);
    if (!is_identifier(t))
      throw ParseError("invalid operator name '" + std::string(t) + "'", lines[i].number, col);

    const std::string name(t);
    const std::size_t name_line = lines[i].number;
    std::optional<std::string> semantic;
    std::vector<Literal> pre, effects;
    std::vector<QuantifiedNegation> quants;
    enum class Section { none, pre, eff } section = Section::none;
    bool saw_pre = false, saw_eff = false;
    ++i;
    for (; i < lines.size(); ++i) {
      auto line = trim(lines[i].text);
      const std::size_t lcol = leading_space(lines[i].text) + 1;
      if (line.empty() || is_comment(line)) continue;
      std::string_view body;
      if (starts_with(line, "-")) {
        body = trim(line.substr(1));
      } else if (line == "None" && section != Section::none) {
        continue;
      } else {
        break;  // next block
      }
      if (iequals_prefix(body, "semantic:")) {
        auto rest = trim(body.substr(9));
        if (rest.empty()) throw ParseError("empty semantic description", lines[i].number, lcol);
        semantic = std::string(rest);
        continue;
      }
      std::string_view rest;
      if (iequals_prefix(body, "preconditions:") || iequals_prefix(body, "precondition:")) {
        if (saw_pre) throw ParseError("duplicated '- Preconditions:' section", lines[i].number, lcol);
        section = Section::pre;
        saw_pre = true;
        rest = trim(body.substr(body.find(':') + 1));
      } else if (iequals_prefix(body, "effects:") || iequals_prefix(body, "effect:")) {
        if (saw_eff) throw ParseError("duplicated '- Effects:' section", lines[i].number, lcol);
        section = Section::eff;
        saw_eff = true;
        rest = trim(body.substr(body.find(':') + 1));
      } else {
        rest = body;
        if (section == Section::none)
          throw ParseError("item before '- Preconditions:' or '- Effects:' in operator '" + name + "'",
                           lines[i].number, lcol);
      }
      if (rest.empty() || rest == "None") continue;
      if (rest == "..." || rest == "\xE2\x8B\xAE")
        throw ParseError("elided content is not allowed in operator '" + name + "'", lines[i].number, lcol);
      const std::size_t item_col = static_cast<std::size_t>(rest.data() - lines[i].text.data()) + 1;
      auto e = gather_item(lines, i, rest, item_col);
      try {
        if (section == Section::pre)
          condition_items(e, predicates, pre, quants);
        else
          effect_items(e, predicates, effects);
      } catch (const ParseError&) {
        throw;
      }
    }
    if (!saw_eff)
      throw ParseError("operator '" + name + "' is missing its '- Effects:' section", name_line, 1);
    ops.push_back(make_op(name, std::move(pre), std::move(quants), std::move(effects), std::move(semantic),
                          name_line));
  }
  return ops;
}

ActionOperator parse_operator_block(std::string_view text, const PredicateSet* predicates) {
  auto ops = parse_operator_blocks(text, predicates);
  if (ops.size() != 1)
    throw ParseError("expected exactly one operator block, found " + std::to_string(ops.size()));
  return std::move(ops.front());
}

std::string format_operator_block(const ActionOperator& op) {
  std::string out = op.name() + "\n";
  if (op.semantic() && !op.semantic()->empty()) out += "- Semantic: " + *op.semantic() + "\n";
  out += "- Preconditions:\n";
  if (op.pre().empty()) out += "    None\n";
  for (const auto& l : op.pre().literals()) out += indent_item(l.str());
  for (const auto& q : op.pre().quantified()) out += indent_item(q.str());
  out += "- Effects:\n";
  if (op.eff().literals().empty()) out += "    None\n";
  for (const auto& l : op.eff().literals()) out += indent_item(l.str());
  return out;
}

std::string format_operator_blocks(std::span<const ActionOperator> ops) {
  std::string out;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (i) out += "\n";
    out += format_operator_block(ops[i]);
  }
  return out;
}

std::string format_operator_blocks(const Procedure& ops) {
  std::string out;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (i) out += "\n";
    out += format_operator_block(*ops[i]);
  }
  return out;
}

// --- domains ----------------------------------------------------------------

Domain parse_domain(std::string_view text) {
  {
    auto t = trim(text);
    while (!t.empty() && (t.front() == ';' || t.front() == '#')) {
      auto nl = t.find('\n');
      t = nl == std::string_view::npos ? std::string_view{} : trim(t.substr(nl + 1));
    }
    if (starts_with(t, "(define")) return parse_pddl_domain(text);
  }
  auto lines = split_lines(text, 1);
  Domain d;
  bool objects_declared = false;
  std::size_t i = 0;
  for (; i < lines.size(); ++i) {
    auto t = trim(lines[i].text);
    const std::size_t col = leading_space(lines[i].text) + 1;
    if (t.empty() || is_comment(t)) continue;
    if (starts_with(t, "(:action")) break;
    if (starts_with(t, "(")) {
      auto e = gather_item(lines, i, lines[i].text, 1);
      auto schema = predicate_from(e, d.universe);
      if (d.predicates.contains(schema.name)) fail("duplicate predicate '" + schema.name + "'", e);
      d.predicates.add(std::move(schema));
      continue;
    }
    if (iequals_prefix(t, "objects:")) {
      add_objects(d.universe, t.substr(8), lines[i].number, col + 8);
      objects_declared = true;
      continue;
    }
    if (iequals_prefix(t, "types:")) {
      for (auto& [tok, c] : tokenize(t.substr(6), col + 6)) {
        if (!is_identifier(tok)) throw ParseError("invalid type-tag '" + tok + "'", lines[i].number, c);
        d.universe.declare_type(tok);
      }
      continue;
    }
    break;
  }
  if (i < lines.size()) {
    const char* begin = lines[i].text.data();
    std::string_view rest(begin, static_cast<std::size_t>(text.data() + text.size() - begin));
    d.operators = parse_operator_blocks(rest, &d.predicates, lines[i].number);
  }
  finish_domain(d, objects_declared, 1);
  return d;
}

std::string serialize_domain(const Domain& domain) {
  std::string out;
  for (const auto& s : domain.predicates.schemas()) {
    out += "(" + s.name;
    for (std::size_t k = 0; k < s.arity(); ++k) {
      out += " ?" + s.param_names[k];
      if (s.param_types[k] != kRootType) out += " - " + s.param_types[k];
    }
    out += ")\n";
  }
  if (!domain.universe.declared_types().empty()) {
    out += "types:";
    for (const auto& t : domain.universe.declared_types()) out += " " + t;
    out += "\n";
  }
  if (!domain.universe.empty()) {
    std::map<std::string, std::vector<std::string>> by_type;
    for (const auto& [obj, type] : domain.universe.objects()) by_type[type].push_back(obj.str());
    out += "objects:";
    for (const auto& [type, names] : by_type) {
      if (type == kRootType) continue;
      for (const auto& n : names) out += " " + n;
      out += " - " + type;
    }
    if (auto it = by_type.find(std::string(kRootType)); it != by_type.end())
      for (const auto& n : it->second) out += " " + n;
    out += "\n";
  }
  if (!domain.operators.empty()) {
    out += "\n";
    out += format_operator_blocks(std::span<const ActionOperator>(domain.operators));
  }
  return out;
}

// --- trajectories -----------------------------------------------------------

std::vector<State> TrajectoryDocument::states() const {
  std::vector<State> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.state);
  return out;
}

TrajectoryDocument parse_trajectory(std::string_view text, const PredicateSet* predicates) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(std::string("malformed JSON: ") + e.what(), line, col);
  }
  if (!doc.is_object()) throw ParseError("trajectory document must be a JSON object");
  TrajectoryDocument out;
  if (doc.contains("instruction")) {
    if (!doc["instruction"].is_string()) throw ParseError("'instruction' must be a string");
    out.instruction = doc["instruction"].get<std::string>();
  }
  if (!doc.contains("frames") || !doc["frames"].is_array())
    throw ParseError("trajectory document needs a 'frames' array");
  const auto& frames = doc["frames"];
  if (frames.empty()) throw ParseError("trajectory has no frames");
  std::map<std::string, std::size_t> arities;
  int expected = 1;
  for (const auto& f : frames) {
    if (!f.is_object()) throw ParseError("frame " + std::to_string(expected) + " is not an object");
    if (!f.contains("index") || !f["index"].is_number_integer())
      throw ParseError("frame " + std::to_string(expected) + " has no integer 'index'");
    const int index = f["index"].get<int>();
    if (index != expected)
      throw ParseError("frame indices must increase by one from 1: expected " + std::to_string(expected) +
                       ", found " + std::to_string(index));
    if (!f.contains("atoms") || !f["atoms"].is_array())
      throw ParseError("frame " + std::to_string(index) + " has no 'atoms' array");
    std::vector<Atom> atoms;
    for (const auto& a : f["atoms"]) {
      if (!a.is_string()) throw ParseError("frame " + std::to_string(index) + ": atoms must be strings");
      try {
        auto atom = parse_atom(a.get<std::string>(), predicates);
        auto [it, inserted] = arities.emplace(atom.predicate(), atom.arity());
        if (!inserted && it->second != atom.arity())
          throw ParseError("predicate '" + atom.predicate() + "' used with arities " +
                           std::to_string(it->second) + " and " + std::to_string(atom.arity()));
        atoms.push_back(std::move(atom));
      } catch (const ParseError& e) {
        throw ParseError("frame " + std::to_string(index) + ": atom '" + a.get<std::string>() +
                         "': " + e.detail());
      }
    }
    TrajectoryFrame frame{index, State(std::move(atoms)), std::nullopt};
    if (f.contains("meta")) {
      if (!f["meta"].is_string()) throw ParseError("frame " + std::to_string(index) + ": 'meta' must be a string");
      frame.meta = f["meta"].get<std::string>();
    }
    out.frames.push_back(std::move(frame));
    ++expected;
  }
  return out;
}

std::string serialize_trajectory(const TrajectoryDocument& doc) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["instruction"] = doc.instruction;
  j["frames"] = ordered_json::array();
  for (const auto& f : doc.frames) {
    ordered_json frame;
    frame["index"] = f.index;
    frame["atoms"] = ordered_json::array();
    for (const auto& a : f.state) frame["atoms"].push_back(a.str());
    if (f.meta) frame["meta"] = *f.meta;
    j["frames"].push_back(std::move(frame));
  }
  return j.dump(2) + "\n";
}

// --- patches ----------------------------------------------------------------

Patch parse_patch(std::string_view text, const PredicateSet* predicates) {
  auto lines = split_lines(text, 1);
  std::vector<std::size_t> search_at, divider_at, replace_at;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto l = lines[i].text;
    if (l == kSearchMarker) {
      search_at.push_back(i);
    } else if (l == kDividerMarker) {
      divider_at.push_back(i);
    } else if (l == kReplaceMarker) {
      replace_at.push_back(i);
    } else {
      auto t = trim(l);
      auto col = leading_space(l) + 1;
      if (starts_with(t, "<<<<<<<"))
        throw ParseError("malformed marker line '" + std::string(l) + "' (expected '" +
                             std::string(kSearchMarker) + "')",
                         lines[i].number, col);
      if (starts_with(t, "======="))
        throw ParseError("malformed marker line '" + std::string(l) + "' (expected '" +
                             std::string(kDividerMarker) + "')",
                         lines[i].number, col);
      if (starts_with(t, ">>>>>>>"))
        throw ParseError("malformed marker line '" + std::string(l) + "' (expected '" +
                             std::string(kReplaceMarker) + "')",
                         lines[i].number, col);
    }
  }
  auto check_count = [&](const std::vector<std::size_t>& at, std::string_view marker) {
    if (at.empty()) throw ParseError("missing marker '" + std::string(marker) + "'");
    if (at.size() > 1)
      throw ParseError("duplicated marker '" + std::string(marker) + "'", lines[at[1]].number, 1);
  };
  check_count(search_at, kSearchMarker);
  check_count(divider_at, kDividerMarker);
  check_count(replace_at, kReplaceMarker);
  const std::size_t s = search_at.front(), d = divider_at.front(), r = replace_at.front();
  if (!(s < d && d < r))
    throw ParseError("patch markers out of order (expected SEARCH, =======, REPLACE)", lines[std::min({s, d, r})].number, 1);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i >= s && i <= r) continue;
    if (!trim(lines[i].text).empty())
      throw ParseError("unexpected text outside the patch markers", lines[i].number, 1);
  }
  auto slice = [&](std::size_t from, std::size_t to) -> std::string_view {
    // lines (from, to) exclusive
    if (to <= from + 1) return {};
    const char* b = lines[from + 1].text.data();
    const char* e = lines[to].text.data();
    return {b, static_cast<std::size_t>(e - b)};
  };
  Patch patch;
  patch.search = wrap(parse_operator_blocks(slice(s, d), predicates, lines[s].number + 1));
  if (patch.search.empty()) throw ParseError("empty SEARCH block", lines[s].number, 1);
  patch.replace = wrap(parse_operator_blocks(slice(d, r), predicates, lines[d].number + 1));
  return patch;
}

std::string serialize_patch(const Patch& patch) {
  std::string out(kSearchMarker);
  out += "\n";
  out += format_operator_blocks(patch.search);
  out += kDividerMarker;
  out += "\n";
  out += format_operator_blocks(patch.replace);
  out += kReplaceMarker;
  out += "\n";
  return out;
}

// --- task specifications ----------------------------------------------------

std::string split_camel_case(std::string_view name) {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) words.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    if (c == '_' || c == '-' || c == ' ') {
      flush();
      continue;
    }
    const bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
    if (upper && !current.empty()) {
      const bool prev_upper = std::isupper(static_cast<unsigned char>(name[i - 1])) != 0;
      const bool next_lower = i + 1 < name.size() && std::islower(static_cast<unsigned char>(name[i + 1]));
      if (!prev_upper || next_lower) flush();
    }
    current.push_back(c);
  }
  flush();
  std::string out;
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::string word = words[w];
    const bool acronym = word.size() > 1 && std::all_of(word.begin(), word.end(), [](char ch) {
                           return std::isupper(static_cast<unsigned char>(ch)) || std::isdigit(static_cast<unsigned char>(ch));
                         });
    if (!acronym) word = lowercase(word);
    if (w == 0 && !word.empty()) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
    if (w) out += ' ';
    out += word;
  }
  return out;
}

std::string describe(const ActionOperator& op) {
  if (op.semantic() && !trim(*op.semantic()).empty()) return std::string(trim(*op.semantic()));
  return split_camel_case(op.name());
}

std::string emit_task_specification(std::span<const ActionOperator> procedure) {
  std::string out;
  for (std::size_t i = 0; i < procedure.size(); ++i)
    out += std::to_string(i + 1) + ". " + describe(procedure[i]) + "\n";
  return out;
}

std::string emit_task_specification(const Procedure& procedure) {
  std::string out;
  for (std::size_t i = 0; i < procedure.size(); ++i)
    out += std::to_string(i + 1) + ". " + describe(*procedure[i]) + "\n";
  return out;
}

}  // namespace counterplan
