#include "counterplan/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "counterplan/world_model.hpp"

namespace counterplan {

std::string to_string(SubtaskKind k) {
  switch (k) {
    case SubtaskKind::pick_place: return "pick_place";
    case SubtaskKind::sweep: return "sweep";
    case SubtaskKind::rotate: return "rotate";
    case SubtaskKind::slide: return "slide";
  }
  return "unknown";
}

std::string to_string(Complexity c) {
  switch (c) {
    case Complexity::low: return "low";
    case Complexity::medium: return "medium";
    case Complexity::high: return "high";
  }
  return "unknown";
}

std::string to_string(Factor f) {
  switch (f) {
    case Factor::obstruction: return "obstruction";
    case Factor::affordance: return "affordance";
    case Factor::kinematic_gripper: return "kinematic_gripper";
    case Factor::combination: return "combination";
  }
  return "unknown";
}

std::size_t subtask_count(Complexity c) {
  switch (c) {
    case Complexity::low: return 2;
    case Complexity::medium: return 3;
    case Complexity::high: return 4;
  }
  return 2;
}

std::size_t objects_per_subtask(Complexity c) { return c == Complexity::high ? 2 : 1; }

void ScenarioSpec::validate() const {
  if (subtasks.size() != subtask_count(complexity))
    throw InvalidValue("scenario " + id + ": " + to_string(complexity) + " complexity needs " +
                       std::to_string(subtask_count(complexity)) + " subtasks, got " +
                       std::to_string(subtasks.size()));
  if (level < 0 || level > 2) throw InvalidValue("scenario " + id + ": obstruction level must be 0, 1 or 2");
  if (factor == Factor::combination && level == 0)
    throw InvalidValue("scenario " + id + ": combination needs obstruction level 1 or 2");
  std::set<SubtaskKind> seen(subtasks.begin(), subtasks.end());
  if (seen.size() != subtasks.size()) throw InvalidValue("scenario " + id + ": subtask kinds must be distinct");
}

PredicateSet manipulation_predicates() {
  PredicateSet p;
  auto typed = [&](const char* name, std::vector<std::string> params) {
    std::vector<std::string> types(params.size(), std::string(kRootType));
    p.add(PredicateSchema(name, std::move(params), std::move(types)));
  };
  typed("OverOf", {"a", "b"});
  typed("OnTopOf", {"a", "b"});
  typed("InsideOf", {"a", "b"});
  typed("Open", {"x"});
  typed("Closed", {"x"});
  typed("FingerGripper", {});
  typed("VacuumSuction", {});
  typed("GripperSurrounding", {"x"});
  typed("GripperHolding", {"x"});
  typed("GripperOpen", {});
  typed("GripperClosed", {});
  typed("VacuumAligned", {"x"});
  typed("VacuumAttached", {"x"});
  typed("VacuumActive", {});
  typed("VacuumInactive", {});
  return p;
}

namespace {

Atom atom(std::string pred, std::vector<std::string> args = {}) {
  std::vector<ObjectName> names;
  for (auto& a : args) names.emplace_back(std::move(a));
  return Atom(std::move(pred), std::move(names));
}

Literal pos(std::string pred, std::vector<std::string> args = {}) { return Literal::pos(atom(std::move(pred), std::move(args))); }
Literal neg(std::string pred, std::vector<std::string> args = {}) { return Literal::neg(atom(std::move(pred), std::move(args))); }

// (forall (?y - thing) (not (pred ...))) with "?" marking the bound slot.
QuantifiedNegation none_such(std::string pred, std::vector<std::string> args) {
  QuantifiedNegation q;
  q.variable.name = "y";
  q.predicate = std::move(pred);
  for (auto& a : args) {
    if (a == "?")
      q.args.emplace_back(Variable{"y"});
    else
      q.args.emplace_back(ObjectName(std::move(a)));
  }
  return q;
}

std::string camel(const std::string& token) {
  std::string out;
  bool up = true;
  for (char c : token) {
    if (c == '_') {
      up = true;
      continue;
    }
    out += up ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
    up = false;
  }
  return out;
}

std::string spaced(const std::string& token) {
  std::string out = token;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

OperatorPtr make(std::string name, std::vector<Literal> pre, std::vector<QuantifiedNegation> quant,
                 std::vector<Literal> eff) {
  return make_operator(ActionOperator(std::move(name), Condition(std::move(pre), std::move(quant)),
                                      EffectSpec(std::move(eff))));
}

struct Embodiment {
  bool vacuum = false;
  std::string indicator() const { return vacuum ? "VacuumSuction" : "FingerGripper"; }
  std::string holding() const { return vacuum ? "VacuumAttached" : "GripperHolding"; }
  std::string engaged() const { return vacuum ? "VacuumActive" : "GripperClosed"; }
  std::string idle() const { return vacuum ? "VacuumInactive" : "GripperOpen"; }
  std::string take() const { return vacuum ? "Attach" : "Grasp"; }
  std::string drop() const { return vacuum ? "Detach" : "Release"; }
  std::string sweep() const { return vacuum ? "SuctionSweep" : "Sweep"; }
};

const char* const kTable = "table";

OperatorPtr grasp_op(const Embodiment& e, const std::string& c, const std::string& support) {
  return make(e.take() + camel(c), {pos(e.idle()), pos(e.indicator())},
              {none_such(e.holding(), {"?"}), none_such("OnTopOf", {"?", c})},
              {pos(e.holding(), {c}), pos(e.engaged()), neg(e.idle()), neg("OnTopOf", {c, support})});
}

OperatorPtr move_op(const std::string& c, const std::string& d) {
  return make("MoveHeld" + camel(c) + "Over" + camel(d), {neg("OverOf", {c, d})}, {}, {pos("OverOf", {c, d})});
}

OperatorPtr release_op(const Embodiment& e, const std::string& c, const std::string& d,
                       std::vector<Literal> extra) {
  std::vector<Literal> pre = {pos(e.holding(), {c}), pos(e.engaged()), pos(e.indicator()), pos("OverOf", {c, d}),
                              neg("InsideOf", {c, d})};
  pre.insert(pre.end(), extra.begin(), extra.end());
  return make(e.drop() + camel(c) + "Into" + camel(d), std::move(pre), {},
              {pos("InsideOf", {c, d}), pos(e.idle()), neg(e.engaged()), neg(e.holding(), {c}), neg("OverOf", {c, d})});
}

OperatorPtr sweep_op(const Embodiment& e, const std::string& p, const std::string& box, const std::string& board) {
  return make(e.sweep() + camel(p) + "Into" + camel(box), {pos(e.indicator()), pos("OnTopOf", {p, board})},
              {none_such(e.holding(), {"?"})}, {neg("OnTopOf", {p, board}), pos("InsideOf", {p, box})});
}

OperatorPtr retrieve_op(const std::string& p, const std::string& box, const std::string& board) {
  return make("Retrieve" + camel(p) + "From" + camel(box), {pos("InsideOf", {p, box})}, {},
              {neg("InsideOf", {p, box}), pos("OnTopOf", {p, board})});
}

OperatorPtr push_off_op(const std::string& x, const std::string& y) {
  return make("Push" + camel(x) + "Off" + camel(y), {pos("OnTopOf", {x, y})}, {none_such("OnTopOf", {"?", x})},
              {neg("OnTopOf", {x, y}), pos("OnTopOf", {x, kTable})});
}

OperatorPtr open_op(const std::string& verb, const std::string& x) {
  return make(verb + camel(x) + "Open", {pos("Closed", {x})}, {none_such("OnTopOf", {"?", x})},
              {neg("Closed", {x}), pos("Open", {x})});
}

OperatorPtr close_op(const std::string& verb, const std::string& x) {
  return make(verb + camel(x) + "Closed", {pos("Open", {x})}, {}, {pos("Closed", {x}), neg("Open", {x})});
}

const std::vector<std::string>& colors() {
  static const std::vector<std::string> k = {"red",  "green", "blue", "yellow", "purple", "white", "black",
                                             "pink", "brown", "gray", "cyan",   "teal",   "gold",  "silver"};
  return k;
}

const std::vector<std::string>& fruits() {
  static const std::vector<std::string> k = {"apple", "orange", "lemon", "peach", "plum", "pear", "lime", "mango"};
  return k;
}

struct SubtaskPlan {
  SubtaskKind kind;
  std::string label;
  std::vector<std::string> objects;
  std::string destination;  // toy_box, hinge_body, top_drawer; unused for sweep
  std::vector<std::string> boxes;  // sweep: per-piece boxes
  int level = 0;
  bool redundant = false;  // last object already delivered
};

// Everything both embodiments share; the operators are instantiated per
// embodiment.
struct Layout {
  std::vector<SubtaskPlan> subtasks;
  std::vector<std::string> blockers;  // stacked on pick_place objects
};

Procedure subtask_ops(const Embodiment& e, const SubtaskPlan& s) {
  Procedure out;
  switch (s.kind) {
    case SubtaskKind::pick_place:
      for (const auto& c : s.objects) {
        out.push_back(grasp_op(e, c, kTable));
        out.push_back(move_op(c, s.destination));
        out.push_back(release_op(e, c, s.destination, {}));
      }
      break;
    case SubtaskKind::sweep:
      for (std::size_t i = 0; i < s.objects.size(); ++i)
        out.push_back(sweep_op(e, s.objects[i], s.boxes[i], "chess_board"));
      break;
    case SubtaskKind::rotate:
      for (const auto& c : s.objects) {
        out.push_back(grasp_op(e, c, kTable));
        out.push_back(move_op(c, "hinge_body"));
        out.push_back(release_op(e, c, "hinge_body", {neg("Closed", {"hinge_lid"})}));
      }
      out.push_back(close_op("Rotate", "hinge_lid"));
      break;
    case SubtaskKind::slide:
      for (const auto& c : s.objects) {
        out.push_back(grasp_op(e, c, kTable));
        out.push_back(move_op(c, "top_drawer"));
        out.push_back(release_op(e, c, "top_drawer", {pos("Open", {"top_drawer"})}));
      }
      out.push_back(close_op("Slide", "top_drawer"));
      break;
  }
  return out;
}

std::string describe_subtask(const SubtaskPlan& s) {
  std::string objs;
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    if (i) objs += i + 1 == s.objects.size() ? " and " : ", ";
    objs += "the " + spaced(s.objects[i]);
  }
  switch (s.kind) {
    case SubtaskKind::pick_place: return "put " + objs + " into the toy box";
    case SubtaskKind::sweep: return "sweep " + objs + " into the matching boxes";
    case SubtaskKind::rotate: return "place " + objs + " in the hinged container and close its lid";
    case SubtaskKind::slide: return "place " + objs + " in the top drawer and close it";
  }
  return {};
}

}  // namespace

std::vector<std::string> ScenarioInstance::label_sequence(const Procedure& procedure) const {
  std::vector<std::string> out;
  out.reserve(procedure.size());
  for (const auto& op : procedure) {
    auto it = labels.find(op->name());
    out.push_back(it == labels.end() ? "other" : it->second);
  }
  return out;
}

std::vector<std::string> ScenarioInstance::achievement_sequence(const std::vector<State>& states,
                                                                const Procedure& procedure) const {
  std::vector<std::string> out;
  std::vector<bool> done(subtask_goals.size(), false);
  auto holds_group = [](const State& s, const SubtaskGoal& g) {
    return std::all_of(g.atoms.begin(), g.atoms.end(), [&](const Atom& a) { return s.contains(a); });
  };
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i > 0 && i - 1 < procedure.size()) {
      auto it = labels.find(procedure[i - 1]->name());
      if (it != labels.end() && it->second == "resolve") out.push_back(it->second);
    }
    for (std::size_t g = 0; g < subtask_goals.size(); ++g) {
      if (done[g] || !holds_group(states[i], subtask_goals[g])) continue;
      done[g] = true;
      out.push_back(subtask_goals[g].label);
    }
  }
  return out;
}

ScenarioInstance generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

  std::vector<std::string> palette = colors();
  std::shuffle(palette.begin(), palette.end(), rng);
  std::vector<std::string> fruit_pool = fruits();
  std::shuffle(fruit_pool.begin(), fruit_pool.end(), rng);
  std::size_t next_color = 0;
  auto color = [&] { return palette[next_color++ % palette.size()]; };

  const bool kinematic = spec.factor == Factor::kinematic_gripper || spec.factor == Factor::combination;
  const bool affordance = spec.factor == Factor::affordance || spec.factor == Factor::combination;
  const int level = spec.factor == Factor::obstruction || spec.factor == Factor::combination ? spec.level : 0;
  const std::size_t redundant_at = affordance ? pick(spec.subtasks.size()) : spec.subtasks.size();

  Layout layout;
  const std::size_t per = objects_per_subtask(spec.complexity);
  for (std::size_t i = 0; i < spec.subtasks.size(); ++i) {
    SubtaskPlan s;
    s.kind = spec.subtasks[i];
    s.label = to_string(s.kind);
    s.redundant = i == redundant_at;
    s.level = s.redundant ? 0 : level;
    std::size_t count = per;
    if (s.kind == SubtaskKind::sweep && s.level == 2) count = std::max<std::size_t>(count, 2);
    for (std::size_t k = 0; k < count; ++k) {
      switch (s.kind) {
        case SubtaskKind::pick_place: s.objects.push_back(color() + "_cube"); break;
        case SubtaskKind::sweep: {
          const auto c = color();
          s.objects.push_back(c + "_pawn");
          s.boxes.push_back(c + "_box");
          break;
        }
        case SubtaskKind::rotate: s.objects.push_back(fruit_pool[k % fruit_pool.size()]); break;
        case SubtaskKind::slide: s.objects.push_back(color() + "_cylinder"); break;
      }
    }
    switch (s.kind) {
      case SubtaskKind::pick_place: s.destination = "toy_box"; break;
      case SubtaskKind::rotate: s.destination = "hinge_body"; break;
      case SubtaskKind::slide: s.destination = "top_drawer"; break;
      case SubtaskKind::sweep: break;
    }
    layout.subtasks.push_back(std::move(s));
  }

  // Demonstration: finger gripper, no obstruction.
  std::vector<Atom> demo_atoms = {atom("FingerGripper"), atom("GripperOpen")};
  for (const auto& s : layout.subtasks) {
    switch (s.kind) {
      case SubtaskKind::pick_place:
        demo_atoms.push_back(atom("OnTopOf", {"toy_box", kTable}));
        for (const auto& c : s.objects) demo_atoms.push_back(atom("OnTopOf", {c, kTable}));
        break;
      case SubtaskKind::sweep:
        demo_atoms.push_back(atom("OnTopOf", {"chess_board", kTable}));
        demo_atoms.push_back(atom("OnTopOf", {"spare_box", kTable}));
        for (std::size_t k = 0; k < s.objects.size(); ++k) {
          demo_atoms.push_back(atom("OnTopOf", {s.objects[k], "chess_board"}));
          demo_atoms.push_back(atom("OnTopOf", {s.boxes[k], kTable}));
        }
        break;
      case SubtaskKind::rotate:
        demo_atoms.push_back(atom("OnTopOf", {"hinge_body", kTable}));
        demo_atoms.push_back(atom("Open", {"hinge_lid"}));
        for (const auto& c : s.objects) demo_atoms.push_back(atom("OnTopOf", {c, kTable}));
        break;
      case SubtaskKind::slide:
        demo_atoms.push_back(atom("Open", {"top_drawer"}));
        for (const auto& c : s.objects) demo_atoms.push_back(atom("OnTopOf", {c, kTable}));
        break;
    }
  }
  const State demo_initial(std::move(demo_atoms));

  ScenarioInstance inst;
  inst.spec = spec;
  const Embodiment finger{false};
  const Embodiment deployed{kinematic};
  std::string instruction;
  for (const auto& s : layout.subtasks) {
    auto ops = subtask_ops(finger, s);
    for (const auto& op : ops) inst.labels[op->name()] = s.label;
    inst.demo_procedure.insert(inst.demo_procedure.end(), ops.begin(), ops.end());
    instruction += (instruction.empty() ? "" : ", then ") + describe_subtask(s);
  }
  if (!instruction.empty()) instruction[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(instruction[0])));
  inst.demonstration.instruction = instruction + ".";

  ObjectUniverse universe;
  for (const auto& o : demo_initial.objects()) universe.add(o);
  auto demo_run = rollout(demo_initial, inst.demo_procedure, universe);
  if (demo_run.first_inconsistency) throw Error("scenario generator produced an inconsistent demonstration");
  for (std::size_t i = 0; i < demo_run.states.size(); ++i) {
    TrajectoryFrame f{static_cast<int>(i + 1), demo_run.states[i], std::nullopt};
    if (i > 0) f.meta = inst.demo_procedure[i - 1]->name();
    inst.demonstration.frames.push_back(std::move(f));
  }

  // Deployment state.
  std::set<Atom> dep(demo_initial.begin(), demo_initial.end());
  std::vector<std::string> movable, supports;
  std::size_t depth = 0;
  for (const auto& s : layout.subtasks) {
    movable.insert(movable.end(), s.objects.begin(), s.objects.end());
    supports.insert(supports.end(), s.objects.begin(), s.objects.end());
    if (s.redundant) {
      const auto& c = s.objects.back();
      if (s.kind == SubtaskKind::sweep) {
        dep.erase(atom("OnTopOf", {c, "chess_board"}));
        dep.insert(atom("InsideOf", {c, s.boxes.back()}));
        depth = std::max<std::size_t>(depth, 1);
      } else {
        dep.erase(atom("OnTopOf", {c, kTable}));
        dep.insert(atom("InsideOf", {c, s.destination}));
        depth = std::max<std::size_t>(depth, 3);
      }
    }
    const std::size_t swap = kinematic ? 1 : 0;
    if (kinematic) depth = std::max<std::size_t>(depth, 1);
    if (s.level == 0) continue;
    const auto k = static_cast<std::size_t>(s.level);
    switch (s.kind) {
      case SubtaskKind::pick_place: {
        std::string below = s.objects.front();
        for (std::size_t b = 0; b < k; ++b) {
          const auto blocker = color() + "_block";
          dep.insert(atom("OnTopOf", {blocker, below}));
          layout.blockers.push_back(blocker);
          movable.push_back(blocker);
          supports.push_back(blocker);
          below = blocker;
        }
        depth = std::max(depth, k + swap);
        break;
      }
      case SubtaskKind::sweep: {
        const std::size_t misplaced = s.level == 1 ? 1 : s.objects.size();
        for (std::size_t i = 0; i < misplaced; ++i) {
          dep.erase(atom("OnTopOf", {s.objects[i], "chess_board"}));
          dep.insert(atom("InsideOf", {s.objects[i], "spare_box"}));
        }
        depth = std::max(depth, 1 + swap);
        break;
      }
      case SubtaskKind::rotate:
        dep.erase(atom("Open", {"hinge_lid"}));
        dep.insert(atom("Closed", {"hinge_lid"}));
        if (k == 2) {
          dep.insert(atom("OnTopOf", {"book", "hinge_lid"}));
          movable.push_back("book");
        }
        depth = std::max(depth, k + swap);
        break;
      case SubtaskKind::slide:
        dep.erase(atom("Open", {"top_drawer"}));
        dep.insert(atom("Closed", {"top_drawer"}));
        if (k == 2) {
          dep.insert(atom("OnTopOf", {"crate", "top_drawer"}));
          movable.push_back("crate");
        }
        depth = std::max(depth, k + swap);
        break;
    }
  }
  if (kinematic) {
    dep.erase(atom("FingerGripper"));
    dep.erase(atom("GripperOpen"));
    dep.insert(atom("VacuumSuction"));
    dep.insert(atom("VacuumInactive"));
  }
  inst.deployment_initial = State(dep);
  inst.oracle_depth = std::max<std::size_t>(depth, 1);

  // Deployment library.
  std::set<std::string> names;
  auto add = [&](const OperatorPtr& op, const std::string& label) {
    if (!names.insert(op->name()).second) return;
    inst.library.push_back(op);
    inst.labels.emplace(op->name(), label);
  };
  for (const auto& s : layout.subtasks) {
    for (const auto& op : subtask_ops(deployed, s)) add(op, s.label);
    if (s.kind == SubtaskKind::rotate) add(open_op("Rotate", "hinge_lid"), s.label);
    if (s.kind == SubtaskKind::slide) add(open_op("Slide", "top_drawer"), s.label);
    if (s.kind == SubtaskKind::sweep) {
      for (const auto& p : s.objects) {
        add(retrieve_op(p, "spare_box", "chess_board"), "resolve");
        for (const auto& b : s.boxes) add(retrieve_op(p, b, "chess_board"), "resolve");
      }
    }
    if (s.kind == SubtaskKind::rotate) supports.push_back("hinge_lid");
    if (s.kind == SubtaskKind::slide) supports.push_back("top_drawer");
  }
  for (const auto& x : movable)
    for (const auto& y : supports)
      if (x != y) add(push_off_op(x, y), "resolve");

  // Subtask goals.
  for (const auto& s : layout.subtasks) {
    SubtaskGoal g;
    g.label = s.label;
    for (std::size_t k = 0; k < s.objects.size(); ++k) {
      const auto& dest = s.kind == SubtaskKind::sweep ? s.boxes[k] : s.destination;
      g.atoms.insert(atom("InsideOf", {s.objects[k], dest}));
    }
    if (s.kind == SubtaskKind::rotate) g.atoms.insert(atom("Closed", {"hinge_lid"}));
    if (s.kind == SubtaskKind::slide) g.atoms.insert(atom("Closed", {"top_drawer"}));
    inst.goal.required.insert(g.atoms.begin(), g.atoms.end());
    inst.subtask_goals.push_back(std::move(g));
  }
  inst.budget = default_budget(spec.factor, spec.complexity);
  return inst;
}

State perturb_scene(const State& state, PerturbMode mode, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidValue("perturbation fraction must lie in [0, 1]");
  const auto& embodiment = embodiment_predicates();
  std::vector<Atom> relations, kept;
  for (const auto& a : state) (embodiment.count(a.predicate()) ? kept : relations).push_back(a);
  const auto m = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(relations.size()) + 1e-9));
  if (m == 0) return state;
  std::mt19937_64 rng(seed);
  if (mode == PerturbMode::drop) {
    std::vector<std::size_t> idx(relations.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<bool> drop(relations.size(), false);
    for (std::size_t i = 0; i < m; ++i) drop[idx[i]] = true;
    for (std::size_t i = 0; i < relations.size(); ++i)
      if (!drop[i]) kept.push_back(relations[i]);
    return State(std::move(kept));
  }
  const auto objs_set = state.objects();
  const std::vector<ObjectName> objs(objs_set.begin(), objs_set.end());
  if (objs.empty()) return state;
  static const std::vector<std::pair<std::string, std::size_t>> kPhysics = {
      {"OverOf", 2}, {"OnTopOf", 2}, {"InsideOf", 2}, {"Open", 1}, {"Closed", 1}};
  std::set<Atom> out(state.begin(), state.end());
  std::size_t added = 0;
  for (std::size_t attempts = 0; added < m && attempts < 1000 * m; ++attempts) {
    const auto& [pred, arity] = kPhysics[rng() % kPhysics.size()];
    std::vector<ObjectName> args;
    for (std::size_t k = 0; k < arity; ++k) args.push_back(objs[rng() % objs.size()]);
    if (arity == 2 && args[0] == args[1]) continue;
    if (out.insert(Atom(pred, std::move(args))).second) ++added;
  }
  return State(out);
}

std::size_t default_budget(Factor factor, Complexity complexity) {
  const bool high = complexity == Complexity::high;
  if (factor == Factor::combination) return high ? 30 : 15;
  return high ? 20 : 10;
}

std::string factor_group(const ScenarioSpec& spec) {
  switch (spec.factor) {
    case Factor::obstruction: return spec.level == 0 ? "Zero-gap" : "Obstruction & Affordance";
    case Factor::affordance: return "Obstruction & Affordance";
    case Factor::kinematic_gripper: return "Kinematic";
    case Factor::combination: return "Combination";
  }
  return "unknown";
}

namespace {

ScenarioSpec make_spec(const std::string& prefix, std::size_t index, Complexity c, Factor f, int level,
                       std::uint64_t base_seed) {
  ScenarioSpec s;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", index);
  s.id = prefix + "/" + to_string(c) + "/" + buf;
  s.complexity = c;
  s.factor = f;
  s.level = level;
  std::seed_seq seq{base_seed, static_cast<std::uint64_t>(std::hash<std::string>{}(s.id))};
  std::mt19937_64 rng(seq);
  s.seed = rng();
  std::vector<SubtaskKind> kinds = {SubtaskKind::pick_place, SubtaskKind::sweep, SubtaskKind::rotate,
                                    SubtaskKind::slide};
  std::shuffle(kinds.begin(), kinds.end(), rng);
  kinds.resize(subtask_count(c));
  s.subtasks = std::move(kinds);
  return s;
}

}  // namespace

std::vector<std::string> suite_profile_names() {
  return {"full", "zero-gap", "obstruction-1", "obstruction-2", "affordance", "kinematic", "combination"};
}

std::vector<ScenarioSpec> suite_profile(const std::string& name, bool mini, std::uint64_t seed) {
  const std::vector<Complexity> tiers = {Complexity::low, Complexity::medium, Complexity::high};
  std::vector<ScenarioSpec> out;
  if (name == "full") {
    struct Cell {
      const char* prefix;
      std::size_t counts[3];
    };
    const Cell cells[] = {{"obstruction-affordance", {60, 60, 40}},
                          {"kinematic", {60, 60, 40}},
                          {"combination", {40, 40, 40}}};
    for (const auto& cell : cells) {
      for (std::size_t t = 0; t < 3; ++t) {
        const std::size_t n = mini ? 10 : cell.counts[t];
        for (std::size_t i = 0; i < n; ++i) {
          const std::string prefix = cell.prefix;
          if (prefix == "kinematic") {
            out.push_back(make_spec(prefix, i, tiers[t], Factor::kinematic_gripper, 0, seed));
          } else if (prefix == "combination") {
            out.push_back(make_spec(prefix, i, tiers[t], Factor::combination, 1 + static_cast<int>(i % 2), seed));
          } else if (i % 3 == 2) {
            out.push_back(make_spec(prefix, i, tiers[t], Factor::affordance, 0, seed));
          } else {
            out.push_back(make_spec(prefix, i, tiers[t], Factor::obstruction, 1 + static_cast<int>(i % 3), seed));
          }
        }
      }
    }
    return out;
  }
  Factor factor;
  int level = 0;
  if (name == "zero-gap") {
    factor = Factor::obstruction;
  } else if (name == "obstruction-1") {
    factor = Factor::obstruction;
    level = 1;
  } else if (name == "obstruction-2") {
    factor = Factor::obstruction;
    level = 2;
  } else if (name == "affordance") {
    factor = Factor::affordance;
  } else if (name == "kinematic") {
    factor = Factor::kinematic_gripper;
  } else if (name == "combination") {
    factor = Factor::combination;
    level = 1;
  } else {
    throw InvalidValue("unknown suite profile '" + name + "'");
  }
  const std::size_t n = mini ? 20 : 100;
  for (std::size_t i = 0; i < n; ++i) {
    int lv = level;
    if (name == "combination") lv = 1 + static_cast<int>(i % 2);
    out.push_back(make_spec(name, i, tiers[i % 3], factor, lv, seed));
  }
  return out;
}

TaskOutcome score_outcome(const ScenarioInstance& instance, const Procedure& procedure,
                          const ObjectUniverse& universe, bool adapted_successfully) {
  TaskOutcome o;
  o.task_id = instance.spec.id;
  o.subtasks_total = instance.subtask_goals.size();
  auto r = rollout(instance.deployment_initial, procedure, universe);
  const State& final_state = r.final_state();
  for (const auto& g : instance.subtask_goals)
    if (std::all_of(g.atoms.begin(), g.atoms.end(), [&](const Atom& a) { return final_state.contains(a); }))
      ++o.subtasks_achieved;
  o.success = adapted_successfully && !r.first_inconsistency && o.subtasks_achieved == o.subtasks_total;
  o.demo_sequence = instance.achievement_sequence(instance.demonstration.states(), instance.demo_procedure);
  o.adapted_sequence = instance.achievement_sequence(r.states, procedure);
  return o;
}

ScenarioResult run_scenario(const ScenarioInstance& instance, const SuiteOptions& options) {
  ScenarioResult result;
  result.spec = instance.spec;
  result.outcome.task_id = instance.spec.id;
  result.outcome.subtasks_total = std::max<std::size_t>(1, instance.subtask_goals.size());
  try {
    SearchOptions demo_search;
    demo_search.depth = 1;
    SearchProposer abducer(instance.demo_procedure, demo_search);
    auto model = build_world_model(instance.demonstration, &abducer);

    State initial = instance.deployment_initial;
    if (options.perturbation)
      initial = perturb_scene(initial, options.perturbation->first, options.perturbation->second, instance.spec.seed);
    ScenarioInstance scored = instance;
    scored.deployment_initial = initial;

    std::unique_ptr<Proposer> proposer;
    if (options.proposer) {
      proposer = options.proposer(instance);
    } else {
      SearchOptions so;
      so.depth = options.depth;
      proposer = std::make_unique<SearchProposer>(instance.library, so);
    }
    const std::size_t budget = options.budget.value_or(instance.budget);
    auto report = adapt(model, initial, instance.goal, *proposer, budget);
    result.outcome = score_outcome(scored, report.adapted, report.universe,
                                   report.status == AdaptationStatus::success);
    result.report = std::move(report);
  } catch (const std::exception& e) {
    result.error = e.what();
    result.outcome.success = false;
    result.outcome.subtasks_achieved = 0;
  }
  return result;
}

SuiteResult evaluate_suite(const std::vector<ScenarioSpec>& specs, const SuiteOptions& options) {
  SuiteResult out;
  out.scenarios.resize(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        out.scenarios[i] = run_scenario(generate_scenario(specs[i]), options);
      } catch (const std::exception& e) {
        auto& r = out.scenarios[i];
        r.spec = specs[i];
        r.outcome.task_id = specs[i].id;
        r.error = e.what();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, specs.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::sort(out.scenarios.begin(), out.scenarios.end(),
            [](const ScenarioResult& a, const ScenarioResult& b) { return a.spec.id < b.spec.id; });

  const std::vector<std::string> groups = {"Zero-gap", "Obstruction & Affordance", "Kinematic", "Combination"};
  const std::vector<Complexity> tiers = {Complexity::low, Complexity::medium, Complexity::high};
  for (const auto& g : groups) {
    for (auto c : tiers) {
      std::vector<TaskOutcome> cell;
      for (const auto& r : out.scenarios)
        if (factor_group(r.spec) == g && r.spec.complexity == c) cell.push_back(r.outcome);
      if (!cell.empty()) out.rows.push_back(summarize(g, to_string(c), cell, options.metrics));
    }
  }
  return out;
}

}  // namespace counterplan
