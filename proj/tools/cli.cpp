#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "counterplan/adaptation.hpp"
#include "counterplan/metrics.hpp"
#include "counterplan/pddl_io.hpp"
#include "counterplan/proposers.hpp"
#include "counterplan/report_io.hpp"
#include "counterplan/scenario.hpp"
#include "counterplan/world_model.hpp"

namespace counterplan::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Unreadable or empty input files.
class InputError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw InputError(path.string() + ": file is empty");
  return text;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path.string() + ": cannot write file");
  out << text;
}

Procedure merge_by_name(std::initializer_list<const Procedure*> parts) {
  Procedure out;
  std::set<std::string> seen;
  for (const auto* p : parts)
    for (const auto& op : *p)
      if (seen.insert(op->name()).second) out.push_back(op);
  return out;
}

struct LoadedInputs {
  std::optional<Domain> domain;
  TrajectoryDocument trajectory;
  std::optional<ScenarioEnvelope> envelope;

  const PredicateSet* predicates() const { return domain ? &domain->predicates : nullptr; }
  Procedure domain_operators() const { return domain ? wrap(domain->operators) : Procedure{}; }
};

LoadedInputs load_inputs(const RunManifest& m) {
  LoadedInputs in;
  if (m.domain) in.domain = parse_domain(read_file(*m.domain));
  const std::string text = read_file(*m.trajectory);
  in.trajectory = parse_trajectory(text, in.predicates());
  in.envelope = parse_scenario_envelope(text, in.predicates());
  return in;
}

std::string endpoint_or_env(const std::optional<std::string>& endpoint) {
  if (endpoint && !endpoint->empty()) return *endpoint;
  if (const char* env = std::getenv("COUNTERPLAN_ENDPOINT")) return env;
  return {};
}

std::unique_ptr<Proposer> make_proposer(const RunManifest& m, const Procedure& library) {
  if (m.proposer == "scripted") return std::make_unique<ScriptedProposer>(parse_scripted_fixture(read_file(*m.fixture)));
  if (m.proposer == "external")
    return std::make_unique<ExternalProposer>(ExternalEndpoint::parse(endpoint_or_env(m.endpoint)),
                                              std::chrono::milliseconds(m.timeout_ms));
  SearchOptions options;
  options.depth = m.depth;
  return std::make_unique<SearchProposer>(library, options);
}

// World models are abduced against the known operators (domain file and
// the scenario's demonstration operators), falling back to the default
// abducer for transitions none of them reproduces.
WorldModel build_model(const LoadedInputs& in) {
  const Procedure domain_ops = in.domain_operators();
  const Procedure demo_ops = in.envelope ? in.envelope->demo_operators : Procedure{};
  const Procedure known = merge_by_name({&domain_ops, &demo_ops});
  BuildOptions options;
  options.domain = in.domain ? &*in.domain : nullptr;
  if (known.empty()) return build_world_model(in.trajectory, nullptr, options);
  SearchOptions so;
  so.depth = 1;
  SearchProposer abducer(known, so);
  return build_world_model(in.trajectory, &abducer, options);
}

void print_error(std::ostream& err, const std::string& where, const std::exception& e) {
  err << "error: " << (where.empty() ? "" : where + ": ") << e.what() << "\n";
}

}  // namespace

void RunManifest::validate() const {
  if (!trajectory) throw InvalidValue("--trajectory is required");
  if (budget < 1) throw InvalidValue("--budget must be at least 1");
  if (proposer == "scripted") {
    if (!fixture) throw InvalidValue("--proposer scripted needs --fixture");
  } else if (proposer == "external") {
    if (endpoint_or_env(endpoint).empty())
      throw InvalidValue("--proposer external needs --endpoint or COUNTERPLAN_ENDPOINT");
  } else if (proposer != "search") {
    throw InvalidValue("unknown proposer '" + proposer + "' (expected scripted, search or external)");
  }
  if (timeout_ms <= 0) throw InvalidValue("--timeout-ms must be positive");
}

int cmd_validate(const ValidateInputs& inputs, std::ostream& out, std::ostream& err) {
  int failures = 0;
  std::size_t checked = 0;
  std::optional<Domain> domain;
  auto check = [&](const fs::path& path, const std::string& kind, const auto& fn) {
    ++checked;
    try {
      fn(read_file(path));
      out << "ok " << path.string() << " (" << kind << ")\n";
    } catch (const std::exception& e) {
      ++failures;
      err << path.string() << ": " << kind << ": " << e.what() << "\n";
    }
  };
  auto preds = [&]() -> const PredicateSet* { return domain ? &domain->predicates : nullptr; };
  if (inputs.domain) check(*inputs.domain, "domain", [&](const std::string& t) { domain = parse_domain(t); });
  if (inputs.trajectory)
    check(*inputs.trajectory, "trajectory", [&](const std::string& t) {
      parse_trajectory(t, preds());
      parse_scenario_envelope(t, preds());
    });
  if (inputs.deploy_state)
    check(*inputs.deploy_state, "state", [&](const std::string& t) { parse_state_json(t, preds()); });
  if (inputs.goal) check(*inputs.goal, "goal", [&](const std::string& t) { parse_goal_json(t, preds()); });
  if (inputs.fixture)
    check(*inputs.fixture, "fixture", [&](const std::string& t) { parse_scripted_fixture(t); });
  if (inputs.patch) check(*inputs.patch, "patch", [&](const std::string& t) { parse_patch(t, preds()); });

  for (const auto& path : inputs.files) {
    std::string kind = "domain";
    try {
      const std::string text = read_file(path);
      const auto first = text.find_first_not_of(" \t\r\n");
      const auto ext = path.extension().string();
      if (ext == ".patch" || ext == ".diff" || text.find("<<<<<<< SEARCH") != std::string::npos) {
        kind = "patch";
      } else if (text[first] == '{' || text[first] == '[') {
        auto doc = json::parse(text, nullptr, false);
        kind = "trajectory";
        if (doc.is_object() && doc.contains("atoms")) kind = "state";
        if (doc.is_object() && (doc.contains("required") || doc.contains("forbidden"))) kind = "goal";
        if (doc.is_array()) kind = !doc.empty() && doc.front().is_object() ? "fixture" : "state";
      }
    } catch (const std::exception&) {
      // reported by the parse below
    }
    check(path, kind, [&](const std::string& t) {
      if (kind == "patch") parse_patch(t, preds());
      if (kind == "state") parse_state_json(t, preds());
      if (kind == "goal") parse_goal_json(t, preds());
      if (kind == "fixture") parse_scripted_fixture(t);
      if (kind == "trajectory") {
        parse_trajectory(t, preds());
        parse_scenario_envelope(t, preds());
      }
      if (kind == "domain") parse_domain(t);
    });
  }
  if (checked == 0) {
    err << "error: nothing to validate\n";
    return kExitInputError;
  }
  return failures ? kExitInputError : kExitOk;
}

int cmd_build_model(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  LoadedInputs in;
  try {
    manifest.validate();
    in = load_inputs(manifest);
  } catch (const std::exception& e) {
    print_error(err, "", e);
    return kExitInputError;
  }
  WorldModel model;
  try {
    if (manifest.proposer == "search") {
      model = build_model(in);
    } else {
      BuildOptions options;
      options.domain = in.domain ? &*in.domain : nullptr;
      auto proposer = make_proposer(manifest, {});
      model = build_world_model(in.trajectory, proposer.get(), options);
      if (auto* ext = dynamic_cast<ExternalProposer*>(proposer.get()); ext && ext->transport_failures() > 0)
        err << "warning: " << ext->transport_failures() << " transport failures during abduction\n";
    }
  } catch (const WorldModelError& e) {
    print_error(err, "world model", e);
    for (const auto& v : e.violations()) err << "  unmet: " << v.str() << "\n";
    return kExitNotSuccessful;
  } catch (const std::exception& e) {
    print_error(err, "world model", e);
    return kExitInputError;
  }
  try {
    fs::create_directories(manifest.out);
    write_file(manifest.out / "world_model.json", world_model_to_json(model));
    write_file(manifest.out / "operators.txt", format_operator_blocks(model.operators));
    write_file(manifest.out / "task_spec.txt", emit_task_specification(model.procedure));
  } catch (const std::exception& e) {
    print_error(err, "", e);
    return kExitInputError;
  }
  out << "world model: " << model.operators.size() << " operators, " << model.procedure.size()
      << " steps, verified against " << model.demonstration.size() << " frames\n";
  return kExitOk;
}

int cmd_adapt(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  LoadedInputs in;
  State deployment;
  Goal goal;
  try {
    manifest.validate();
    in = load_inputs(manifest);
    if (manifest.deploy_state) {
      deployment = parse_state_json(read_file(*manifest.deploy_state), in.predicates());
    } else if (in.envelope) {
      deployment = in.envelope->deployment_initial;
    } else {
      throw InvalidValue("--deploy-state is required unless the trajectory carries a scenario");
    }
  } catch (const std::exception& e) {
    print_error(err, "", e);
    return kExitInputError;
  }

  WorldModel model;
  try {
    model = build_model(in);
  } catch (const WorldModelError& e) {
    print_error(err, "world model", e);
    return kExitNotSuccessful;
  } catch (const std::exception& e) {
    print_error(err, "world model", e);
    return kExitInputError;
  }

  std::unique_ptr<Proposer> proposer;
  try {
    if (manifest.goal) {
      goal = parse_goal_json(read_file(*manifest.goal), in.predicates());
    } else if (in.envelope && !(in.envelope->goal.required.empty() && in.envelope->goal.forbidden.empty())) {
      goal = in.envelope->goal;
    } else {
      goal = derive_goal(model.demonstration.back(), GoalProjection::physics());
    }
    const Procedure domain_ops = in.domain_operators();
    const Procedure env_ops = in.envelope ? in.envelope->library : Procedure{};
    Procedure library = merge_by_name({&domain_ops, &env_ops});
    if (library.empty()) library = model.operators;
    proposer = make_proposer(manifest, library);
  } catch (const std::exception& e) {
    print_error(err, "", e);
    return kExitInputError;
  }

  AdaptationReport report;
  try {
    report = adapt(model, deployment, goal, *proposer, manifest.budget);
  } catch (const std::exception& e) {
    print_error(err, "adaptation", e);
    return kExitInputError;
  }

  try {
    fs::create_directories(manifest.out);
    write_file(manifest.out / "report.json", report_to_json(report));
    write_file(manifest.out / "patches.txt", format_patch_log(report));
    write_file(manifest.out / "task_spec.txt", emit_task_specification(report.adapted));

    std::string jsonl;
    json start;
    start["event"] = "start";
    start["proposer"] = manifest.proposer;
    start["budget"] = manifest.budget;
    start["depth"] = manifest.depth;
    start["seed"] = manifest.seed;
    start["world_model_operators"] = model.operators.size();
    start["procedure_length"] = model.procedure.size();
    jsonl += start.dump() + "\n";
    std::istringstream patches(patch_log_jsonl(report));
    for (std::string line; std::getline(patches, line);) {
      auto e = json::parse(line);
      json wrapped;
      wrapped["event"] = "exploration";
      for (auto& [k, v] : e.items()) wrapped[k] = v;
      jsonl += wrapped.dump() + "\n";
    }
    json end;
    end["event"] = "result";
    end["status"] = to_string(report.status);
    end["explorations_used"] = report.explorations_used;
    end["transport_failures"] = report.transport_failures;
    end["message"] = report.message;
    jsonl += end.dump() + "\n";
    write_file(manifest.out / "log.jsonl", jsonl);

    std::string text = "proposer: " + manifest.proposer + "\nworld model: " + std::to_string(model.operators.size()) +
                       " operators, " + std::to_string(model.procedure.size()) + " steps\n\n" +
                       format_patch_log(report) + "status: " + to_string(report.status) + " (" + report.message +
                       ")\n";
    write_file(manifest.out / "log.txt", text);
  } catch (const std::exception& e) {
    print_error(err, "", e);
    return kExitInputError;
  }

  out << "status: " << to_string(report.status) << "\n"
      << "explorations: " << report.explorations_used << "/" << report.budget << "\n"
      << "accepted patches: "
      << std::count_if(report.patches.begin(), report.patches.end(),
                       [](const PatchLogEntry& e) { return e.outcome == PatchLogEntry::Outcome::accepted; })
      << "\n"
      << "adapted procedure: " << report.adapted.size() << " actions\n";
  if (report.status == AdaptationStatus::success) return kExitOk;
  err << report.message << "\n";
  return report.transport_failures > 0 ? kExitTransportFailure : kExitNotSuccessful;
}

int cmd_bench(const BenchConfig& config, std::ostream& out, std::ostream& err) {
  SuiteOptions options;
  std::vector<ScenarioSpec> specs;
  try {
    if (config.lambda < 0) throw InvalidValue("--lambda must be non-negative");
    if (config.budget && *config.budget < 1) throw InvalidValue("--budget must be at least 1");
    specs = suite_profile(config.suite, config.mini, config.seed);
    options.depth = config.depth;
    options.budget = config.budget;
    options.threads = std::max<std::size_t>(1, config.threads);
    options.metrics.lambda = config.lambda;
    if (config.perturb) {
      const auto colon = config.perturb->find(':');
      if (colon == std::string::npos) throw InvalidValue("--perturb expects drop:<fraction> or noise:<fraction>");
      const auto mode = config.perturb->substr(0, colon);
      if (mode != "drop" && mode != "noise") throw InvalidValue("--perturb mode must be drop or noise");
      double fraction = 0;
      try {
        fraction = std::stod(config.perturb->substr(colon + 1));
      } catch (const std::exception&) {
        throw InvalidValue("--perturb fraction is not a number");
      }
      if (fraction < 0 || fraction > 1) throw InvalidValue("--perturb fraction must lie in [0, 1]");
      options.perturbation = std::make_pair(mode == "drop" ? PerturbMode::drop : PerturbMode::noise, fraction);
    }
    if (config.proposer == "external") {
      const auto endpoint = ExternalEndpoint::parse(endpoint_or_env(config.endpoint));
      const auto timeout = std::chrono::milliseconds(config.timeout_ms);
      options.proposer = [endpoint, timeout](const ScenarioInstance&) {
        return std::make_unique<ExternalProposer>(endpoint, timeout);
      };
    } else if (config.proposer != "search") {
      throw InvalidValue("bench supports --proposer search or external");
    }
    fs::create_directories(config.out);
    if (config.export_dir) {
      fs::create_directories(*config.export_dir);
      for (const auto& spec : specs) {
        std::string name = spec.id;
        std::replace(name.begin(), name.end(), '/', '_');
        write_file(*config.export_dir / (name + ".json"), serialize_scenario(generate_scenario(spec)));
      }
    }
  } catch (const std::exception& e) {
    print_error(err, "", e);
    return kExitInputError;
  }

  const auto result = evaluate_suite(specs, options);
  std::size_t errors = 0;
  for (const auto& s : result.scenarios) {
    if (s.error.empty()) continue;
    ++errors;
    err << s.spec.id << ": " << s.error << "\n";
  }
  try {
    write_file(config.out / "metrics.csv", metrics_csv(result.rows));
    write_file(config.out / "suite.json", suite_result_to_json(result));
  } catch (const std::exception& e) {
    print_error(err, "", e);
    return kExitInputError;
  }
  out << metrics_table(result.rows);
  out << "scenarios: " << result.scenarios.size() << ", errors: " << errors << "\n";
  return kExitOk;
}

int cmd_metrics(const fs::path& outcomes, double lambda, const std::optional<fs::path>& out_dir, std::ostream& out,
                std::ostream& err) {
  std::vector<MetricsRow> rows;
  try {
    if (lambda < 0) throw InvalidValue("--lambda must be non-negative");
    const auto doc = json::parse(read_file(outcomes));
    if (!doc.is_array()) throw ParseError("outcomes file must be a JSON array");
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::vector<TaskOutcome>> cells;
    auto strings = [](const json& j, const char* key) {
      std::vector<std::string> v;
      if (!j.contains(key)) return v;
      for (const auto& s : j.at(key)) v.push_back(s.get<std::string>());
      return v;
    };
    for (const auto& j : doc) {
      if (!j.is_object()) throw ParseError("each outcome must be an object");
      TaskOutcome o;
      o.task_id = j.value("task_id", std::string());
      o.subtasks_total = j.value("subtasks_total", std::size_t{1});
      o.subtasks_achieved = j.value("subtasks_achieved", std::size_t{0});
      o.success = j.value("success", false);
      o.demo_sequence = strings(j, "demo_sequence");
      o.adapted_sequence = strings(j, "adapted_sequence");
      o.validate();
      std::pair<std::string, std::string> key{j.value("factor", std::string("all")),
                                              j.value("complexity", std::string("all"))};
      if (!cells.count(key)) order.push_back(key);
      cells[key].push_back(std::move(o));
    }
    if (order.empty()) throw InvalidValue("outcomes file lists no tasks");
    MetricsConfig cfg;
    cfg.lambda = lambda;
    for (const auto& key : order) rows.push_back(summarize(key.first, key.second, cells[key], cfg));
    if (out_dir) {
      fs::create_directories(*out_dir);
      write_file(*out_dir / "metrics.csv", metrics_csv(rows));
    }
  } catch (const json::exception& e) {
    print_error(err, outcomes.string(), e);
    return kExitInputError;
  } catch (const std::exception& e) {
    print_error(err, outcomes.string(), e);
    return kExitInputError;
  }
  out << metrics_table(rows);
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterfactual procedure adaptation from demonstrations"};
  app.require_subcommand(1);

  ValidateInputs vin;
  auto* validate = app.add_subcommand("validate", "Parse input files and report errors");
  validate->add_option("--domain", vin.domain, "Domain file");
  validate->add_option("--trajectory", vin.trajectory, "Trajectory JSON");
  validate->add_option("--deploy-state", vin.deploy_state, "Deployment state JSON");
  validate->add_option("--goal", vin.goal, "Goal JSON");
  validate->add_option("--fixture", vin.fixture, "Scripted proposer fixture");
  validate->add_option("--patch", vin.patch, "SEARCH/REPLACE patch text");
  validate->add_option("files", vin.files, "Further files; the kind is guessed from the content");

  RunManifest manifest;
  auto add_manifest = [&](CLI::App* cmd, bool adaptation) {
    cmd->add_option("--domain", manifest.domain, "Domain file with predicates and operators");
    cmd->add_option("--trajectory", manifest.trajectory, "Demonstration trajectory JSON")->required();
    cmd->add_option("--proposer", manifest.proposer, "scripted, search or external")
        ->check(CLI::IsMember({"scripted", "search", "external"}));
    cmd->add_option("--fixture", manifest.fixture, "Scripted proposer fixture");
    cmd->add_option("--depth", manifest.depth, "Search depth");
    cmd->add_option("--endpoint", manifest.endpoint, "External proposer endpoint (exec:CMD or http://...)");
    cmd->add_option("--seed", manifest.seed, "Seed recorded in the run log");
    cmd->add_option("--out", manifest.out, "Output directory");
    cmd->add_option("--timeout-ms", manifest.timeout_ms, "External proposer timeout");
    if (adaptation) {
      cmd->add_option("--deploy-state", manifest.deploy_state, "Counterfactual initial state JSON");
      cmd->add_option("--goal", manifest.goal, "Goal JSON");
      cmd->add_option("--budget", manifest.budget, "Exploration budget");
    }
  };
  auto* build = app.add_subcommand("build-model", "Abduce and verify a world model from a demonstration");
  add_manifest(build, false);
  auto* adapt_cmd = app.add_subcommand("adapt", "Adapt the demonstrated procedure to a deployment state");
  add_manifest(adapt_cmd, true);

  BenchConfig bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark suite");
  bench_cmd->add_option("--suite", bench.suite, "Suite profile")->check(CLI::IsMember(suite_profile_names()));
  bench_cmd->add_flag("--mini", bench.mini, "Ten scenarios per cell");
  bench_cmd->add_option("--proposer", bench.proposer, "search or external");
  bench_cmd->add_option("--depth", bench.depth, "Search depth");
  bench_cmd->add_option("--budget", bench.budget, "Override the per-scenario budget");
  bench_cmd->add_option("--endpoint", bench.endpoint, "External proposer endpoint");
  bench_cmd->add_option("--seed", bench.seed, "Suite seed");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads");
  bench_cmd->add_option("--lambda", bench.lambda, "Weight of the SR - lambda * PD column");
  bench_cmd->add_option("--perturb", bench.perturb, "drop:<fraction> or noise:<fraction>");
  bench_cmd->add_option("--export", bench.export_dir, "Write each scenario file here");
  bench_cmd->add_option("--out", bench.out, "Output directory");
  bench_cmd->add_option("--timeout-ms", bench.timeout_ms, "External proposer timeout");

  fs::path outcomes;
  double lambda = 0.0;
  std::optional<fs::path> metrics_out;
  auto* metrics_cmd = app.add_subcommand("metrics", "Compute SR, GC and PD from task outcomes");
  metrics_cmd->add_option("outcomes", outcomes, "Task outcomes JSON")->required();
  metrics_cmd->add_option("--lambda", lambda, "Weight of the SR - lambda * PD column");
  metrics_cmd->add_option("--out", metrics_out, "Write metrics.csv here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (*validate) return cmd_validate(vin, out, err);
  if (*build) return cmd_build_model(manifest, out, err);
  if (*adapt_cmd) return cmd_adapt(manifest, out, err);
  if (*bench_cmd) return cmd_bench(bench, out, err);
  if (*metrics_cmd) return cmd_metrics(outcomes, lambda, metrics_out, out, err);
  return kExitInputError;
}

}  // namespace counterplan::cli
