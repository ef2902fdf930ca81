// Micro-benchmarks for the hot paths: operator execution, repair search and
// sequence edit distance.

#include <benchmark/benchmark.h>

#include <random>

#include "counterplan/executor.hpp"
#include "counterplan/metrics.hpp"
#include "counterplan/proposers.hpp"
#include "counterplan/scenario.hpp"
#include "counterplan/world_model.hpp"

using namespace counterplan;

namespace {

ScenarioInstance blocker_scenario(Complexity c) {
  ScenarioSpec spec;
  spec.id = "bench";
  spec.complexity = c;
  spec.factor = Factor::obstruction;
  spec.level = 1;
  spec.seed = 11;
  const std::vector<SubtaskKind> kinds{SubtaskKind::pick_place, SubtaskKind::rotate, SubtaskKind::sweep,
                                       SubtaskKind::slide};
  spec.subtasks.assign(kinds.begin(), kinds.begin() + static_cast<std::ptrdiff_t>(subtask_count(c)));
  return generate_scenario(spec);
}

ObjectUniverse universe_of(const ScenarioInstance& inst) {
  ObjectUniverse u;
  for (const auto& f : inst.demonstration.frames)
    for (const auto& o : f.state.objects())
      if (!u.contains(o)) u.add(o);
  for (const auto& o : inst.deployment_initial.objects())
    if (!u.contains(o)) u.add(o);
  return u;
}

void bm_rollout(benchmark::State& st) {
  auto inst = blocker_scenario(static_cast<Complexity>(st.range(0)));
  auto u = universe_of(inst);
  const State& s0 = inst.demonstration.frames.front().state;
  for (auto _ : st) benchmark::DoNotOptimize(rollout(s0, inst.demo_procedure, u));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(inst.demo_procedure.size()));
}
BENCHMARK(bm_rollout)->DenseRange(0, 2);

void bm_adapt_search(benchmark::State& st) {
  auto inst = blocker_scenario(static_cast<Complexity>(st.range(0)));
  SearchProposer abducer(inst.demo_procedure, SearchOptions{1, default_counterparts()});
  auto model = build_world_model(inst.demonstration, &abducer);
  for (auto _ : st) {
    SearchProposer p(inst.library, SearchOptions{static_cast<std::size_t>(st.range(1)), default_counterparts()});
    benchmark::DoNotOptimize(adapt(model, inst.deployment_initial, inst.goal, p, inst.budget));
  }
}
BENCHMARK(bm_adapt_search)->ArgsProduct({{0, 1, 2}, {1, 2}})->Unit(benchmark::kMillisecond);

void bm_edit_distance(benchmark::State& st) {
  std::mt19937_64 rng(5);
  const auto n = static_cast<std::size_t>(st.range(0));
  std::vector<std::string> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = "Op" + std::to_string(rng() % 8);
    b[i] = "Op" + std::to_string(rng() % 8);
  }
  for (auto _ : st) benchmark::DoNotOptimize(edit_distance(a, b));
}
BENCHMARK(bm_edit_distance)->RangeMultiplier(4)->Range(8, 512);

}  // namespace
BENCHMARK_MAIN();
