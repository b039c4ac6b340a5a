#include <benchmark/benchmark.h>

#include <array>

#include "secrl/compile.hpp"
#include "secrl/experiment.hpp"
#include "secrl/grid_mdp.hpp"
#include "secrl/learner.hpp"
#include "secrl/missions.hpp"
#include "secrl/timed.hpp"

using namespace secrl;

namespace {

const std::array<unsigned, 5> kBounds{5, 6, 20, 21, 35};

MissionFamily family_of(const benchmark::State& st) {
  return st.range(0) == 0 ? MissionFamily::Opacity : MissionFamily::SideChannel;
}

}  // namespace

static void BM_ParseMission(benchmark::State& st) {
  const std::string text = to_string(mission_formula(MissionFamily::Opacity, {1, 1}, kBounds));
  for (auto _ : st) benchmark::DoNotOptimize(parse(text));
}
BENCHMARK(BM_ParseMission);

static void BM_CompileMission(benchmark::State& st) {
  const FormulaAst f = mission_formula(family_of(st), {1, 1}, kBounds);
  const GridMdp g = build_grid(default_layout());
  const TupleAlphabet alpha = grid_alphabet(g, 2);
  for (auto _ : st) benchmark::DoNotOptimize(quantifier_eliminate(f, alpha).size());
}
BENCHMARK(BM_CompileMission)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_PlanMission(benchmark::State& st) {
  const MissionLayout l = default_layout();
  for (auto _ : st) {
    const MissionPlan p = plan_mission(l, family_of(st), {1, 1}, 0.85, 0.05);
    benchmark::DoNotOptimize(p.pruned.size());
  }
}
BENCHMARK(BM_PlanMission)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(3);

static void BM_SatisfactionBound(benchmark::State& st) {
  const auto i = static_cast<std::uint32_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(satisfaction_bound(i, i / 3, 0.05));
}
BENCHMARK(BM_SatisfactionBound)->Arg(16)->Arg(64)->Arg(256);

static void BM_SelectAction(benchmark::State& st) {
  const std::array<double, kNumActions> q{1.0, 0.5, -2.0, 3.0, 0.0};
  Rng rng = make_rng(1, 0);
  for (auto _ : st) benchmark::DoNotOptimize(select_action(q, 0x1f, 0.3, 1.0, rng));
}
BENCHMARK(BM_SelectAction);

static void BM_Train(benchmark::State& st) {
  const MissionPlan p = plan_mission(default_layout(), MissionFamily::SideChannel, {1, 1}, 0.85, 0.05);
  LearnerConfig cfg;
  cfg.episodes = 500;
  const auto algo = static_cast<Algorithm>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(train(p.pruned, p.formula, algo, cfg).records.size());
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(cfg.episodes));
  st.SetLabel(algorithm_name(algo));
}
BENCHMARK(BM_Train)
    ->Arg(static_cast<int>(Algorithm::SoftmaxEps))
    ->Arg(static_cast<int>(Algorithm::QLearning))
    ->Arg(static_cast<int>(Algorithm::DynaQ))
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
