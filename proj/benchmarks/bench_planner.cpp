#include <benchmark/benchmark.h>

#include "relaxmitl/energy.hpp"
#include "relaxmitl/mitl.hpp"
#include "relaxmitl/planner.hpp"
#include "relaxmitl/relaxed_tba.hpp"
#include "relaxmitl/sim.hpp"

using namespace relaxmitl;

namespace {

struct Fixture {
  sim::Scenario sc;
  sim::Environment env;
  product::Rpa rpa;
  energy::EnergyTable table;

  Fixture(int n, int N)
      : sc(scenario(n, N)), env(sc), rpa(planner::scenario_product(sc, env)),
        table(energy::compute_energy(rpa, energy::largest_self_reachable(rpa), {sc.planner.alpha})) {}

  static sim::Scenario scenario(int n, int N) {
    sim::Scenario s = sim::scaled_case_study(n, 2, true);
    s.planner.horizon = N;
    s.sensor.range = std::max(N, s.sensor.range);
    return s;
  }
};

void BM_BuildCaseStudyTba(benchmark::State& state) {
  const sim::Scenario sc = sim::case_study_scenario();
  const auto f = mitl::parse(sc.formula, sim::scenario_alphabet(sc));
  for (auto _ : state) benchmark::DoNotOptimize(tba::build_relaxed_tba(f));
}
BENCHMARK(BM_BuildCaseStudyTba);

void BM_ComputeEnergy(benchmark::State& state) {
  Fixture fx(static_cast<int>(state.range(0)), 4);
  const auto fstar = energy::largest_self_reachable(fx.rpa);
  for (auto _ : state) benchmark::DoNotOptimize(energy::compute_energy(fx.rpa, fstar, {0.8}));
  state.counters["P"] = static_cast<double>(fx.rpa.size());
}
BENCHMARK(BM_ComputeEnergy)->Arg(10)->Arg(30)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_InitialPlan(benchmark::State& state) {
  const int N = static_cast<int>(state.range(1));
  Fixture fx(static_cast<int>(state.range(0)), N);
  const auto cfg = planner::scenario_config(fx.sc);
  const auto a = planner::initial_agent_state(fx.rpa);
  const auto rewards = sim::sensed_rewards(fx.env, fx.rpa.cell_of(a.p), fx.sc.sensor);
  for (auto _ : state) benchmark::DoNotOptimize(planner::initial_plan(fx.rpa, fx.table, rewards, cfg, a));
}
BENCHMARK(BM_InitialPlan)->ArgsProduct({{10, 30, 50}, {4, 6, 8}})->Unit(benchmark::kMillisecond);

// One closed-loop episode of ten steps, sensing and updates included.
void BM_Episode(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), N = static_cast<int>(state.range(1));
  for (auto _ : state) {
    state.PauseTiming();
    Fixture fx(n, N);
    state.ResumeTiming();
    benchmark::DoNotOptimize(planner::run_loop(fx.rpa, fx.env, planner::scenario_config(fx.sc), 10, fx.sc.sensor));
  }
}
BENCHMARK(BM_Episode)->ArgsProduct({{10, 30, 50}, {4, 6, 8}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
