#include <benchmark/benchmark.h>

#include "lod/ctmc.hpp"
#include "lod/diffusion.hpp"
#include "lod/killed_asg.hpp"
#include "lod/moran.hpp"
#include "lod/pruned_ldasg.hpp"

using namespace lod;

static void BM_MoranStream(benchmark::State& state) {
  const MoranParams params{state.range(0), 0.01, 0.005, 0.005, 0.995, SelectionMode::fecundity};
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream rng(1, i++);
    const TypeVector types = iid_types(params.population_size, 0.2, rng);
    const EventStream stream = generate_event_stream(params, 10.0, rng);
    benchmark::DoNotOptimize(propagate_types(stream, types, params.selection_mode));
  }
}
BENCHMARK(BM_MoranStream)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_KilledAsgAbsorption(benchmark::State& state) {
  const GeneratorSpec spec = killed_asg_generator(DiffusionParams{10.0, 20.0, 0.005, 0.995});
  StopRule stop;
  stop.record_path = false;
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream rng(2, i++);
    benchmark::DoNotOptimize(simulate_ctmc(spec, State{1}, stop, rng));
  }
}
BENCHMARK(BM_KilledAsgAbsorption);

static void BM_SamplingRecursion(benchmark::State& state) {
  const double sigma = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sampling_recursion_solve(sigma, 20.0, 0.995));
}
BENCHMARK(BM_SamplingRecursion)->Arg(10)->Arg(100);

static void BM_FearnheadSolve(benchmark::State& state) {
  const double sigma = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fearnhead_solve(sigma, 20.0, 0.995));
}
BENCHMARK(BM_FearnheadSolve)->Arg(10)->Arg(100);

static void BM_WrightMoments(benchmark::State& state) {
  const DiffusionParams params{static_cast<double>(state.range(0)), 20.0, 0.005, 0.995};
  for (auto _ : state) benchmark::DoNotOptimize(wright_moments(params, 20));
}
BENCHMARK(BM_WrightMoments)->Arg(10)->Arg(100);

static void BM_LdasgLevels(benchmark::State& state) {
  const DiffusionParams params{10.0, 20.0, 0.005, 0.995};
  LdasgOptions options;
  options.record_events = false;
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream rng(3, i++);
    benchmark::DoNotOptimize(simulate_ldasg_levels(params, 5.0, rng, options));
  }
}
BENCHMARK(BM_LdasgLevels);
BENCHMARK_MAIN();
