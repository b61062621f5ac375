// Serial vs OpenMP execution of the replicated estimation experiment and
// the randomized verification suites. Both paths produce identical results;
// only wall time differs.

#include <string>

#include <benchmark/benchmark.h>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "qfi/estimation.hpp"
#include "qfi/verify.hpp"

using namespace qfi;

namespace {

estimation::Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? estimation::Execution::Serial : estimation::Execution::Parallel;
}

void BM_CramerRao(benchmark::State& state) {
  const ParametricChannel ch = builtin("amplitude-damping");
  const POVM povm = POVM::computational(2);
  estimation::ExperimentConfig cfg;
  cfg.shots = 10000;
  cfg.replications = 64;
  cfg.execution = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(estimation::cr_experiment(ch, 0.3, povm, "z", cfg).variance);
  state.SetItemsProcessed(state.iterations() * cfg.replications);
}

void BM_Adaptive(benchmark::State& state) {
  const ParametricChannel ch = builtin("dephasing");
  estimation::ExperimentConfig cfg;
  cfg.shots = 10000;
  cfg.replications = 64;
  cfg.execution = mode(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(estimation::adaptive_two_stage(ch, 0.2, estimation::AdaptiveConfig{}, cfg).variance);
  state.SetItemsProcessed(state.iterations() * cfg.replications);
}

void BM_OrderingSuite(benchmark::State& state) {
  verify::SuiteConfig cfg;
  cfg.channels = 100;
  cfg.execution = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(verify::run_ordering_suite(cfg).checks);
  state.SetItemsProcessed(state.iterations() * cfg.channels);
}

void BM_DirectionalSuite(benchmark::State& state) {
  verify::SuiteConfig cfg;
  cfg.multi_channels = 20;
  cfg.execution = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(verify::run_directional_suite(cfg).checks);
  state.SetItemsProcessed(state.iterations() * cfg.multi_channels);
}

}  // namespace

// Argument 0 runs the serial reference, 1 the OpenMP path.
BENCHMARK(BM_CramerRao)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Adaptive)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OrderingSuite)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DirectionalSuite)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
#ifdef _OPENMP
  benchmark::AddCustomContext("omp_max_threads", std::to_string(omp_get_max_threads()));
#endif
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
