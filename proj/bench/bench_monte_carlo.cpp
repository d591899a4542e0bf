// Serial reference loop against the OpenMP loop for the Monte Carlo basin run.
// Thread count follows OMP_NUM_THREADS / HGL_THREADS.

#include "hgl/certificates.hpp"
#include "hgl/simulator.hpp"

#include <benchmark/benchmark.h>

namespace {

void run(benchmark::State& state, hgl::Execution execution) {
    const hgl::GridParameters p = hgl::default_certified_grid(2, 1);
    const hgl::EquilibriumSet eq = hgl::solve_stationary(p);
    hgl::MonteCarloConfig cfg;
    cfg.trials = static_cast<std::size_t>(state.range(0));
    cfg.seed = 7;
    cfg.integrator.t_end = 200.0;
    cfg.integrator.record = false;
    cfg.execution = execution;
    int threads = 1;
    for (auto _ : state) {
        const hgl::MonteCarloReport r = hgl::monte_carlo_agas(p, eq, cfg);
        threads = r.threads_used;
        benchmark::DoNotOptimize(r.fraction_stable);
    }
    state.counters["threads"] = threads;
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MonteCarloSerial(benchmark::State& state) { run(state, hgl::Execution::Serial); }
void BM_MonteCarloParallel(benchmark::State& state) { run(state, hgl::Execution::Parallel); }

}  // namespace

BENCHMARK(BM_MonteCarloSerial)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MonteCarloParallel)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
