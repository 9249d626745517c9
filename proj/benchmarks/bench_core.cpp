#include <benchmark/benchmark.h>

#include "hierenv/analysis.hpp"
#include "hierenv/measures.hpp"
#include "hierenv/propagation.hpp"

using namespace hierenv;

namespace {

ModelParams weak_params(double omega, int n) {
    ModelParams p;
    p.gamma0 = 5.0;
    p.kappa = 5.0;
    p.omega = omega;
    p.gamma = 5.0;
    p.n_cavities = n;
    return p;
}

void BM_ReducedPropagation(benchmark::State& state) {
    const ModelParams p = weak_params(1.5, 6);
    const TimeGrid grid{3.0, 1e-3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(p, grid));
    }
}
BENCHMARK(BM_ReducedPropagation)->Unit(benchmark::kMicrosecond);

void BM_FullRingPropagation(benchmark::State& state) {
    ModelParams p = weak_params(1.5, static_cast<int>(state.range(0)));
    p.topology = Topology::RingExplicit;
    const TimeGrid grid{3.0, 1e-3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(p, grid));
    }
}
BENCHMARK(BM_FullRingPropagation)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMicrosecond);

void BM_ClosedForm(benchmark::State& state) {
    const ModelParams p = weak_params(1.0, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(g_closed_form(p, 3.0));
    }
}
BENCHMARK(BM_ClosedForm);

void BM_Measures(benchmark::State& state) {
    const AmplitudeTrajectory traj = simulate(weak_params(1.0, 6), TimeGrid{3.0, 1e-3});
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_measures(traj, 3.0));
    }
}
BENCHMARK(BM_Measures)->Unit(benchmark::kMicrosecond);

void BM_SweepPoint(benchmark::State& state) {
    const ModelParams p = weak_params(2.0, 6);
    const TimeGrid grid{3.0, 1e-3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_measures(simulate(p, grid), 3.0));
    }
}
BENCHMARK(BM_SweepPoint)->Unit(benchmark::kMicrosecond);

void BM_Fig4Sweep(benchmark::State& state) {
    SweepSpec spec;
    spec.base = weak_params(0.0, 0);
    spec.omega_start = 0.0;
    spec.omega_stop = 5.0;
    spec.omega_step = 0.25;
    spec.n_min = 2;
    spec.n_max = 8;
    spec.workers = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep(spec));
    }
}
BENCHMARK(BM_Fig4Sweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
