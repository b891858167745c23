// Serial vs OpenMP timings of the three parallel kernels. The second argument of
// every benchmark selects the path: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "kerrpair/classical.hpp"
#include "kerrpair/dynamics.hpp"
#include "kerrpair/spectral.hpp"

using namespace kerrpair;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

Execution mode(const benchmark::State& state) {
    return state.range(1) == 0 ? Execution::serial : Execution::parallel;
}

void bm_sweep_mu(benchmark::State& state) {
    auto p = ModelParams::from_mu(20.0, static_cast<int>(state.range(0)), 1.0, 1.5, 0.0);
    p.g = 0.32 * g_crit(p);
    const auto grid = linspace(14.0, 26.0, 1201);
    SweepOptions o;
    o.keep_eigenvectors = true;
    o.exec = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(sweep_mu(p, grid, o));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}

void bm_evolve(benchmark::State& state) {
    const int big_n = static_cast<int>(state.range(0));
    const auto p = ModelParams::from_mu(6.0, big_n, 1.0, 1.0, 0.05);
    const auto times = linspace(0.0, 1e4, 4001);
    const auto psi0 = WaveFunction::fock(big_n, 0);
    for (auto _ : state) benchmark::DoNotOptimize(evolve(p, psi0, times, mode(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(times.size()));
}

void bm_compare_averages(benchmark::State& state) {
    const auto p = ModelParams::from_delta(0.25, static_cast<int>(state.range(0)), 1.0, 0.5, 1.816);
    ComparisonOptions o;
    o.exec = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(compare_averages(p, o));
}

}  // namespace

BENCHMARK(bm_sweep_mu)->ArgsProduct({{46, 128}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_evolve)->ArgsProduct({{10, 64}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_compare_averages)->ArgsProduct({{40}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
