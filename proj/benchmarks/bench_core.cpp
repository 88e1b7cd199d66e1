#include <benchmark/benchmark.h>

#include <cmath>

#include "wavelab/functionals.hpp"
#include "wavelab/solver.hpp"

using namespace wavelab;

namespace {

SolverConfig bench_config(int n) {
    SolverConfig cfg;
    cfg.params = {3, 3.0, -0.2};
    cfg.grid = make_grid(3, 40.0, n);
    cfg.t_final = 1.0;
    return cfg;
}

} // namespace

static void BM_rhs(benchmark::State& state) {
    SolverConfig cfg = bench_config(static_cast<int>(state.range(0)));
    FieldState s = from_physical(gaussian_bump(1.0, 0.0, 1.0), cfg);
    std::vector<double> dw, dwt;
    for (auto _ : state) {
        rhs(s, cfg, dw, dwt);
        benchmark::DoNotOptimize(dwt.data());
    }
    state.SetItemsProcessed(state.iterations() * cfg.grid.n);
}
BENCHMARK(BM_rhs)->Arg(1024)->Arg(8192)->Arg(32768);

static void BM_step(benchmark::State& state) {
    SolverConfig cfg = bench_config(static_cast<int>(state.range(0)));
    FieldState s = from_physical(gaussian_bump(1.0, 0.0, 1.0), cfg);
    const double dt = time_step(cfg);
    for (auto _ : state) {
        s = step(s, dt, cfg);
        benchmark::DoNotOptimize(s.w.data());
    }
    state.SetItemsProcessed(state.iterations() * cfg.grid.n);
}
BENCHMARK(BM_step)->Arg(1024)->Arg(8192)->Arg(32768);

static void BM_discrete_energy(benchmark::State& state) {
    SolverConfig cfg = bench_config(static_cast<int>(state.range(0)));
    FieldState s = from_physical(gaussian_bump(1.0, 0.0, 1.0), cfg);
    for (auto _ : state) benchmark::DoNotOptimize(discrete_energy(s, cfg));
    state.SetItemsProcessed(state.iterations() * cfg.grid.n);
}
BENCHMARK(BM_discrete_energy)->Arg(8192)->Arg(32768);

static void BM_shell_integral(benchmark::State& state) {
    const RadialGrid g = make_grid(3, 40.0, static_cast<int>(state.range(0)));
    std::vector<double> f(g.nodes());
    for (int j = 0; j <= g.n; ++j) f[j] = std::exp(-g.r(j));
    for (auto _ : state) benchmark::DoNotOptimize(shell_integral(g, f, 0.0, g.r_max()));
    state.SetItemsProcessed(state.iterations() * g.n);
}
BENCHMARK(BM_shell_integral)->Arg(8192)->Arg(32768);

static void BM_interpolate(benchmark::State& state) {
    const RadialGrid g = make_grid(3, 40.0, 8192);
    std::vector<double> f(g.nodes());
    for (int j = 0; j <= g.n; ++j) f[j] = std::sin(0.3 * g.r(j));
    double r = 0.0;
    for (auto _ : state) {
        r += 0.37;
        if (r > 39.0) r = 0.1;
        benchmark::DoNotOptimize(interpolate(g, f, r));
    }
}
BENCHMARK(BM_interpolate);

static void BM_to_physical(benchmark::State& state) {
    SolverConfig cfg = bench_config(8192);
    FieldState s = from_physical(gaussian_bump(1.0, 0.0, 1.0), cfg);
    for (auto _ : state) {
        auto ps = to_physical(s, cfg.grid);
        benchmark::DoNotOptimize(ps.u.data());
    }
    state.SetItemsProcessed(state.iterations() * cfg.grid.n);
}
BENCHMARK(BM_to_physical);

BENCHMARK_MAIN();
