#include <benchmark/benchmark.h>

#include "fkpp/dynamics.hpp"
#include "fkpp/landscape.hpp"
#include "fkpp/spectral.hpp"

namespace {

using namespace fkpp;

Landscape checkerboard() {
    return make_preset({PresetKind::Checkerboard, {{"r0", 1.0}, {"q", 1.0}}, 1, 1});
}

Grid cell_grid(int n) {
    return build_grid({{1.0, n, Boundary::Periodic, 0.0}}, {{2.0, n + 1, Boundary::Neumann, -1.0}});
}

void BM_Assemble(benchmark::State& state) {
    const Grid g = cell_grid(static_cast<int>(state.range(0)));
    const auto r = sample_on_grid(checkerboard(), g);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_operator(g, r, 1.0));
    state.counters["nodes"] = static_cast<double>(g.total_nodes());
}
BENCHMARK(BM_Assemble)->RangeMultiplier(2)->Range(16, 128);

void BM_PrincipalEigenpair(benchmark::State& state) {
    const Landscape land = checkerboard();
    const Grid g = cell_grid(static_cast<int>(state.range(0)));
    const auto op = assemble_operator(g, sample_on_grid(land, g), 1.0);
    long iterations = 0;
    for (auto _ : state) {
        const auto e = principal_eigenpair(op, land.sup_r());
        iterations = e.iterations;
        benchmark::DoNotOptimize(e.lambda);
    }
    state.counters["nodes"] = static_cast<double>(g.total_nodes());
    state.counters["outer_iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_PrincipalEigenpair)->RangeMultiplier(2)->Range(16, 64)->Unit(benchmark::kMillisecond);

void BM_SplittingStep(benchmark::State& state) {
    const Grid g = cell_grid(static_cast<int>(state.range(0)));
    const auto r = sample_on_grid(checkerboard(), g);
    const auto op = assemble_operator(g, r, 1.0);
    const auto scheme = state.range(1) == 0 ? DiffusionScheme::Exponential : DiffusionScheme::BackwardEuler;
    const SplittingIntegrator integ(op, r, {scheme, 1e-13});
    SimState s = make_state(g, make_initial({InitialKind::GaussianBump, {}, {}}, g));
    s = integ.step(s, 0.01);  // builds the cached propagator
    for (auto _ : state) s = integ.step(s, 0.01);
    state.counters["nodes"] = static_cast<double>(g.total_nodes());
}
BENCHMARK(BM_SplittingStep)->ArgsProduct({{16, 32, 64}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_TruncationSequence(benchmark::State& state) {
    const Landscape land = checkerboard();
    TruncationPolicy pol;
    pol.spacing = 1.0 / 8;
    pol.pheno_box = {{4.0, 33, Boundary::Neumann, -2.0}};
    const std::vector<double> radii{1.0, 1.5, 2.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(eigen_truncation_sequence(land, ProblemKind::Mixed, radii, pol));
}
BENCHMARK(BM_TruncationSequence)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
