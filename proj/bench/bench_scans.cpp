// Serial reference kernels against their OpenMP counterparts.
// Arg 0 selects the executor: 0 = serial, 1 = parallel (OpenMP default thread count).

#include "mwlab/dynamics.hpp"
#include "mwlab/local_global.hpp"

#include <benchmark/benchmark.h>

using namespace mwlab;

namespace {

const GlobalModule& rank3() {
    static const GlobalModule b =
        GlobalModule::elliptic(load_curve_fixture(std::string(MWLAB_FIXTURE_DIR) + "/curves/rank3_5077a1.curve"));
    return b;
}

const GlobalModule& x3p1() {
    static const GlobalModule b =
        GlobalModule::elliptic(load_curve_fixture(std::string(MWLAB_FIXTURE_DIR) + "/curves/x3p1_36a1.curve"));
    return b;
}

ScanOptions options(const benchmark::State& state) {
    return state.range(0) == 0 ? ScanOptions{Exec::serial, 1} : ScanOptions{Exec::parallel, 0};
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_FixingMatrices(benchmark::State& state) {
    const GlobalModule& b = rank3();
    const TraceZeroLattice lat = build_counterexample(b, {b.generator(0), b.generator(1), b.generator(2)});
    for (auto _ : state) benchmark::DoNotOptimize(scan_fixing_matrices(b, lat, state.range(1), options(state)));
    label(state);
}
BENCHMARK(BM_FixingMatrices)->ArgsProduct({{0, 1}, {1000}})->Unit(benchmark::kMillisecond);

void BM_Divisibility(benchmark::State& state) {
    const GlobalModule& b = rank3();
    const std::vector<GlobalPoint> pts = {b.generator(0), b.generator(1)};
    for (auto _ : state)
        benchmark::DoNotOptimize(scan_divisibility(b, pts, 3, {1, 0}, state.range(1), options(state)));
    label(state);
}
BENCHMARK(BM_Divisibility)->ArgsProduct({{0, 1}, {3000}})->Unit(benchmark::kMillisecond);

void BM_TorsionInjectivity(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(scan_torsion_injectivity(x3p1(), state.range(1), options(state)));
    label(state);
}
BENCHMARK(BM_TorsionInjectivity)->ArgsProduct({{0, 1}, {10000}})->Unit(benchmark::kMillisecond);

void BM_LocalObstruction(benchmark::State& state) {
    const GlobalModule& b = rank3();
    const GlobalPoint p = b.scale(2, b.generator(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(find_local_obstruction(b, p, {b.generator(0)}, state.range(1), options(state)));
    label(state);
}
BENCHMARK(BM_LocalObstruction)->ArgsProduct({{0, 1}, {3000}})->Unit(benchmark::kMillisecond);

void BM_OrbitHarness(benchmark::State& state) {
    const GlobalModule& b = rank3();
    DynamicsExperiment x;
    x.p = b.generator(0);
    x.lambda_gens = {b.generator(1)};
    x.place_bound = static_cast<std::uint64_t>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(dynamical_lgp_experiment(b, x, options(state)));
    label(state);
}
BENCHMARK(BM_OrbitHarness)->ArgsProduct({{0, 1}, {2000}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
