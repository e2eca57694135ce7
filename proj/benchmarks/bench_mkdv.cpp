#include "mkdv/corpus.hpp"
#include "mkdv/fft.hpp"
#include "mkdv/norms.hpp"
#include "mkdv/probes.hpp"
#include "mkdv/soliton.hpp"
#include "mkdv/solver.hpp"
#include "mkdv/spectral.hpp"

#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

using namespace mkdv;

namespace {

constexpr double kPi = std::numbers::pi;

Field packets(const GridSpec& g, std::uint64_t seed, double lo, double hi) {
    Rng rng(seed);
    return random_wavepackets(g, rng, PacketSpec{3, lo, hi, 1.5, 2.5});
}

void BM_ForwardTransform(benchmark::State& state) {
    const GridSpec g(2.0 * kPi * 16.0, static_cast<std::size_t>(state.range(0)));
    const Field f = packets(g, 1, -4.0, 4.0);
    for (auto _ : state) benchmark::DoNotOptimize(forward_transform(f));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ForwardTransform)->RangeMultiplier(4)->Range(256, 1 << 16)->Complexity(benchmark::oNLogN);

void BM_ModulationNorm(benchmark::State& state) {
    const GridSpec g(2.0 * kPi * 16.0, static_cast<std::size_t>(state.range(0)));
    const Field f = packets(g, 2, -6.0, 6.0);
    for (auto _ : state) benchmark::DoNotOptimize(modulation_norm(f, 0.125, 4.0));
}
BENCHMARK(BM_ModulationNorm)->Arg(1024)->Arg(8192);

void BM_SolverStep(benchmark::State& state) {
    const GridSpec g(128.0, static_cast<std::size_t>(state.range(0)));
    const Field f = soliton_field(SolitonParams{2.0, 1.0}, 0.0, g);
    SolverConfig cfg;
    cfg.dt = 1e-4;
    for (auto _ : state) benchmark::DoNotOptimize(step(f, cfg.dt, cfg));
}
BENCHMARK(BM_SolverStep)->Arg(1024)->Arg(4096);

void BM_RieszBilinear(benchmark::State& state) {
    const GridSpec g(2.0 * kPi * 16.0, 1024);
    const Field f = packets(g, 3, -4.0, 4.0);
    const Field h = packets(g, 4, -2.0, 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(riesz_bilinear(0.5, f, h));
}
BENCHMARK(BM_RieszBilinear);

void BM_ResonanceFuzz(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(resonance_fuzz(100'000, 9));
    state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_ResonanceFuzz);

void BM_BilinearSpaceTime(benchmark::State& state) {
    const GridSpec g = cube_grid();
    const SpectralField A = unit_cube_project(forward_transform(packets(g, 5, 14.0, 18.0)), 16);
    const SpectralField B = unit_cube_project(forward_transform(packets(g, 6, -3.0, 1.0)), -1);
    for (auto _ : state) benchmark::DoNotOptimize(bilinear_space_time_l2(A, B, 0.05));
}
BENCHMARK(BM_BilinearSpaceTime);

} // namespace

BENCHMARK_MAIN();
