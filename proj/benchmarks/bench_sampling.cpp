//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#include <benchmark/benchmark.h>

#include "kinklap/sampling.hpp"
#include "kinklap/sector_moments.hpp"

using namespace kinklap;

static void BM_SampleBall(benchmark::State& state) {
    Domain ball = Domain::ball(3, 1.0);
    const std::int64_t n = state.range(0);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        SampleSet s = sample_uniform(ball, n, seed++);
        benchmark::DoNotOptimize(s.points.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleBall)->Arg(100000)->Arg(1000000);

static void BM_SampleCuspRejection(benchmark::State& state) {
    Domain cusp = Domain::cusp_epigraph(3, 0.5);
    const std::int64_t n = state.range(0);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        SampleSet s = sample_uniform(cusp, n, seed++);
        benchmark::DoNotOptimize(s.points.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleCuspRejection)->Arg(100000);

static void BM_MonteCarloMoments(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    Vec nu = Vec::Zero(d);
    nu[d - 1] = 1.0;
    Sector half{d, HalfSpaceSector{nu}};
    std::uint64_t seed = 1;
    for (auto _ : state) {
        SectorMoments m = monte_carlo_moments(half, d, 1u << 20, seed++);
        benchmark::DoNotOptimize(m.measure);
    }
    state.SetItemsProcessed(state.iterations() * (1u << 20));
}
BENCHMARK(BM_MonteCarloMoments)->Arg(3)->Arg(8);
