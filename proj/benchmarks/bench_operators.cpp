//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#include <benchmark/benchmark.h>

#include "kinklap/operators.hpp"

using namespace kinklap;

namespace {

Vec bd3() {
    Vec v(3);
    v << 1, 0, 0;
    return v;
}

}  // namespace

static void BM_GraphLaplacian(benchmark::State& state) {
    Domain ball = Domain::ball(3, 1.0);
    ScalarField f = ScalarField::coordinate_sum(3);
    SampleSet s = sample_uniform(ball, state.range(0), 7);
    Vec x = bd3();
    for (auto _ : state) {
        auto r = graph_laplacian(s, f, x, 0.01, DistanceMode::intrinsic);
        benchmark::DoNotOptimize(r.value);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GraphLaplacian)->Arg(100000)->Arg(1000000)->Arg(10000000)
    ->Unit(benchmark::kMillisecond);

static void BM_GaussOperatorBall(benchmark::State& state) {
    Domain ball = Domain::ball(3, 1.0);
    DensityField p = DensityField::uniform(ball);
    ScalarField f = ScalarField::coordinate_sum(3);
    Vec x = bd3();
    const double t = state.range(0) / 1000.0;
    QuadOptions opt;
    opt.rel_tol = 1e-7;
    for (auto _ : state) {
        auto r = localized_operator(ball, p, f, x, KernelParams(t, 0.05), opt);
        benchmark::DoNotOptimize(r.value);
    }
}
BENCHMARK(BM_GaussOperatorBall)->Arg(50)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_PredictorChain(benchmark::State& state) {
    Domain cube = Domain::box(Vec::Ones(3));
    ScalarField f = ScalarField::coordinate_sum(3);
    Vec x = Vec::Zero(3);
    for (auto _ : state) {
        Sector sec = sector_at(cube, classify(cube, x, 1e-3));
        SectorMoments m = closed_form_moments(sec, 3);
        double pred = asymptotic_predictor(m, 1.0, Vec::Zero(3), f.gradient(x), f.hessian(x),
                                           0.01, 3);
        benchmark::DoNotOptimize(pred);
    }
}
BENCHMARK(BM_PredictorChain);
