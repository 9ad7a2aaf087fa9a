//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "kinklap/sampling.hpp"

using namespace kinklap;

TEST_CASE("box sample moments") {
    Domain cube = Domain::box(Vec::Ones(3));
    const std::int64_t n = 100000;
    SampleSet s = sample_uniform(cube, n, 42);
    REQUIRE(s.n() == n);
    for (int axis = 0; axis < 3; ++axis) {
        double mean = s.points.col(axis).mean();
        double se = (1.0 / std::sqrt(12.0)) / std::sqrt(static_cast<double>(n));
        CHECK(std::abs(mean - 0.5) <= 3.0 * se);
    }
    for (std::int64_t i = 0; i < n; ++i)
        REQUIRE(contains(cube, s.points.row(i).transpose()));
}

TEST_CASE("ball sample radial moment E||X|| = d/(d+1)") {
    Domain ball = Domain::ball(3, 1.0);
    const std::int64_t n = 100000;
    SampleSet s = sample_uniform(ball, n, 7);
    double acc = 0.0, acc2 = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        double r = s.points.row(i).norm();
        acc += r;
        acc2 += r * r;
        REQUIRE(r <= 1.0 + 1e-12);
    }
    double mean = acc / n;
    double sd = std::sqrt(std::max(0.0, acc2 / n - mean * mean));
    CHECK(std::abs(mean - 0.75) <= 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("empty sample set") {
    Domain cube = Domain::box(Vec::Ones(2));
    SampleSet s = sample_uniform(cube, 0, 1);
    CHECK(s.n() == 0);
    CHECK(s.dim() == 2);
}

TEST_CASE("determinism across runs and thread counts") {
    Domain ball = Domain::ball(3, 1.0);
    setenv("KINKLAP_THREADS", "1", 1);
    SampleSet a = sample_uniform(ball, 50000, 2024);
    setenv("KINKLAP_THREADS", "8", 1);
    SampleSet b = sample_uniform(ball, 50000, 2024);
    unsetenv("KINKLAP_THREADS");
    REQUIRE(a.n() == b.n());
    CHECK(std::memcmp(a.points.data(), b.points.data(),
                      sizeof(double) * static_cast<std::size_t>(a.n()) * 3) == 0);
    SampleSet c = sample_uniform(ball, 50000, 2024);
    CHECK(std::memcmp(a.points.data(), c.points.data(),
                      sizeof(double) * static_cast<std::size_t>(a.n()) * 3) == 0);
    // different seed differs
    SampleSet d = sample_uniform(ball, 50000, 2025);
    CHECK(std::memcmp(a.points.data(), d.points.data(),
                      sizeof(double) * static_cast<std::size_t>(a.n()) * 3) != 0);
}

TEST_CASE("chi-square uniformity on an 8^3 histogram") {
    Domain cube = Domain::box(Vec::Ones(3));
    const std::int64_t n = 1000000;
    SampleSet s = sample_uniform(cube, n, 42);
    std::vector<int> bins(512, 0);
    for (std::int64_t i = 0; i < n; ++i) {
        int bx = std::min(7, static_cast<int>(s.points(i, 0) * 8.0));
        int by = std::min(7, static_cast<int>(s.points(i, 1) * 8.0));
        int bz = std::min(7, static_cast<int>(s.points(i, 2) * 8.0));
        ++bins[bx * 64 + by * 8 + bz];
    }
    double expected = static_cast<double>(n) / 512.0;
    double chi2 = 0.0;
    for (int c : bins) chi2 += (c - expected) * (c - expected) / expected;
    // chi2 critical value at the 1% level for 511 dof
    CHECK(chi2 < 588.2977941452372);
}

TEST_CASE("rejection sampling from a linear density on the box") {
    Domain cube = Domain::box(Vec::Ones(3));
    // p(x) = (1 + x1) / (3/2), envelope sup p = 4/3
    DensityField p = DensityField::custom(
        3, [](const Vec& x) { return 1.0 + x[0]; },
        [](const Vec&) { return Vec(Vec::Unit(3, 0)); }, 1.5);
    const std::int64_t n = 100000;
    SampleSet s = rejection_sample(cube, p, n, 99, 4.0 / 3.0);
    double mean = s.points.col(0).mean();
    // E[x1] = (5/6)/(3/2) = 5/9; Var <= 1/12-ish
    double se = 0.30 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - 5.0 / 9.0) <= 3.0 * se);

    // single reproducible point
    SampleSet one_a = rejection_sample(cube, p, 1, 5, 4.0 / 3.0);
    SampleSet one_b = rejection_sample(cube, p, 1, 5, 4.0 / 3.0);
    CHECK((one_a.points - one_b.points).norm() == 0.0);
}

TEST_CASE("density invariants: nonnegative and mass one") {
    Domain cube = Domain::box(Vec::Ones(3));
    DensityField p = DensityField::custom(
        3, [](const Vec& x) { return 1.0 + x[0]; }, nullptr, 1.5);
    SampleSet probes = sample_uniform(cube, 100000, 314);
    double acc = 0.0, acc2 = 0.0;
    for (std::int64_t i = 0; i < probes.n(); ++i) {
        double v = p.value(probes.points.row(i).transpose());
        REQUIRE(v >= 0.0);
        acc += v;
        acc2 += v * v;
    }
    double mean = acc / probes.n();  // MC estimate of integral over volume-1 box
    double sd = std::sqrt(std::max(0.0, acc2 / probes.n() - mean * mean));
    CHECK(std::abs(mean - 1.0) <= 3.0 * sd / std::sqrt(static_cast<double>(probes.n())));
}

TEST_CASE("rejection distribution matches uniform when p is flat") {
    Domain cube = Domain::box(Vec::Ones(2));
    DensityField flat = DensityField::custom(2, [](const Vec&) { return 1.0; }, nullptr, 1.0);
    const std::int64_t n = 50000;
    SampleSet s = rejection_sample(cube, flat, n, 123, 1.0);
    // one-sample KS against the uniform CDF per axis, 1% level
    for (int axis = 0; axis < 2; ++axis) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = s.points(i, axis);
        std::sort(v.begin(), v.end());
        double ks = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            double f = v[static_cast<std::size_t>(i)];
            ks = std::max(ks, std::abs((i + 1.0) / n - f));
            ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
        }
        CHECK(ks < 1.62762 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("envelope violation raises") {
    Domain cube = Domain::box(Vec::Ones(3));
    DensityField p = DensityField::custom(
        3, [](const Vec& x) { return 1.0 + x[0]; }, nullptr, 1.5);
    CHECK_THROWS_AS(rejection_sample(cube, p, 10, 1, 0.9), ArgumentError);
}

TEST_CASE("hopeless rejection acceptance rate raises") {
    // A thin epigraph region inside a huge bounding box.
    Domain sliver = Domain::epigraph(
        2, [](const Vec&) { return 99.9999; }, 0.0, Vec(Vec::Constant(2, -100.0)),
        Vec(Vec::Constant(2, 100.0)), 0.02);
    CHECK_THROWS_AS(sample_uniform(sliver, 10, 1), ArgumentError);
}

TEST_CASE("cusp and cone domains sample by rejection") {
    Domain cusp = Domain::cusp_epigraph(3, 0.5);
    SampleSet s = sample_uniform(cusp, 5000, 11);
    for (std::int64_t i = 0; i < s.n(); ++i)
        REQUIRE(contains(cusp, s.points.row(i).transpose()));
    Domain cone = Domain::cone(3, M_PI / 4.0, Vec(Vec::Unit(3, 2)));
    SampleSet sc = sample_uniform(cone, 5000, 12);
    for (std::int64_t i = 0; i < sc.n(); ++i)
        REQUIRE(contains(cone, sc.points.row(i).transpose()));
}

TEST_CASE("csv and binary round trips") {
    Domain ball = Domain::ball(3, 1.0);
    SampleSet s = sample_uniform(ball, 257, 5);
    auto tmp = std::filesystem::temp_directory_path();
    std::string csv = (tmp / "kinklap_rt.csv").string();
    std::string bin = (tmp / "kinklap_rt.klss").string();

    save_csv(s, csv);
    SampleSet back = load_csv(csv);
    REQUIRE(back.n() == s.n());
    CHECK((back.points - s.points).cwiseAbs().maxCoeff() == 0.0);  // %.17g round-trips doubles

    save_binary(s, bin);
    SampleSet bb = load_binary(bin);
    REQUIRE(bb.n() == s.n());
    CHECK(std::memcmp(bb.points.data(), s.points.data(),
                      sizeof(double) * static_cast<std::size_t>(s.n()) * 3) == 0);

    // binary header layout: magic + version + n + d
    std::ifstream in(bin, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "KLSS");
    std::remove(csv.c_str());
    std::remove(bin.c_str());
}

TEST_CASE("scalar fields: values, derivatives, fd self-consistency gate") {
    Vec a(3);
    a << 1, 2, 3;
    ScalarField lin = ScalarField::linear(a);
    Vec x(3);
    x << 0.2, -0.1, 0.4;
    CHECK(lin.value(x) == doctest::Approx(a.dot(x)).epsilon(1e-15));
    CHECK((lin.gradient(x) - a).norm() == 0.0);
    CHECK(lin.hessian(x).norm() == 0.0);

    Mat A = Mat::Identity(3, 3) * 2.0;
    ScalarField quad = ScalarField::quadratic(A, a, 1.0);
    CHECK(quad.value(x) == doctest::Approx(x.squaredNorm() + a.dot(x) + 1.0).epsilon(1e-14));
    CHECK((quad.hessian(x) - A).norm() == 0.0);

    ScalarField cs = ScalarField::coordinate_sum(3);
    CHECK(cs.value(x) == doctest::Approx(x.sum()).epsilon(1e-14));

    // custom without analytic derivatives: finite differences pass the gate
    ScalarField smooth = ScalarField::custom(
        3, [](const Vec& y) { return std::sin(y[0]) * std::exp(y[1]) + y[2] * y[2]; });
    CHECK(smooth.validate_derivatives(x));
    Vec g = smooth.gradient(x);
    CHECK(g[0] == doctest::Approx(std::cos(x[0]) * std::exp(x[1])).epsilon(1e-6));
    Mat h = smooth.hessian(x);
    CHECK(h(2, 2) == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(h(0, 1) == doctest::Approx(std::cos(x[0]) * std::exp(x[1])).epsilon(1e-4));

    // a kinked evaluator fails the self-consistency gate at its kink
    ScalarField kinked = ScalarField::custom(3, [](const Vec& y) { return std::abs(y[0]); });
    CHECK_FALSE(kinked.validate_derivatives(Vec::Zero(3)));

    CHECK_THROWS_AS(ScalarField::quadratic(Mat::Ones(2, 3), a, 0.0), ArgumentError);
}

TEST_CASE("density fields: uniform and custom gradients") {
    Domain ball = Domain::ball(3, 1.0);
    DensityField u = DensityField::uniform(ball);
    Vec x = Vec::Zero(3);
    CHECK(u.value(x) == doctest::Approx(3.0 / (4.0 * M_PI)).epsilon(1e-14));
    CHECK(u.gradient(x).norm() == 0.0);
    CHECK(u.is_uniform());

    DensityField p = DensityField::custom(
        3, [](const Vec& y) { return 1.0 + 0.5 * y[0]; }, nullptr, 1.25);
    Vec probe(3);
    probe << 0.3, 0.1, 0.9;
    CHECK(p.value(probe) == doctest::Approx((1.0 + 0.15) / 1.25).epsilon(1e-14));
    CHECK(p.gradient(probe)[0] == doctest::Approx(0.5 / 1.25).epsilon(1e-7));
    CHECK_FALSE(p.is_uniform());
    CHECK_THROWS_AS(p.uniform_value(), ArgumentError);
}
