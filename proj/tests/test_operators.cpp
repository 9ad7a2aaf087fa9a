//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "kinklap/operators.hpp"
#include "kinklap/specfun.hpp"
#include "oracles.hpp"

using namespace kinklap;

namespace {

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

}  // namespace

TEST_CASE("graph laplacian basics") {
    Domain ball = Domain::ball(3, 1.0);
    SampleSet s = sample_uniform(ball, 10000, 3);
    Vec x = v3(0.2, 0, 0);

    // constant f annihilates exactly
    ScalarField c = ScalarField::custom(3, [](const Vec&) { return 4.2; });
    auto r = graph_laplacian(s, c, x, 0.05, DistanceMode::intrinsic);
    CHECK(r.value == 0.0);
    CHECK(r.error == 0.0);

    // single sample at x gives the zero summand
    SampleSet one;
    one.points.resize(1, 3);
    one.points.row(0) = x.transpose();
    one.domain_convex = true;
    ScalarField f = ScalarField::coordinate_sum(3);
    CHECK(graph_laplacian(one, f, x, 0.05, DistanceMode::intrinsic).value == 0.0);

    SampleSet empty;
    empty.points.resize(0, 3);
    CHECK_THROWS_AS(graph_laplacian(empty, f, x, 0.05, DistanceMode::intrinsic), ArgumentError);
    CHECK_THROWS_AS(graph_laplacian(s, f, x, 0.0, DistanceMode::intrinsic), ArgumentError);
    CHECK_THROWS_AS(graph_laplacian(s, f, Vec::Zero(2), 0.05, DistanceMode::intrinsic),
                    ArgumentError);

    // intrinsic mode on a non-convex sample set is refused
    SampleSet nc = s;
    nc.domain_convex = false;
    CHECK_THROWS_AS(graph_laplacian(nc, f, x, 0.05, DistanceMode::intrinsic),
                    UnsupportedOperation);
    CHECK(graph_laplacian(nc, f, x, 0.05, DistanceMode::extrinsic).value ==
          graph_laplacian(s, f, x, 0.05, DistanceMode::intrinsic).value);
}

TEST_CASE("graph laplacian concentrates on the continuum value") {
    Domain ball = Domain::ball(3, 1.0);
    ScalarField f = ScalarField::coordinate_sum(3);
    Vec center = v3(0, 0, 0);
    const double t = 0.05;
    int hits = 0;
    for (std::uint64_t seed : {101ull, 202ull, 303ull}) {
        SampleSet s = sample_uniform(ball, 1000000, seed);
        auto r = graph_laplacian(s, f, center, t, DistanceMode::intrinsic);
        if (std::abs(r.value) <= 4.0 * r.error) ++hits;
        CHECK(r.error > 0.0);
    }
    CHECK(hits >= 2);
}

TEST_CASE("graph laplacian bitwise thread independence") {
    Domain ball = Domain::ball(3, 1.0);
    ScalarField f = ScalarField::coordinate_sum(3);
    SampleSet s = sample_uniform(ball, 300000, 5);
    Vec x = v3(1, 0, 0);
    setenv("KINKLAP_THREADS", "1", 1);
    auto a = graph_laplacian(s, f, x, 0.02, DistanceMode::intrinsic);
    setenv("KINKLAP_THREADS", "8", 1);
    auto b = graph_laplacian(s, f, x, 0.02, DistanceMode::intrinsic);
    unsetenv("KINKLAP_THREADS");
    CHECK(a.value == b.value);
    CHECK(a.error == b.error);
}

TEST_CASE("continuum operator matches the ball reduction oracle") {
    Domain ball = Domain::ball(3, 1.0);
    DensityField p = DensityField::uniform(ball);
    ScalarField f = ScalarField::coordinate_sum(3);
    Vec bd = v3(1, 0, 0);
    QuadOptions opt;
    opt.rel_tol = 1e-8;
    for (double t : {0.05, 0.02, 0.01}) {
        auto r = localized_operator(ball, p, f, bd, KernelParams(t, 0.02), opt);
        double want = oracles::ball_boundary_Lt(t);
        CHECK(r.value == doctest::Approx(want).epsilon(2e-6));
    }
}

TEST_CASE("continuum operator matches the cube closed form") {
    Domain cube = Domain::box(Vec::Ones(3));
    DensityField p = DensityField::uniform(cube);
    ScalarField f = ScalarField::coordinate_sum(3);
    QuadOptions opt;
    opt.rel_tol = 1e-8;
    for (auto& pt : {v3(0.5, 0.5, 1.0), v3(0.5, 0, 0), v3(0, 0, 0)}) {
        for (double t : {0.05, 0.01}) {
            auto r = localized_operator(cube, p, f, pt, KernelParams(t, 0.02), opt);
            double want = oracles::cube_Lt(Eigen::Vector3d(pt), t);
            CHECK(r.value == doctest::Approx(want).epsilon(3e-6));
        }
    }
}

TEST_CASE("interior symmetry sends the continuum value to zero") {
    Domain ball = Domain::ball(3, 1.0);
    DensityField pb = DensityField::uniform(ball);
    ScalarField f = ScalarField::coordinate_sum(3);
    auto rb = localized_operator(ball, pb, f, v3(0, 0, 0), KernelParams(0.05, 0.05));
    CHECK(std::abs(rb.value) < 1e-8);
    Domain cube = Domain::box(Vec::Ones(3));
    DensityField pc = DensityField::uniform(cube);
    auto rc = localized_operator(cube, pc, f, v3(0.5, 0.5, 0.5), KernelParams(0.05, 0.05));
    CHECK(std::abs(rc.value) < 1e-8);
}

TEST_CASE("constant f annihilates the continuum operators") {
    Domain ball = Domain::ball(3, 1.0);
    DensityField p = DensityField::uniform(ball);
    ScalarField c = ScalarField::custom(3, [](const Vec&) { return -3.5; });
    auto r = localized_operator(ball, p, c, v3(1, 0, 0), KernelParams(0.05, 0.1));
    CHECK(r.value == 0.0);
    Sector half{3, HalfSpaceSector{v3(0, 0, 1)}};
    auto rc = euclidean_cone_operator(half, [](const Vec&) { return 1.0; }, c, 0.05, 0.1);
    CHECK(rc.value == 0.0);
}

TEST_CASE("gauss operator reports the truncation bound; localized does not") {
    Domain ball = Domain::ball(3, 1.0);
    DensityField p = DensityField::uniform(ball);
    ScalarField f = ScalarField::coordinate_sum(3);
    Vec bd = v3(1, 0, 0);
    KernelParams params(0.05, 0.3);
    auto loc = localized_operator(ball, p, f, bd, params);
    auto gauss = gauss_operator(ball, p, f, bd, params);
    CHECK(loc.truncation_bound == 0.0);
    CHECK(gauss.truncation_bound > 0.0);
    CHECK(gauss.value == loc.value);  // same truncated integral
    // localization inequality: the gap to the truncated value is within the bound.
    CHECK(std::abs(gauss.value - loc.value) <= gauss.truncation_bound);
}

TEST_CASE("small eta makes the truncated and untruncated values agree") {
    // At eta = 0.05, t = 0.05 the truncated integral agrees with the
    // untruncated oracle to ~5e-6 relative (the radius t^eta covers the
    // kernel's effective support).
    Domain ball = Domain::ball(3, 1.0);
    DensityField p = DensityField::uniform(ball);
    ScalarField f = ScalarField::coordinate_sum(3);
    QuadOptions opt;
    opt.rel_tol = 1e-8;
    auto r = localized_operator(ball, p, f, v3(1, 0, 0), KernelParams(0.05, 0.05), opt);
    double untruncated = oracles::ball_boundary_Lt(0.05);
    CHECK(std::abs(r.value - untruncated) / untruncated < 1e-5);
    // and a large eta visibly truncates
    auto r3 = localized_operator(ball, p, f, v3(1, 0, 0), KernelParams(0.05, 0.3), opt);
    CHECK(std::abs(r3.value - untruncated) / untruncated > 0.05);
}

TEST_CASE("asymptotic predictor closed-form chains") {
    ScalarField f = ScalarField::coordinate_sum(3);
    // interior, uniform density: everything vanishes
    SectorMoments full = closed_form_moments({3, FullSector{}}, 3);
    double interior = asymptotic_predictor(full, 1.0, Vec::Zero(3), f.gradient(v3(0, 0, 0)),
                                           f.hessian(v3(0, 0, 0)), 0.05, 3);
    CHECK(interior == 0.0);

    // ball boundary: sqrt(t) * predictor = 3/8 exactly
    Domain ball = Domain::ball(3, 1.0);
    SectorMoments half = closed_form_moments({3, HalfSpaceSector{v3(-1, 0, 0)}}, 3);
    double p0 = 1.0 / ball.volume();
    for (double t : {0.05, 0.01}) {
        double pred = asymptotic_predictor(half, p0, Vec::Zero(3), f.gradient(v3(1, 0, 0)),
                                           f.hessian(v3(1, 0, 0)), t, 3);
        CHECK(std::sqrt(t) * pred == doctest::Approx(3.0 / 8.0).epsilon(1e-13));
    }

    // cube vertex: sqrt(t) * predictor = -3 pi / 8
    SectorMoments orth = closed_form_moments({3, OrthantSector{Mat(Mat::Identity(3, 3))}}, 3);
    double predv = asymptotic_predictor(orth, 1.0, Vec::Zero(3), f.gradient(v3(0, 0, 0)),
                                        f.hessian(v3(0, 0, 0)), 0.01, 3);
    CHECK(std::sqrt(0.01) * predv == doctest::Approx(-3.0 * M_PI / 8.0).epsilon(1e-13));
}

TEST_CASE("predictor second-order bracket matches quadrature at an interior point") {
    // Nonlinear f and non-constant p: L_t converges to
    // -c_{d+1} (1/2 p <Hess f, M> + grad f^T M grad p) at an interior point.
    Domain cube = Domain::box(Vec::Ones(3));
    Mat A = Mat::Zero(3, 3);
    A(0, 0) = 2.0;  // f = x^2 + y
    Vec b = v3(0, 1, 0);
    ScalarField f = ScalarField::quadratic(A, b, 0.0);
    DensityField p = DensityField::custom(
        3, [](const Vec& x) { return 1.0 + 0.5 * x[0]; },
        [](const Vec&) { return Vec(0.5 * Vec::Unit(3, 0)); }, 1.25);
    Vec x = v3(0.5, 0.5, 0.5);
    SectorMoments full = closed_form_moments({3, FullSector{}}, 3);
    QuadOptions opt;
    opt.rel_tol = 1e-8;
    double t = 0.002;
    auto quad = localized_operator(cube, p, f, x, KernelParams(t, 0.05), opt);
    double pred = asymptotic_predictor(full, p.value(x), p.gradient(x), f.gradient(x),
                                       f.hessian(x), t, 3);
    // remainder is O(sqrt(t)) with an O(1) constant here
    CHECK(std::abs(quad.value - pred) < 0.35 * std::sqrt(t));
    CHECK(std::abs(pred) > 1.0);  // the bracket itself is far from zero
}

TEST_CASE("higher-order predictor") {
    Sector half{3, HalfSpaceSector{v3(0, 0, 1)}};
    ScalarField f = ScalarField::coordinate_sum(3);
    Vec gf = f.gradient(v3(0, 0, 0));

    // N = 2 specializes to the asymptotic predictor for linear f, constant p
    std::vector<DerivativeForm> f_forms = {
        [gf](const Vec& th) { return gf.dot(th); },
        [](const Vec&) { return 0.0; },
        [](const Vec&) { return 0.0; },
        [](const Vec&) { return 0.0; },
    };
    std::vector<DerivativeForm> p_forms = {
        [](const Vec&) { return 1.0; },
        [](const Vec&) { return 0.0; },
        [](const Vec&) { return 0.0; },
        [](const Vec&) { return 0.0; },
    };
    SectorMoments hm = closed_form_moments(half, 3);
    for (double t : {0.05, 0.01}) {
        double ho = higher_order_predictor(half, f_forms, p_forms, t, 3, 2);
        double asym = asymptotic_predictor(hm, 1.0, Vec::Zero(3), gf, Mat::Zero(3, 3), t, 3);
        CHECK(ho == doctest::Approx(asym).epsilon(1e-12));
    }

    // all-zero derivative orders >= 2 and j >= 1 give zero extra terms
    double ho2 = higher_order_predictor(half, f_forms, p_forms, 0.05, 3, 3);
    double ho3 = higher_order_predictor(half, f_forms, p_forms, 0.05, 3, 2);
    CHECK(ho2 == doctest::Approx(ho3).epsilon(1e-12));

    CHECK_THROWS_AS(higher_order_predictor(half, std::span<const DerivativeForm>(f_forms.data(), 1),
                                           p_forms, 0.05, 3, 2),
                    ArgumentError);
    CHECK_THROWS_AS(higher_order_predictor(half, f_forms, p_forms, 0.05, 3, 4), ArgumentError);
}

TEST_CASE("higher-order terms capture cubic structure at a face midpoint") {
    // f with a third derivative along the face normal (its sector integral
    // is nonzero): the N=3 sum lands closer to the quadrature value than
    // the two-term expansion at t = 0.05.
    Domain cube = Domain::box(Vec::Ones(3));
    auto fval = [](const Vec& y) { return y[2] * y[2] * y[2] + y[0] + y[1] + y[2]; };
    ScalarField f = ScalarField::custom(
        3, fval,
        [](const Vec& y) { return Vec(v3(1.0, 1.0, 3.0 * y[2] * y[2] + 1.0)); },
        [](const Vec& y) {
            Mat h = Mat::Zero(3, 3);
            h(2, 2) = 6.0 * y[2];
            return h;
        });
    DensityField p = DensityField::uniform(cube);
    Vec x = v3(0.5, 0.5, 1.0);  // face midpoint, inward normal -e3
    double t = 0.05;
    QuadOptions opt;
    opt.rel_tol = 1e-8;
    double quad = localized_operator(cube, p, f, x, KernelParams(t, 0.02), opt).value;

    Sector half{3, HalfSpaceSector{v3(0, 0, -1)}};
    SectorMoments hm = closed_form_moments(half, 3);
    double asym = asymptotic_predictor(hm, 1.0, Vec::Zero(3), f.gradient(x), f.hessian(x), t, 3);

    Vec gf = f.gradient(x);
    Mat hf = f.hessian(x);
    std::vector<DerivativeForm> f_forms = {
        [gf](const Vec& th) { return gf.dot(th); },
        [hf](const Vec& th) { return th.dot(hf * th); },
        [](const Vec& th) { return 6.0 * th[2] * th[2] * th[2]; },  // d3f(th,th,th)
        [](const Vec&) { return 0.0; },
    };
    std::vector<DerivativeForm> p_forms = {
        [](const Vec&) { return 1.0; },
        [](const Vec&) { return 0.0; },
        [](const Vec&) { return 0.0; },
        [](const Vec&) { return 0.0; },
    };
    double ho = higher_order_predictor(half, f_forms, p_forms, t, 3, 3, 1u << 22, 17);
    CHECK(std::abs(ho - quad) < std::abs(asym - quad));
}

TEST_CASE("euclidean cone operator leading term on a half space") {
    // C = HalfSpace{e_3}, f = x_3, p = 1: sqrt(t) L -> -c_3 pi = -pi/2.
    Sector half{3, HalfSpaceSector{v3(0, 0, 1)}};
    ScalarField f = ScalarField::linear(v3(0, 0, 1));
    auto p_one = [](const Vec&) { return 1.0; };
    QuadOptions opt;
    opt.rel_tol = 1e-8;
    std::vector<double> scaled;
    for (int j = 4; j <= 8; ++j) {
        double t = std::pow(2.0, -j);
        auto r = euclidean_cone_operator(half, p_one, f, t, 0.05, opt);
        scaled.push_back(std::sqrt(t) * r.value);
    }
    // the eta-truncation shrinks with t; the finest value is exact to 1e-6
    for (double s : scaled) CHECK(s == doctest::Approx(-M_PI / 2.0).epsilon(2e-4));
    CHECK(scaled.back() == doctest::Approx(-M_PI / 2.0).epsilon(1e-6));

    // full cone with linear f vanishes by symmetry
    Sector full{3, FullSector{}};
    auto rf = euclidean_cone_operator(full, p_one, f, 0.01, 0.05, opt);
    CHECK(std::abs(rf.value) < 1e-9);
}

TEST_CASE("euclidean cone residual is O(sqrt(t)) with a good linear fit") {
    // Cubic f on the half space (nonzero third moment along the axis): the
    // residual against the two-term expansion scales like K sqrt(t); fit K
    // on a dyadic grid and check R^2.
    Sector half{3, HalfSpaceSector{v3(0, 0, 1)}};
    ScalarField f = ScalarField::custom(
        3, [](const Vec& y) { return y[2] * y[2] * y[2] + y[2]; },
        [](const Vec& y) { return Vec(v3(0.0, 0.0, 3.0 * y[2] * y[2] + 1.0)); },
        [](const Vec& y) {
            Mat h = Mat::Zero(3, 3);
            h(2, 2) = 6.0 * y[2];
            return h;
        });
    auto p_one = [](const Vec&) { return 1.0; };
    SectorMoments hm = closed_form_moments(half, 3);
    QuadOptions opt;
    opt.rel_tol = 1e-9;
    Vec origin = Vec::Zero(3);
    std::vector<double> ts, residuals;
    for (int j = 4; j <= 10; ++j) {
        double t = std::pow(2.0, -j);
        auto r = euclidean_cone_operator(half, p_one, f, t, 0.02, opt);
        double pred = asymptotic_predictor(hm, 1.0, Vec::Zero(3), f.gradient(origin),
                                           f.hessian(origin), t, 3);
        ts.push_back(std::sqrt(t));
        residuals.push_back(r.value - pred);
    }
    // least squares residual = K sqrt(t) (through the origin), report R^2
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxx += ts[i] * ts[i];
        sxy += ts[i] * residuals[i];
    }
    double k = sxy / sxx;
    double ss_res = 0, ss_tot = 0, mean = 0;
    for (double r : residuals) mean += r;
    mean /= residuals.size();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        ss_res += std::pow(residuals[i] - k * ts[i], 2);
        ss_tot += std::pow(residuals[i] - mean, 2);
    }
    CHECK(1.0 - ss_res / ss_tot > 0.9);
    CHECK(std::abs(k) > 1e-3);  // the sqrt(t) term is genuinely present
}

TEST_CASE("report rows: scaling exactness and header") {
    OperatorReport r;
    r.t = 0.0217;
    r.set_discrete({1.25, 0.01});
    r.set_continuum({1.3, 1e-6}, 1e-9);
    r.set_predictor(1.35);
    CHECK(r.sqrt_t_discrete == std::sqrt(r.t) * r.discrete->value);
    CHECK(r.sqrt_t_continuum == std::sqrt(r.t) * r.continuum->value);
    CHECK(r.sqrt_t_predictor == std::sqrt(r.t) * *r.predictor);
    CHECK(std::string(kReportCsvHeader) ==
          "t,L_nt,L_t,sqrt_t_L_nt,sqrt_t_L_t,predictor,sqrt_t_predictor,stderr,quad_err,"
          "trunc_bound");
    std::string row = report_csv_row(r);
    CHECK(std::count(row.begin(), row.end(), ',') == 9);
}

TEST_CASE("quadrature non-convergence carries the best estimate") {
    Domain ball = Domain::ball(3, 1.0);
    DensityField p = DensityField::uniform(ball);
    ScalarField f = ScalarField::coordinate_sum(3);
    QuadOptions opt;
    opt.rel_tol = 1e-14;
    opt.abs_tol = 0.0;
    opt.max_cells = 4;
    try {
        localized_operator(ball, p, f, v3(1, 0, 0), KernelParams(0.05, 0.05), opt);
        FAIL("expected QuadratureNonConvergence");
    } catch (const QuadratureNonConvergence& e) {
        CHECK(e.best_value == doctest::Approx(oracles::ball_boundary_Lt(0.05)).epsilon(1e-2));
        CHECK(e.best_error > 0.0);
    }
}
