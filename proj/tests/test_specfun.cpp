//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#include <doctest.h>

#include <cmath>

#include "kinklap/specfun.hpp"
#include "oracles.hpp"

using namespace kinklap;

TEST_CASE("half_gamma_constant anchors") {
    CHECK(half_gamma_constant(1).value == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(half_gamma_constant(3).value == doctest::Approx(0.5).epsilon(1e-14));
    // Gamma(3/2)/2 = sqrt(pi)/4, frozen from a high-precision evaluation.
    CHECK(half_gamma_constant(2).value == doctest::Approx(0.44311346272637897).epsilon(1e-14));
    CHECK_THROWS_AS(half_gamma_constant(0), ArgumentError);
    CHECK_THROWS_AS(half_gamma_constant(201), ArgumentError);
}

TEST_CASE("half_gamma_constant recurrence c_{l+2} = (l+1)/2 c_l") {
    for (int ell = 1; ell <= 198; ++ell) {
        double lhs = half_gamma_constant(ell + 2).value;
        double rhs = 0.5 * (ell + 1) * half_gamma_constant(ell).value;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
}

TEST_CASE("upper incomplete gamma") {
    CHECK(upper_incomplete_gamma(1.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(upper_incomplete_gamma(2.0, 1.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
    // Quadrature oracle at a non-integer order.
    CHECK(upper_incomplete_gamma(2.5, 1.0) ==
          doctest::Approx(oracles::upper_gamma_quad(2.5, 1.0)).epsilon(1e-8));
    CHECK(upper_incomplete_gamma(3.0, 0.0) == doctest::Approx(2.0).epsilon(1e-13));  // Gamma(3)
    CHECK(upper_incomplete_gamma(2.0, 1e6) == 0.0);  // saturates, no overflow
    CHECK_THROWS_AS(upper_incomplete_gamma(-1.0, 1.0), ArgumentError);
}

TEST_CASE("incomplete gamma against the quadrature oracle on a grid") {
    for (double s : {0.5, 1.5, 3.5, 7.0, 20.0}) {
        for (double x : {0.0, 0.25, 1.0, 5.0, 30.0}) {
            double got = upper_incomplete_gamma(s, x);
            double want = oracles::upper_gamma_quad(s, x);
            if (want > 1e-280) CHECK(got == doctest::Approx(want).epsilon(1e-8));
        }
    }
}

TEST_CASE("Gamma(s,x) strictly decreasing in x, Gamma(s,0) = Gamma(s)") {
    for (double s : {0.7, 2.0, 9.5}) {
        CHECK(upper_incomplete_gamma(s, 0.0) ==
              doctest::Approx(std::exp(std::lgamma(s))).epsilon(1e-12));
        double prev = upper_incomplete_gamma(s, 0.0);
        for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
            double cur = upper_incomplete_gamma(s, x);
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("gaussian radial moments") {
    // m=1, d=3, lower=0: Gamma(2)/2 = c_3.
    CHECK(gaussian_radial_moment(1, 3, 0.0) == doctest::Approx(0.5).epsilon(1e-13));
    // m=0, d=1: int_0^inf e^{-r^2} dr = sqrt(pi)/2.
    CHECK(gaussian_radial_moment(0, 1, 0.0) ==
          doctest::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-13));
    // m=2, d=3, lower=0.5: Gamma(2.5, 0.25)/2, frozen from the oracle.
    CHECK(gaussian_radial_moment(2, 3, 0.5) ==
          doctest::Approx(0.6594347818737138).epsilon(1e-10));
    CHECK(gaussian_radial_moment(2, 3, 0.5) ==
          doctest::Approx(0.5 * oracles::upper_gamma_quad(2.5, 0.25)).epsilon(1e-8));
}

TEST_CASE("moment/constant consistency across orders") {
    for (int ell = 1; ell <= 50; ++ell) {
        // gaussian_radial_moment(m, d, 0) with m+d-1 = ell
        int m = ell > 1 ? 1 : 0;
        int d = ell + 1 - m;
        CHECK(gaussian_radial_moment(m, d, 0.0) ==
              doctest::Approx(half_gamma_constant(ell).value).epsilon(1e-12));
    }
}

TEST_CASE("localization tail bound") {
    CHECK(localization_tail_bound(0.0, 1.0, 0.0, 0.05, 0.3, 3) == 0.0);
    // (1*1 + 1) * t^{-5/2} * exp(-t^{-1/2}) at t = 0.01, eta = 0.25.
    double want = 2.0 * 1e5 * std::exp(-10.0);
    CHECK(localization_tail_bound(1.0, 1.0, 1.0, 0.01, 0.25, 3) ==
          doctest::Approx(want).epsilon(1e-12));
    CHECK_THROWS_AS(localization_tail_bound(1.0, 1.0, 1.0, 0.01, 0.6, 3), ArgumentError);
    CHECK_THROWS_AS(localization_tail_bound(1.0, 1.0, 1.0, 0.01, -0.1, 3), ArgumentError);
}

TEST_CASE("tail bound vanishes along a dyadic t grid") {
    // the bound rises while the polynomial factor dominates, then the
    // stretched exponential takes over and drives it to zero
    double prev = localization_tail_bound(1.0, 1.0, 1.0, std::pow(2.0, -6), 0.25, 3);
    for (int j = 7; j <= 20; ++j) {
        double t = std::pow(2.0, -j);
        double cur = localization_tail_bound(1.0, 1.0, 1.0, t, 0.25, 3);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(prev < 1e-60);
}

TEST_CASE("truncated Gaussian tail is O(sqrt(t)) for a in (-1/2, 0)") {
    // The sector-independent radial factor: sigma(S^{d-1}) * moment(m, d, t^a)
    // bounds the tail integral and the ratio bound/sqrt(t) stays bounded.
    const int d = 3, m = 2;
    for (double a : {-0.45, -0.25, -0.1}) {
        double worst = 0.0;
        for (int j = 2; j <= 14; ++j) {
            double t = std::pow(2.0, -j);
            double bound = full_sphere_measure(d) * gaussian_radial_moment(m, d, std::pow(t, a));
            worst = std::max(worst, bound / std::sqrt(t));
        }
        CHECK(worst < 1e3);
    }
}

TEST_CASE("sphere measures") {
    CHECK(full_sphere_measure(2) == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
    CHECK(full_sphere_measure(3) == doctest::Approx(4.0 * M_PI).epsilon(1e-14));
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-14));
    CHECK(unit_ball_volume(2) == doctest::Approx(M_PI).epsilon(1e-14));
}
