//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#pragma once

#include "kinklap/common.hpp"

namespace kinklap {

/// The constant c_ell = Gamma((ell+1)/2) / 2 that scales the ell-th Gaussian
/// radial moment: integral_0^inf exp(-r^2) r^ell dr.
struct HalfGammaConstant {
    int ell;
    double value;
};

/// c_ell for 1 <= ell <= 200, evaluated through log-Gamma (1e-14 relative).
HalfGammaConstant half_gamma_constant(int ell);

/// Unnormalized upper incomplete gamma Gamma(s, x) = int_x^inf e^{-tau} tau^{s-1} dtau
/// for s in (0, 200], x >= 0. Series for x < s+1, continued fraction otherwise.
double upper_incomplete_gamma(double s, double x);

/// Surface measure of the unit sphere S^{d-1}: 2 pi^{d/2} / Gamma(d/2).
double full_sphere_measure(int d);

/// Volume of the unit ball in R^d: pi^{d/2} / Gamma(d/2 + 1).
double unit_ball_volume(int d);

/// Truncation bound for the Gaussian operator restricted to B_{t^eta}(x):
/// (|f(x)| * total_mass + ||f||_1) * t^{-d/2-1} * exp(-t^{2 eta - 1}).
/// Evaluated in the log domain so dimensions up to ~200 do not overflow.
double localization_tail_bound(double f_at_x, double total_mass, double f_l1_norm,
                               double t, double eta, int d);

/// int_lower^inf exp(-r^2) r^{m+d-1} dr = Gamma((m+d)/2, lower^2) / 2.
/// With lower = 0 this is the expansion constant c_{m+d-1}.
double gaussian_radial_moment(int m, int d, double lower);

}  // namespace kinklap
