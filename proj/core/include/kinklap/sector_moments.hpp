//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "kinklap/geometry.hpp"

namespace kinklap {

enum class MomentSource { closed_form, monte_carlo };

/// sigma-measure, first moment v_C and second-moment matrix M_C of a sector
/// of inward directions on S^{d-1}. These are the coefficients of the
/// graph-Laplacian asymptotic expansion: the first-order term contracts
/// grad f against v_C and the second-order term contracts Hess f (and
/// grad f grad p) against M_C.
struct SectorMoments {
    double measure = 0.0;
    Vec first_moment;
    Mat second_moment;
    // Per-entry Monte Carlo standard errors; zero for closed forms.
    double measure_stderr = 0.0;
    Vec first_moment_stderr;
    Mat second_moment_stderr;
    MomentSource source = MomentSource::closed_form;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    /// Set when Monte Carlo accepted no samples (numerically measure-zero
    /// sector, e.g. at a cusp).
    bool degenerate = false;
};

/// Exact moments for Full, HalfSpace and Orthant sectors.
/// Full: measure 2 pi^{d/2}/Gamma(d/2), v = 0, M = (measure/d) I.
/// HalfSpace{nu}: half the full measure, v = nu * pi^{(d-1)/2}/Gamma((d+1)/2)
/// (the unit (d-1)-ball volume), M = (full/(2d)) I.
/// Orthant{n_1..n_k}: measure 2^{-k} full; v = sum_i n_i * (half coefficient)
/// / 2^{k-1}; M = 2^{-k}(full/d) I plus the pairwise plane cross moments
/// m_off (n_i n_j^T + n_j n_i^T), m_off = 2^{1-k} pi^{(d-2)/2}/Gamma(d/2+1).
/// Throws ArgumentError for Predicate sectors (use monte_carlo_moments).
SectorMoments closed_form_moments(const Sector& sector, int d);

/// Seeded Monte Carlo moments: uniform directions from normalized Gaussian
/// vectors, filtered by sector membership, scaled by the full-sphere
/// measure. Deterministic for fixed (seed, samples) and independent of the
/// thread count (counter-based streams, fixed-order pairwise reduction).
SectorMoments monte_carlo_moments(const Sector& sector, int d, std::uint64_t samples,
                                  std::uint64_t seed);

/// Multilinear form of a fixed order evaluated on (theta, ..., theta).
using DerivativeForm = std::function<double(const Vec&)>;

/// Mixed sector moment int_{S C} d^i f(theta^(i)) d^j p(theta^(j)) dsigma
/// for i in 1..4, j in 0..3. Exact contraction against closed-form moment
/// tensors when i + j <= 2 (and the sector has closed forms), Monte Carlo
/// otherwise. `f_form` evaluates d^(i) f at the base point on theta^(i);
/// `p_form` evaluates d^(j) p (for j = 0 it must return p(x)).
double mixed_moment(const Sector& sector, int i, int j, const DerivativeForm& f_form,
                    const DerivativeForm& p_form, int d,
                    std::uint64_t mc_samples = 1u << 20, std::uint64_t seed = 0x4D6F6D73ull);

/// One row of CSV output for the sector-moments CLI subcommand.
std::string sector_moments_csv_header(int d);
std::string sector_moments_csv_row(const SectorMoments& m, const std::string& kind, int d);

}  // namespace kinklap
