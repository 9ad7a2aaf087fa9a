//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#pragma once

#include <cstddef>
#include <functional>

#include "kinklap/common.hpp"

namespace kinklap {

struct QuadOptions {
    double rel_tol = 1e-7;
    double abs_tol = 1e-12;
    std::size_t max_cells = 200000;
    int outer_order = 7;      // tensor Gauss-Legendre order (estimate)
    int outer_order_low = 5;  // embedded lower order (error reference)
    double inner_piece = 2.0; // composite piece length for the axis integral
    int inner_order = 16;
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Sections of the integration region along the chosen axis: the vector z
/// carries the current outer coordinates (entry `axis` is ignored).
using SectionFn = std::function<SectionSet(const Vec& z)>;
using IntegrandFn = std::function<double(const Vec& z)>;
using IndicatorFn = std::function<bool(const Vec& z)>;

/// Integral of g over { z : z_outer in [outer_lo, outer_hi], z[axis] in
/// section(z) }. The outer box excludes the axis coordinate (size dim-1, in
/// increasing coordinate order). Outer cells refine adaptively in waves, so
/// mirror-symmetric layouts stay symmetric; the inner 1-D integral uses
/// composite Gauss-Legendre on the exact section intervals.
QuadResult integrate_sectioned(int dim, int axis, const Vec& outer_lo, const Vec& outer_hi,
                               const SectionFn& section, const IntegrandFn& g,
                               const QuadOptions& opt = {});

/// Fallback for regions without exact sections: tensor quadrature over
/// [lo, hi] with the indicator applied per node, refining cells that
/// straddle the boundary.
QuadResult integrate_indicator(int dim, const Vec& lo, const Vec& hi, const IndicatorFn& inside,
                               const IntegrandFn& g, const QuadOptions& opt = {});

/// Gauss-Legendre nodes and weights on [-1, 1] (cached per order).
void gauss_legendre(int order, const double** nodes, const double** weights);

}  // namespace kinklap
