//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>

#include "kinklap/fields.hpp"
#include "kinklap/geometry.hpp"
#include "kinklap/quadrature.hpp"
#include "kinklap/sampling.hpp"
#include "kinklap/sector_moments.hpp"

namespace kinklap {

/// Gaussian kernel bandwidth t and localization exponent eta in (0, 1/2):
/// the continuum evaluators integrate over B_{t^eta}(x).
struct KernelParams {
    double t;
    double eta = 0.3;
    KernelParams(double t_, double eta_ = 0.3) : t(t_), eta(eta_) {
        require(t > 0.0 && t < 1.0, "KernelParams: t must be in (0, 1)");
        require(eta > 0.0 && eta < 0.5, "KernelParams: eta must be in (0, 1/2)");
    }
};

struct ValueWithError {
    double value = 0.0;
    double error = 0.0;
};

struct ContinuumResult {
    double value = 0.0;
    double quad_error = 0.0;
    double truncation_bound = 0.0;  // zero for the localized operator
};

/// Discrete graph Laplacian
///   L_{n,t} f(x) = 1/(n t^{d/2+1}) sum_j exp(-d(x,X_j)^2/t) (f(x)-f(X_j))
/// with CLT standard error of the summands. The sample streams in blocks
/// with Kahan-compensated partial sums combined by a fixed pairwise tree,
/// so the result is bitwise independent of the worker count.
ValueWithError graph_laplacian(const SampleSet& samples, const ScalarField& f, const Vec& x,
                               double t, DistanceMode mode);

/// Truncated Gaussian operator
///   1/t^{d/2+1} int_{B_{t^eta}(x) cap Omega} exp(-|x-y|^2/t)(f(x)-f(y)) p(y) dy
/// by adaptive quadrature in rescaled coordinates z = (y-x)/sqrt(t). Exact
/// 1-D axis sections resolve the domain boundary; the reported error is the
/// quadrature estimate only. Throws QuadratureNonConvergence with the best
/// estimate when the refinement cap is hit.
ContinuumResult localized_operator(const Domain& domain, const DensityField& density,
                                   const ScalarField& f, const Vec& x, const KernelParams& params,
                                   const QuadOptions& opt = {});

/// As localized_operator, with the localization truncation bound
/// (|f(x)| * 1 + E|f(X)|) t^{-d/2-1} exp(-t^{2 eta-1}) added to the error
/// report. `f_l1` = E|f(X)|; if absent it is estimated by seeded Monte Carlo
/// (uniform densities only).
ContinuumResult gauss_operator(const Domain& domain, const DensityField& density,
                               const ScalarField& f, const Vec& x, const KernelParams& params,
                               const QuadOptions& opt = {},
                               std::optional<double> f_l1 = std::nullopt);

/// Asymptotic predictor from the inward-sector moments:
///   -(c_d/sqrt(t)) p(x) (grad f . v_C)
///   - c_{d+1} ( 1/2 p(x) <Hess f, M_C> + grad f^T M_C grad p ).
double asymptotic_predictor(const SectorMoments& moments, double p_at_x, const Vec& grad_p,
                            const Vec& grad_f, const Mat& hess_f, double t, int d);

/// Higher-order expansion: - sum_{i=1..N+1} sum_{j=0..N}
/// t^{(i+j)/2-1} c_{d+i+j-1} / (i! j!) * int_{SC} d^i f d^j p dsigma,
/// N in [2, 3]. f_forms[i-1] evaluates d^(i) f on theta^(i) (orders 1..N+1);
/// p_forms[j] evaluates d^(j) p (orders 0..N, order 0 returning p(x)).
double higher_order_predictor(const Sector& sector, std::span<const DerivativeForm> f_forms,
                              std::span<const DerivativeForm> p_forms, double t, int d, int N,
                              std::uint64_t mc_samples = 1u << 20,
                              std::uint64_t seed = 0x486F5072ull);

/// Cone-localized Euclidean operator of Prop-4.2 type at the apex:
///   1/t^{d/2+1} int_{B_{t^eta} cap C} exp(-|y|^2/t)(f(0)-f(y)) p(y) dy
/// for a sector treated as a solid cone in R^d.
ContinuumResult euclidean_cone_operator(const Sector& cone,
                                        const std::function<double(const Vec&)>& p,
                                        const ScalarField& f, double t, double eta,
                                        const QuadOptions& opt = {});

/// Seeded Monte Carlo estimate of E|f(X)| for a uniform density.
double estimate_f_l1(const Domain& domain, const ScalarField& f,
                     std::uint64_t seed = 0x4C314553ull, std::int64_t n = 1 << 16);

/// Per-(x, t) record of the three evaluators with exact sqrt(t)-scaled
/// variants. Missing evaluations stay unset; NaN marks numeric failures.
struct OperatorReport {
    double t = 0.0;
    std::optional<ValueWithError> discrete;
    std::optional<ValueWithError> continuum;  // error = quad + truncation
    std::optional<double> predictor;
    double sqrt_t_discrete = 0.0;
    double sqrt_t_continuum = 0.0;
    double sqrt_t_predictor = 0.0;
    double truncation_bound = 0.0;
    DistanceMode distance_mode = DistanceMode::intrinsic;
    double eta = 0.3;

    void set_discrete(ValueWithError v) {
        discrete = v;
        sqrt_t_discrete = std::sqrt(t) * v.value;
    }
    void set_continuum(ValueWithError v, double trunc) {
        continuum = v;
        truncation_bound = trunc;
        sqrt_t_continuum = std::sqrt(t) * v.value;
    }
    void set_predictor(double v) {
        predictor = v;
        sqrt_t_predictor = std::sqrt(t) * v;
    }
};

inline constexpr const char* kReportCsvHeader =
    "t,L_nt,L_t,sqrt_t_L_nt,sqrt_t_L_t,predictor,sqrt_t_predictor,stderr,quad_err,trunc_bound";

std::string report_csv_row(const OperatorReport& r);

}  // namespace kinklap
