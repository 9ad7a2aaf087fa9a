//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#include "kinklap/operators.hpp"

#include <cmath>
#include <cstdio>

#include "kinklap/rng.hpp"
#include "kinklap/specfun.hpp"
#include "kinklap/summation.hpp"

namespace kinklap {

namespace {

double kernel_norm(double t, int d) { return std::pow(t, 0.5 * d + 1.0); }

}  // namespace

ValueWithError graph_laplacian(const SampleSet& samples, const ScalarField& f, const Vec& x,
                               double t, DistanceMode mode) {
    const std::int64_t n = samples.n();
    require(n >= 1, "graph_laplacian: sample set is empty");
    require(t > 0.0, "graph_laplacian: t must be positive");
    const int d = samples.dim();
    require(static_cast<int>(x.size()) == d, "graph_laplacian: dimension mismatch");
    require(f.dim() == d, "graph_laplacian: field dimension mismatch");
    if (mode == DistanceMode::intrinsic && !samples.domain_convex)
        throw UnsupportedOperation(
            "graph_laplacian: intrinsic distance unsupported on a non-convex domain; "
            "use extrinsic mode");

    const double fx = f.value(x);
    const double* base = samples.points.data();
    auto sums = blocked_sums<2>(static_cast<std::size_t>(n), [&](std::size_t i, auto& vals) {
        const double* row = base + i * static_cast<std::size_t>(d);
        double d2 = 0.0;
        for (int k = 0; k < d; ++k) {
            double diff = x[k] - row[k];
            d2 += diff * diff;
        }
        Eigen::Map<const Vec> xi(row, d);
        double s = std::exp(-d2 / t) * (fx - f.value(xi));
        vals[0] = s;
        vals[1] = s * s;
    });

    const double norm = kernel_norm(t, d);
    const double nn = static_cast<double>(n);
    double mean = sums[0] / nn;
    double var = n > 1 ? std::max(0.0, (sums[1] - nn * mean * mean) / (nn - 1.0)) : 0.0;
    return {mean / norm, std::sqrt(var / nn) / norm};
}

namespace {

/// Shared quadrature core: integrate exp(-|z|^2) (f(x) - f(x+s z)) p(x+s z)
/// over { |z| <= R } cap (Omega - x)/s, in z coordinates, s = sqrt(t).
QuadResult rescaled_domain_integral(const Domain& domain, const DensityField& density,
                                    const ScalarField& f, const Vec& x, double s, double radius,
                                    const QuadOptions& opt) {
    const int d = domain.dim();
    const double fx = f.value(x);

    auto g = [&](const Vec& z) {
        Vec y = x + s * z;
        return std::exp(-z.squaredNorm()) * (fx - f.value(y)) * density.value(y);
    };

    int axis = preferred_section_axis(domain, x);
    if (axis >= 0 && supports_sections(domain, axis)) {
        Vec blo, bhi;
        bounding_box(domain, blo, bhi);
        const int m = d - 1;
        Vec outer_lo(m), outer_hi(m);
        for (int i = 0, k = 0; i < d; ++i) {
            if (i == axis) continue;
            outer_lo[k] = std::max(-radius, (blo[i] - x[i]) / s);
            outer_hi[k] = std::min(radius, (bhi[i] - x[i]) / s);
            ++k;
        }
        for (int k = 0; k < m; ++k)
            if (outer_lo[k] > outer_hi[k]) return {};  // ball does not meet the domain

        auto section = [&, axis](const Vec& z) -> SectionSet {
            double off = 0.0;
            for (int i = 0; i < d; ++i)
                if (i != axis) off += z[i] * z[i];
            double h2 = radius * radius - off;
            SectionSet out;
            if (h2 < 0.0) return out;
            double h = std::sqrt(h2);
            Vec y = x + s * z;  // axis entry overwritten by the section query
            SectionSet world = axis_section(domain, axis, y);
            for (int i = 0; i < world.count; ++i) {
                Interval ziv{(world.iv[i].lo - x[axis]) / s, (world.iv[i].hi - x[axis]) / s};
                out.push(intersect(ziv, {-h, h}));
            }
            return out;
        };
        return integrate_sectioned(d, axis, outer_lo, outer_hi, section, g, opt);
    }

    // Indicator fallback for shapes without exact sections.
    Vec blo, bhi;
    bounding_box(domain, blo, bhi);
    Vec lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
        lo[i] = std::max(-radius, (blo[i] - x[i]) / s);
        hi[i] = std::min(radius, (bhi[i] - x[i]) / s);
        if (lo[i] > hi[i]) return {};
    }
    auto inside = [&](const Vec& z) {
        if (z.squaredNorm() > radius * radius) return false;
        return contains(domain, Vec(x + s * z));
    };
    return integrate_indicator(d, lo, hi, inside, g, opt);
}

ContinuumResult finish_continuum(const QuadResult& quad, double t, int d, const char* who) {
    const double scale = std::pow(t, 0.5 * d) / kernel_norm(t, d);  // = 1/t
    ContinuumResult res;
    res.value = quad.value * scale;
    res.quad_error = quad.abs_error * scale;
    if (!quad.converged) {
        throw QuadratureNonConvergence(std::string(who) +
                                           ": quadrature did not converge at the refinement cap",
                                       res.value, res.quad_error);
    }
    return res;
}

}  // namespace

ContinuumResult localized_operator(const Domain& domain, const DensityField& density,
                                   const ScalarField& f, const Vec& x, const KernelParams& params,
                                   const QuadOptions& opt) {
    require(static_cast<int>(x.size()) == domain.dim(), "localized_operator: dimension mismatch");
    require(contains(domain, x), "localized_operator: x lies outside the domain");
    const double s = std::sqrt(params.t);
    const double radius = std::pow(params.t, params.eta - 0.5);  // t^eta in y = s * that in z
    QuadResult quad = rescaled_domain_integral(domain, density, f, x, s, radius, opt);
    return finish_continuum(quad, params.t, domain.dim(), "localized_operator");
}

double estimate_f_l1(const Domain& domain, const ScalarField& f, std::uint64_t seed,
                     std::int64_t n) {
    SampleSet s = sample_uniform(domain, n, seed);
    auto sums = blocked_sums<1>(static_cast<std::size_t>(n), [&](std::size_t i, auto& vals) {
        vals[0] = std::abs(f.value(s.points.row(static_cast<std::int64_t>(i)).transpose()));
    });
    return sums[0] / static_cast<double>(n);
}

ContinuumResult gauss_operator(const Domain& domain, const DensityField& density,
                               const ScalarField& f, const Vec& x, const KernelParams& params,
                               const QuadOptions& opt, std::optional<double> f_l1) {
    ContinuumResult res = localized_operator(domain, density, f, x, params, opt);
    double l1;
    if (f_l1.has_value()) {
        l1 = *f_l1;
    } else {
        require(density.is_uniform(),
                "gauss_operator: pass f_l1 explicitly for non-uniform densities");
        l1 = estimate_f_l1(domain, f);
    }
    res.truncation_bound =
        localization_tail_bound(f.value(x), 1.0, l1, params.t, params.eta, domain.dim());
    return res;
}

double asymptotic_predictor(const SectorMoments& moments, double p_at_x, const Vec& grad_p,
                            const Vec& grad_f, const Mat& hess_f, double t, int d) {
    require(t > 0.0, "asymptotic_predictor: t must be positive");
    const double cd = half_gamma_constant(d).value;
    const double cd1 = half_gamma_constant(d + 1).value;
    double first = p_at_x * grad_f.dot(moments.first_moment);
    double second = 0.5 * p_at_x * (hess_f * moments.second_moment).trace() +
                    grad_f.dot(moments.second_moment * grad_p);
    return -(cd / std::sqrt(t)) * first - cd1 * second;
}

double higher_order_predictor(const Sector& sector, std::span<const DerivativeForm> f_forms,
                              std::span<const DerivativeForm> p_forms, double t, int d, int N,
                              std::uint64_t mc_samples, std::uint64_t seed) {
    require(N >= 2 && N <= 3, "higher_order_predictor: N must be 2 or 3");
    require(static_cast<int>(f_forms.size()) >= N + 1,
            "higher_order_predictor: need f derivative forms up to order N+1");
    require(static_cast<int>(p_forms.size()) >= N + 1,
            "higher_order_predictor: need p derivative forms up to order N");
    double fact_i = 1.0;
    KahanSum acc;
    for (int i = 1; i <= N + 1; ++i) {
        fact_i *= i;
        double fact_j = 1.0;
        for (int j = 0; j <= N; ++j) {
            if (j > 0) fact_j *= j;
            double c = half_gamma_constant(d + i + j - 1).value;
            double mom = mixed_moment(sector, i, j, f_forms[i - 1], p_forms[j], d, mc_samples,
                                      derive_seed(seed, i, j));
            acc.add(-std::pow(t, 0.5 * (i + j) - 1.0) * c / (fact_i * fact_j) * mom);
        }
    }
    return acc.value();
}

ContinuumResult euclidean_cone_operator(const Sector& cone,
                                        const std::function<double(const Vec&)>& p,
                                        const ScalarField& f, double t, double eta,
                                        const QuadOptions& opt) {
    const int d = cone.dim;
    require(t > 0.0 && t < 1.0, "euclidean_cone_operator: t must be in (0, 1)");
    require(eta > 0.0 && eta < 0.5, "euclidean_cone_operator: eta must be in (0, 1/2)");
    const double s = std::sqrt(t);
    const double radius = std::pow(t, eta - 0.5);
    const Vec origin = Vec::Zero(d);
    const double f0 = f.value(origin);

    auto g = [&](const Vec& z) {
        Vec y = s * z;
        return std::exp(-z.squaredNorm()) * (f0 - f.value(y)) * p(y);
    };

    QuadResult quad;
    if (std::holds_alternative<FullSector>(cone.kind)) {
        const int axis = d - 1;
        Vec outer_lo = Vec::Constant(d - 1, -radius);
        Vec outer_hi = Vec::Constant(d - 1, radius);
        auto section = [&, axis](const Vec& z) {
            double off = 0.0;
            for (int i = 0; i < d; ++i)
                if (i != axis) off += z[i] * z[i];
            SectionSet out;
            double h2 = radius * radius - off;
            if (h2 >= 0.0) {
                double h = std::sqrt(h2);
                out.push({-h, h});
            }
            return out;
        };
        quad = integrate_sectioned(d, axis, outer_lo, outer_hi, section, g, opt);
    } else if (const auto* hs = std::get_if<HalfSpaceSector>(&cone.kind)) {
        int axis;
        hs->nu.cwiseAbs().maxCoeff(&axis);
        const double na = hs->nu[axis];
        Vec outer_lo = Vec::Constant(d - 1, -radius);
        Vec outer_hi = Vec::Constant(d - 1, radius);
        Vec nu = hs->nu;
        auto section = [&, axis, na, nu](const Vec& z) {
            double off = 0.0, dot = 0.0;
            for (int i = 0; i < d; ++i)
                if (i != axis) {
                    off += z[i] * z[i];
                    dot += z[i] * nu[i];
                }
            SectionSet out;
            double h2 = radius * radius - off;
            if (h2 < 0.0) return out;
            double h = std::sqrt(h2);
            double bound = -dot / na;  // z_axis * na >= -dot
            Interval iv = na > 0 ? Interval{bound, h} : Interval{-h, bound};
            out.push(intersect(iv, {-h, h}));
            return out;
        };
        quad = integrate_sectioned(d, axis, outer_lo, outer_hi, section, g, opt);
    } else if (const auto* os = std::get_if<OrthantSector>(&cone.kind)) {
        // Choose the axis most aligned with some normal; normals orthogonal
        // to it become outer constraints checked per node.
        Mat normals = os->normals;
        int axis = 0;
        double best = -1.0;
        for (int a = 0; a < d; ++a) {
            double m = normals.row(a).cwiseAbs().maxCoeff();
            if (m > best) {
                best = m;
                axis = a;
            }
        }
        Vec outer_lo = Vec::Constant(d - 1, -radius);
        Vec outer_hi = Vec::Constant(d - 1, radius);
        auto section = [&, axis](const Vec& z) {
            double off = 0.0;
            for (int i = 0; i < d; ++i)
                if (i != axis) off += z[i] * z[i];
            SectionSet out;
            double h2 = radius * radius - off;
            if (h2 < 0.0) return out;
            double h = std::sqrt(h2);
            Interval iv{-h, h};
            for (int c = 0; c < normals.cols(); ++c) {
                double na = normals(axis, c);
                double dot = 0.0;
                for (int i = 0; i < d; ++i)
                    if (i != axis) dot += z[i] * normals(i, c);
                if (std::abs(na) > 1e-12) {
                    double bound = -dot / na;
                    if (na > 0)
                        iv.lo = std::max(iv.lo, bound);
                    else
                        iv.hi = std::min(iv.hi, bound);
                } else if (dot < 0.0) {
                    return out;  // constraint independent of the axis fails
                }
            }
            out.push(iv);
            return out;
        };
        quad = integrate_sectioned(d, axis, outer_lo, outer_hi, section, g, opt);
    } else {
        // Predicate sector: indicator on the direction.
        const auto& pred = std::get<PredicateSector>(cone.kind);
        Vec lo = Vec::Constant(d, -radius);
        Vec hi = Vec::Constant(d, radius);
        auto inside = [&](const Vec& z) {
            double r2 = z.squaredNorm();
            if (r2 > radius * radius || r2 == 0.0) return false;
            return pred.member(Vec(z / std::sqrt(r2)));
        };
        quad = integrate_indicator(d, lo, hi, inside, g, opt);
    }
    return finish_continuum(quad, t, d, "euclidean_cone_operator");
}

std::string report_csv_row(const OperatorReport& r) {
    char buf[64];
    std::string row;
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        row += buf;
    };
    auto opt_num = [&](bool present, double v) {
        if (present)
            num(v);
    };
    num(r.t);
    row += ',';
    opt_num(r.discrete.has_value(), r.discrete ? r.discrete->value : 0.0);
    row += ',';
    opt_num(r.continuum.has_value(), r.continuum ? r.continuum->value : 0.0);
    row += ',';
    opt_num(r.discrete.has_value(), r.sqrt_t_discrete);
    row += ',';
    opt_num(r.continuum.has_value(), r.sqrt_t_continuum);
    row += ',';
    opt_num(r.predictor.has_value(), r.predictor ? *r.predictor : 0.0);
    row += ',';
    opt_num(r.predictor.has_value(), r.sqrt_t_predictor);
    row += ',';
    opt_num(r.discrete.has_value(), r.discrete ? r.discrete->error : 0.0);
    row += ',';
    opt_num(r.continuum.has_value(), r.continuum ? r.continuum->error : 0.0);
    row += ',';
    num(r.truncation_bound);
    return row;
}

}  // namespace kinklap
