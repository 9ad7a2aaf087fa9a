//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#include "kinklap/sector_moments.hpp"

#include <cmath>
#include <cstdio>

#include "kinklap/parallel.hpp"
#include "kinklap/rng.hpp"
#include "kinklap/specfun.hpp"
#include "kinklap/summation.hpp"

namespace kinklap {

namespace {

/// Volume of the unit (d-1)-ball: first-moment coefficient of a half sphere.
double half_sphere_first_moment(int d) { return unit_ball_volume(d - 1); }

/// Cross moment int theta_i theta_j dsigma over an orthonormal depth-k
/// orthant sector, i != j both among the constrained directions. Obtained by
/// factorizing the Gaussian integral over the cone and dividing by c_{d+1}
/// (equivalently by the 2-angle plane reduction; the two derivations agree).
double orthant_cross_moment(int d, int k) {
    return std::pow(2.0, 1 - k) *
           std::exp(0.5 * (d - 2) * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0));
}

}  // namespace

SectorMoments closed_form_moments(const Sector& sector, int d) {
    require(d >= 1, "closed_form_moments: d must be positive");
    require(sector.dim == d, "closed_form_moments: sector dimension mismatch");
    const double full = full_sphere_measure(d);

    SectorMoments m;
    m.first_moment = Vec::Zero(d);
    m.second_moment = Mat::Zero(d, d);
    m.first_moment_stderr = Vec::Zero(d);
    m.second_moment_stderr = Mat::Zero(d, d);
    m.source = MomentSource::closed_form;

    if (std::holds_alternative<FullSector>(sector.kind)) {
        m.measure = full;
        m.second_moment = (full / d) * Mat::Identity(d, d);
        return m;
    }
    if (const auto* h = std::get_if<HalfSpaceSector>(&sector.kind)) {
        m.measure = 0.5 * full;
        m.first_moment = half_sphere_first_moment(d) * h->nu;
        m.second_moment = (full / (2.0 * d)) * Mat::Identity(d, d);
        return m;
    }
    if (const auto* o = std::get_if<OrthantSector>(&sector.kind)) {
        const int k = o->depth();
        require(k >= 1 && k <= d, "closed_form_moments: orthant depth out of range");
        double frac = std::pow(2.0, -k);
        m.measure = frac * full;
        double coeff = half_sphere_first_moment(d) * std::pow(2.0, 1 - k);
        for (int i = 0; i < k; ++i) m.first_moment += coeff * o->normals.col(i);
        m.second_moment = (frac * full / d) * Mat::Identity(d, d);
        double cross = orthant_cross_moment(d, k);
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) {
                Mat outer = o->normals.col(i) * o->normals.col(j).transpose();
                m.second_moment += cross * (outer + outer.transpose());
            }
        return m;
    }
    throw ArgumentError(
        "closed_form_moments: no closed form for a Predicate sector; use monte_carlo_moments");
}

SectorMoments monte_carlo_moments(const Sector& sector, int d, std::uint64_t samples,
                                  std::uint64_t seed) {
    require(d >= 1, "monte_carlo_moments: d must be positive");
    require(sector.dim == d, "monte_carlo_moments: sector dimension mismatch");
    require(samples >= 1000, "monte_carlo_moments: need at least 1e3 samples");

    // Accumulated quantities per sample: indicator, theta, theta theta^T
    // (upper triangle), and their squares for standard errors.
    const int nv = d;
    const int nm = d * (d + 1) / 2;
    const std::size_t width = 1 + nv + nm;
    const std::size_t nb = block_count(samples, kSumBlock);
    std::vector<std::vector<double>> blocks(nb);

    parallel_for(nb, [&](std::size_t b) {
        std::vector<KahanSum> acc(2 * width);
        std::vector<double> vals(width);
        Vec theta(d);
        const std::size_t lo = b * kSumBlock;
        const std::size_t hi = std::min<std::size_t>(samples, lo + kSumBlock);
        for (std::size_t s = lo; s < hi; ++s) {
            CounterRng rng(seed, s);
            double norm2 = 0.0;
            for (int i = 0; i < d; ++i) {
                theta[i] = rng.next_gaussian();
                norm2 += theta[i] * theta[i];
            }
            if (norm2 == 0.0) continue;  // impossible in practice
            theta /= std::sqrt(norm2);
            if (!sector_member(sector, theta)) continue;
            vals[0] = 1.0;
            for (int i = 0; i < d; ++i) vals[1 + i] = theta[i];
            int idx = 1 + nv;
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) vals[idx++] = theta[i] * theta[j];
            for (std::size_t k = 0; k < width; ++k) {
                acc[k].add(vals[k]);
                acc[width + k].add(vals[k] * vals[k]);
            }
        }
        blocks[b].resize(2 * width);
        for (std::size_t k = 0; k < 2 * width; ++k) blocks[b][k] = acc[k].value();
    });

    std::vector<double> sum(2 * width, 0.0);
    std::vector<double> col(nb);
    for (std::size_t k = 0; k < 2 * width; ++k) {
        for (std::size_t b = 0; b < nb; ++b) col[b] = blocks[b][k];
        sum[k] = pairwise_sum(col);
    }

    const double full = full_sphere_measure(d);
    const double n = static_cast<double>(samples);
    SectorMoments m;
    m.source = MomentSource::monte_carlo;
    m.samples = samples;
    m.seed = seed;
    m.first_moment = Vec::Zero(d);
    m.second_moment = Mat::Zero(d, d);
    m.first_moment_stderr = Vec::Zero(d);
    m.second_moment_stderr = Mat::Zero(d, d);

    if (sum[0] == 0.0) {
        m.degenerate = true;
        return m;
    }

    auto mean_se = [&](std::size_t k, double& mean, double& se) {
        mean = sum[k] / n;
        double var = std::max(0.0, sum[width + k] / n - mean * mean);
        se = std::sqrt(var / n);
    };
    double mu, se;
    mean_se(0, mu, se);
    m.measure = full * mu;
    m.measure_stderr = full * se;
    for (int i = 0; i < d; ++i) {
        mean_se(1 + i, mu, se);
        m.first_moment[i] = full * mu;
        m.first_moment_stderr[i] = full * se;
    }
    int idx = 1 + nv;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            mean_se(idx++, mu, se);
            m.second_moment(i, j) = m.second_moment(j, i) = full * mu;
            m.second_moment_stderr(i, j) = m.second_moment_stderr(j, i) = full * se;
        }
    return m;
}

double mixed_moment(const Sector& sector, int i, int j, const DerivativeForm& f_form,
                    const DerivativeForm& p_form, int d, std::uint64_t mc_samples,
                    std::uint64_t seed) {
    require(i >= 1 && i <= 4, "mixed_moment: order i must be in 1..4");
    require(j >= 0 && j <= 3, "mixed_moment: order j must be in 0..3");

    const bool has_closed = !std::holds_alternative<PredicateSector>(sector.kind);
    if (i + j <= 2 && has_closed) {
        SectorMoments m = closed_form_moments(sector, d);
        if (i == 1 && j == 0) {
            // p(x) * grad f . v_C: recover the linear form from basis probes.
            Vec a(d);
            Vec e = Vec::Zero(d);
            for (int k = 0; k < d; ++k) {
                e[k] = 1.0;
                a[k] = f_form(e);
                e[k] = 0.0;
            }
            return p_form(Vec::Zero(d)) * a.dot(m.first_moment);
        }
        if (i == 1 && j == 1) {
            Vec a(d), b(d);
            Vec e = Vec::Zero(d);
            for (int k = 0; k < d; ++k) {
                e[k] = 1.0;
                a[k] = f_form(e);
                b[k] = p_form(e);
                e[k] = 0.0;
            }
            return a.dot(m.second_moment * b);
        }
        // i == 2, j == 0: <Hess f, M_C> * p(x), Hessian recovered by probes.
        Mat H(d, d);
        Vec e = Vec::Zero(d);
        Vec diag(d);
        for (int k = 0; k < d; ++k) {
            e[k] = 1.0;
            diag[k] = f_form(e);  // H_kk
            e[k] = 0.0;
        }
        for (int a = 0; a < d; ++a) {
            for (int b = a; b < d; ++b) {
                if (a == b) {
                    H(a, a) = diag[a];
                    continue;
                }
                e[a] = 1.0;
                e[b] = 1.0;
                double s = f_form(e);  // H_aa + H_bb + 2 H_ab
                e[a] = 0.0;
                e[b] = 0.0;
                H(a, b) = H(b, a) = 0.5 * (s - diag[a] - diag[b]);
            }
        }
        return p_form(Vec::Zero(d)) * (H * m.second_moment).trace();
    }

    // Monte Carlo over the sector.
    require(mc_samples >= 1000, "mixed_moment: need at least 1e3 Monte Carlo samples");
    const std::size_t nb = block_count(mc_samples, kSumBlock);
    std::vector<double> block_sums(nb);
    parallel_for(nb, [&](std::size_t b) {
        KahanSum acc;
        Vec theta(d);
        const std::size_t lo = b * kSumBlock;
        const std::size_t hi = std::min<std::size_t>(mc_samples, lo + kSumBlock);
        for (std::size_t s = lo; s < hi; ++s) {
            CounterRng rng(seed, s);
            for (int k = 0; k < d; ++k) theta[k] = rng.next_gaussian();
            theta.normalize();
            if (!sector_member(sector, theta)) continue;
            acc.add(f_form(theta) * p_form(theta));
        }
        block_sums[b] = acc.value();
    });
    double mean = pairwise_sum(block_sums) / static_cast<double>(mc_samples);
    return full_sphere_measure(d) * mean;
}

std::string sector_moments_csv_header(int d) {
    std::string h = "kind,d,source,samples,seed,degenerate,measure,measure_se";
    char buf[64];
    for (int i = 0; i < d; ++i) {
        std::snprintf(buf, sizeof(buf), ",v%d,v%d_se", i + 1, i + 1);
        h += buf;
    }
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            std::snprintf(buf, sizeof(buf), ",M%d%d,M%d%d_se", i + 1, j + 1, i + 1, j + 1);
            h += buf;
        }
    return h;
}

std::string sector_moments_csv_row(const SectorMoments& m, const std::string& kind, int d) {
    char buf[96];
    std::string row = kind;
    std::snprintf(buf, sizeof(buf), ",%d,%s,%llu,%llu,%d", d,
                  m.source == MomentSource::closed_form ? "closed_form" : "monte_carlo",
                  static_cast<unsigned long long>(m.samples),
                  static_cast<unsigned long long>(m.seed), m.degenerate ? 1 : 0);
    row += buf;
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), ",%.17g", v);
        row += buf;
    };
    num(m.measure);
    num(m.measure_stderr);
    for (int i = 0; i < d; ++i) {
        num(m.first_moment[i]);
        num(m.first_moment_stderr[i]);
    }
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            num(m.second_moment(i, j));
            num(m.second_moment_stderr(i, j));
        }
    return row;
}

}  // namespace kinklap
