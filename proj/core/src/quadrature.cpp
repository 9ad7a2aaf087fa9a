//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#include "kinklap/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "kinklap/summation.hpp"

namespace kinklap {

namespace {

struct GlRule {
    std::vector<double> x;
    std::vector<double> w;
};

/// Newton iteration on the Legendre polynomial recurrence.
GlRule compute_gauss_legendre(int n) {
    GlRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        rule.x[i] = -z;
        rule.x[n - 1 - i] = z;
        rule.w[i] = rule.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return rule;
}

const GlRule& gl_rule(int order) {
    static std::map<int, GlRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
    return it->second;
}

struct Cell {
    Vec lo;
    Vec hi;
    double value = 0.0;
    double error = 0.0;
};

/// Shared adaptive driver: evaluates cells with `eval`, refines in waves
/// until the summed error estimate meets the tolerance.
template <class EvalCell>
QuadResult adapt(std::vector<Cell> cells, const QuadOptions& opt, EvalCell&& eval) {
    for (Cell& c : cells) eval(c);
    QuadResult res;
    std::size_t evals_cells = cells.size();
    const double min_width = 1e-12;
    for (;;) {
        std::vector<double> vals(cells.size()), errs(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            vals[i] = cells[i].value;
            errs[i] = cells[i].error;
        }
        double total = pairwise_sum(vals);
        double err = pairwise_sum(errs);
        double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
        if (err <= tol) {
            res.value = total;
            res.abs_error = err;
            res.converged = true;
            res.evaluations = evals_cells;
            return res;
        }
        if (cells.size() >= opt.max_cells) {
            res.value = total;
            res.abs_error = err;
            res.converged = false;
            res.evaluations = evals_cells;
            return res;
        }
        // Refine every cell whose error is within a factor 8 of the largest
        // (wave refinement keeps mirror-symmetric layouts symmetric).
        double emax = 0.0;
        for (double e : errs) emax = std::max(emax, e);
        double cut = std::max(emax / 8.0, tol / (4.0 * static_cast<double>(cells.size())));
        std::vector<Cell> next;
        next.reserve(cells.size() * 2);
        bool split_any = false;
        for (Cell& c : cells) {
            int widest;
            double width = (c.hi - c.lo).maxCoeff(&widest);
            if (c.error >= cut && width > min_width && next.size() + 2 < 2 * opt.max_cells) {
                Cell a, b;
                a.lo = c.lo;
                a.hi = c.hi;
                b.lo = c.lo;
                b.hi = c.hi;
                double mid = 0.5 * (c.lo[widest] + c.hi[widest]);
                a.hi[widest] = mid;
                b.lo[widest] = mid;
                eval(a);
                eval(b);
                evals_cells += 2;
                next.push_back(std::move(a));
                next.push_back(std::move(b));
                split_any = true;
            } else {
                next.push_back(std::move(c));
            }
        }
        if (!split_any) {
            std::vector<double> v2(next.size()), e2(next.size());
            for (std::size_t i = 0; i < next.size(); ++i) {
                v2[i] = next[i].value;
                e2[i] = next[i].error;
            }
            res.value = pairwise_sum(v2);
            res.abs_error = pairwise_sum(e2);
            res.converged = res.abs_error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(res.value));
            res.evaluations = evals_cells;
            return res;
        }
        cells = std::move(next);
    }
}

}  // namespace

void gauss_legendre(int order, const double** nodes, const double** weights) {
    const GlRule& r = gl_rule(order);
    *nodes = r.x.data();
    *weights = r.w.data();
}

QuadResult integrate_sectioned(int dim, int axis, const Vec& outer_lo, const Vec& outer_hi,
                               const SectionFn& section, const IntegrandFn& g,
                               const QuadOptions& opt) {
    require(dim >= 1, "integrate_sectioned: dim must be positive");
    require(axis >= 0 && axis < dim, "integrate_sectioned: axis out of range");
    const int m = dim - 1;
    require(static_cast<int>(outer_lo.size()) == m && static_cast<int>(outer_hi.size()) == m,
            "integrate_sectioned: outer box must have dim-1 coordinates");

    // Outer coordinate index -> full coordinate index.
    std::vector<int> coord(m);
    for (int i = 0, k = 0; i < dim; ++i)
        if (i != axis) coord[k++] = i;

    const GlRule& inner = gl_rule(opt.inner_order);

    // Integral of g along the axis over the section at the outer point z.
    auto inner_integral = [&](Vec& z) -> double {
        SectionSet secs = section(z);
        double total = 0.0;
        for (int s = 0; s < secs.count; ++s) {
            Interval iv = secs.iv[s];
            double len = iv.length();
            if (len <= 0.0) continue;
            int pieces = std::max(1, static_cast<int>(std::ceil(len / opt.inner_piece)));
            KahanSum acc;
            for (int p = 0; p < pieces; ++p) {
                double a = iv.lo + len * p / pieces;
                double b = iv.lo + len * (p + 1) / pieces;
                double half = 0.5 * (b - a);
                double mid = 0.5 * (a + b);
                for (int q = 0; q < opt.inner_order; ++q) {
                    z[axis] = mid + half * inner.x[q];
                    acc.add(inner.w[q] * g(z));
                }
                total += half * acc.value();
                acc = KahanSum{};
            }
        }
        return total;
    };

    const GlRule& hi_rule = gl_rule(opt.outer_order);
    const GlRule& lo_rule = gl_rule(opt.outer_order_low);

    auto tensor_value = [&](const Cell& c, const GlRule& rule) -> double {
        const int p = static_cast<int>(rule.x.size());
        std::vector<int> idx(m, 0);
        Vec z = Vec::Zero(dim);
        double jac = 1.0;
        for (int i = 0; i < m; ++i) jac *= 0.5 * (c.hi[i] - c.lo[i]);
        if (m == 0) return inner_integral(z);
        KahanSum acc;
        for (;;) {
            double w = 1.0;
            for (int i = 0; i < m; ++i) {
                double mid = 0.5 * (c.lo[i] + c.hi[i]);
                double half = 0.5 * (c.hi[i] - c.lo[i]);
                z[coord[i]] = mid + half * rule.x[idx[i]];
                w *= rule.w[idx[i]];
            }
            acc.add(w * inner_integral(z));
            int k = 0;
            while (k < m && ++idx[k] == p) {
                idx[k] = 0;
                ++k;
            }
            if (k == m) break;
        }
        return jac * acc.value();
    };

    if (m == 0) {
        QuadResult res;
        Vec z = Vec::Zero(dim);
        res.value = inner_integral(z);
        res.abs_error = 1e-14 * std::abs(res.value);
        res.converged = true;
        res.evaluations = 1;
        return res;
    }

    auto eval = [&](Cell& c) {
        double v_hi = tensor_value(c, hi_rule);
        double v_lo = tensor_value(c, lo_rule);
        c.value = v_hi;
        c.error = std::abs(v_hi - v_lo) + 1e-16 * std::abs(v_hi);
    };

    Cell root;
    root.lo = outer_lo;
    root.hi = outer_hi;
    return adapt(std::vector<Cell>{root}, opt, eval);
}

QuadResult integrate_indicator(int dim, const Vec& lo, const Vec& hi, const IndicatorFn& inside,
                               const IntegrandFn& g, const QuadOptions& opt) {
    require(dim >= 1, "integrate_indicator: dim must be positive");
    require(static_cast<int>(lo.size()) == dim && static_cast<int>(hi.size()) == dim,
            "integrate_indicator: box dimension mismatch");

    const GlRule& hi_rule = gl_rule(opt.outer_order);
    const GlRule& lo_rule = gl_rule(opt.outer_order_low);

    auto tensor_value = [&](const Cell& c, const GlRule& rule) -> double {
        const int p = static_cast<int>(rule.x.size());
        std::vector<int> idx(dim, 0);
        Vec z(dim);
        double jac = 1.0;
        for (int i = 0; i < dim; ++i) jac *= 0.5 * (c.hi[i] - c.lo[i]);
        KahanSum acc;
        for (;;) {
            double w = 1.0;
            for (int i = 0; i < dim; ++i) {
                double mid = 0.5 * (c.lo[i] + c.hi[i]);
                double half = 0.5 * (c.hi[i] - c.lo[i]);
                z[i] = mid + half * rule.x[idx[i]];
                w *= rule.w[idx[i]];
            }
            if (inside(z)) acc.add(w * g(z));
            int k = 0;
            while (k < dim && ++idx[k] == p) {
                idx[k] = 0;
                ++k;
            }
            if (k == dim) break;
        }
        return jac * acc.value();
    };

    auto eval = [&](Cell& c) {
        double v_hi = tensor_value(c, hi_rule);
        double v_lo = tensor_value(c, lo_rule);
        c.value = v_hi;
        c.error = std::abs(v_hi - v_lo) + 1e-16 * std::abs(v_hi);
    };

    Cell root;
    root.lo = lo;
    root.hi = hi;
    return adapt(std::vector<Cell>{root}, opt, eval);
}

}  // namespace kinklap
