//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kinklap/operators.hpp"

namespace kinklap {

/// Constants of the tail bound P(|Z| >= eps) <= K exp(-C eps^alpha).
struct TailProfile {
    double alpha;  // in (0, 2]
    double K;
    double C;
    bool bounded_note = false;  // "bounded => subgaussian"
};

/// Bandwidth schedule t_n, either the power law C0 n^{-beta} or an explicit
/// (n, t_n) table.
struct BandwidthSchedule {
    struct PowerLaw {
        double c0;
        double beta;
    };
    int d = 0;
    std::optional<PowerLaw> power_law;
    std::vector<std::pair<double, double>> explicit_schedule;  // (n, t_n), n increasing

    static BandwidthSchedule power(int d, double c0, double beta);
    static BandwidthSchedule table(int d, std::vector<std::pair<double, double>> nt);
    double t_at(double n) const;
};

struct ConditionCheck {
    bool holds = false;
    bool inconclusive = false;  // explicit non-power-law schedules
    std::string witness;
};

/// In-probability convergence condition sqrt(n) t_n^{d/2+1} -> infinity.
/// Power laws: holds iff beta < 1/(d+2) (growth exponent
/// 1/2 - beta(d/2+1) > 0). Explicit schedules report monotone-tail
/// evidence only.
ConditionCheck check_probability_condition(const BandwidthSchedule& schedule);

/// Almost-sure convergence condition (sqrt(n) t_n^{d/2+1})^alpha / ln n
/// -> infinity. Power laws: any positive growth exponent beats ln n; the
/// exact boundary fails.
ConditionCheck check_as_condition(const BandwidthSchedule& schedule, double alpha);

/// Fit the tail profile of |observations| on a candidate alpha grid by
/// least squares of ln P(|Z| >= eps) against -C eps^alpha over the upper
/// quantile range [q0.5, q0.995]. Compactly supported samples report
/// alpha = 2 with the bounded note. Constant observations return the
/// K = 1, C = infinity sentinel.
TailProfile estimate_tail_alpha(std::vector<double> observations,
                                const std::vector<double>& alphas = {0.25, 0.5, 0.75, 1.0, 1.25,
                                                                     1.5, 1.75, 2.0});

struct DeviationRow {
    double n;
    double t_n;
    bool condition1;
    bool condition2;
    double alpha;
    double q50;
    double q90;
    double q99;
    double envelope_scale;  // 1 / (sqrt(n) t_n^{d/2+1}), the eps scale of the bound
};

struct DeviationTable {
    std::vector<DeviationRow> rows;
    bool schedule_warning = false;  // set when condition (1) fails
    std::string csv() const;       // header n,t_n,condition1,condition2,alpha,...
};

/// Empirical deviation experiment: for each n, M independent trials of
/// |L_{n,t_n} f(x) - L_{t_n} f(x)| with per-trial derived seeds; the
/// continuum value is computed once per (x, t_n). Runs in parallel over
/// (n, trial) with deterministic gathering.
DeviationTable deviation_experiment(const Domain& domain, const DensityField& density,
                                    const ScalarField& f, const Vec& x,
                                    const BandwidthSchedule& schedule,
                                    const std::vector<std::int64_t>& n_grid, int trials,
                                    std::uint64_t seed, double eta = 0.05,
                                    const QuadOptions& quad_opt = {});

}  // namespace kinklap
