//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#pragma once

#include <string>
#include <vector>

#include "kinklap/config.hpp"
#include "kinklap/operators.hpp"

namespace kinklap {

struct RunResult {
    std::vector<std::string> csv_paths;  // one per evaluation point, config order
    std::string meta_path;
    bool numeric_failure = false;  // some cell recorded as NaN
};

/// Run the configured table: one OperatorReport row per (point, t), one CSV
/// per point (fixed header), plus a metadata sidecar with seed, mode, wall
/// time and the schedule-condition checks. Rows compute in parallel and are
/// written in config order; output bytes are independent of thread count.
/// Numeric failures poison single cells as NaN and the run continues.
RunResult run_table(const ExperimentConfig& cfg);

/// Write one standalone gnuplot script per report CSV (log-x, four series:
/// discrete, continuum, scaled discrete, scaled continuum). Throws
/// ArgumentError listing absent headers when the CSV lacks the columns.
std::vector<std::string> emit_plots(const std::vector<std::string>& csv_paths);

struct CheckOutcome {
    bool passed = true;
    std::vector<std::string> failures;  // human-readable breaches
};

/// Compare a run's continuum column against a bundled expected-values file
/// (CSV: point,t,expected,rel_tol) within per-row relative tolerances.
CheckOutcome check_against(const ExperimentConfig& cfg, const std::string& expected_path);

}  // namespace kinklap
