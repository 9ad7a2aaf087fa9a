//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kinklap/concentration.hpp"
#include "kinklap/fields.hpp"
#include "kinklap/geometry.hpp"

namespace kinklap {

/// Config file error with line/field diagnostics.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed experiment configuration (the CLI's key-value format with
/// [section] headers; see configs/README in the repository root for the
/// schema). emit_config produces the canonical form: emit(parse(emit(c)))
/// is byte-identical to emit(c).
struct ExperimentConfig {
    // [domain]
    std::string shape = "ball";  // ball|box|orthant|cone|cusp
    int dim = 3;
    double radius = 1.0;                  // ball
    std::vector<double> lengths;          // box
    int depth = 2;                        // orthant
    double half_angle = 0.7853981633974483;  // cone
    std::vector<double> axis;             // cone
    double beta_exponent = 0.5;           // cusp
    std::string distance_mode = "intrinsic";

    // [density]
    std::string density_kind = "uniform";

    // [field]
    std::string field_kind = "coordinate_sum";

    // [points] named evaluation points, in file order
    std::vector<std::pair<std::string, std::vector<double>>> points;

    // [grid]
    std::string grid_kind = "linear";  // linear|log
    double t_min = 0.01;
    double t_max = 0.05;
    int t_count = 20;

    // [run]
    std::int64_t n = 1000000;
    std::uint64_t seed = 42;
    double eta = 0.05;
    std::string mode = "all";  // discrete|continuum|predictor|all
    std::string output = "out/run";
    double quad_rel_tol = 1e-7;

    // [schedule] (optional; concentration experiments)
    bool has_schedule = false;
    double schedule_beta = 0.125;
    double schedule_c0 = 0.1;
    std::vector<std::int64_t> n_grid;
    int trials = 50;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string emit_config(const ExperimentConfig& cfg);

Domain make_domain(const ExperimentConfig& cfg);
DensityField make_density(const ExperimentConfig& cfg, const Domain& domain);
ScalarField make_field(const ExperimentConfig& cfg);
/// Bandwidth grid from t_max down to t_min, linear or logarithmic spacing.
std::vector<double> make_t_grid(const ExperimentConfig& cfg);

}  // namespace kinklap
