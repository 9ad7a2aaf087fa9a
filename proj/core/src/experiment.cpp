//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#include "kinklap/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "kinklap/parallel.hpp"

namespace kinklap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec to_vec(const std::vector<double>& v) {
    return Eigen::Map<const Vec>(v.data(), static_cast<int>(v.size()));
}

}  // namespace

RunResult run_table(const ExperimentConfig& cfg) {
    Domain domain = make_domain(cfg);
    DensityField density = make_density(cfg, domain);
    ScalarField field = make_field(cfg);
    std::vector<double> grid = make_t_grid(cfg);

    std::vector<std::pair<std::string, Vec>> points;
    for (const auto& [name, coords] : cfg.points) {
        if (static_cast<int>(coords.size()) != cfg.dim)
            throw ConfigError("point '" + name + "' must list dim coordinates");
        Vec x = to_vec(coords);
        if (!contains(domain, x))
            throw ConfigError("point '" + name + "' lies outside the domain");
        points.emplace_back(name, std::move(x));
    }

    const bool want_discrete = cfg.mode == "discrete" || cfg.mode == "all";
    const bool want_continuum = cfg.mode == "continuum" || cfg.mode == "all";
    const bool want_predictor = cfg.mode == "predictor" || cfg.mode == "all";

    auto t0 = std::chrono::steady_clock::now();

    SampleSet samples;
    if (want_discrete && cfg.n > 0) samples = sample_uniform(domain, cfg.n, cfg.seed);

    // Sector moments per point (closed forms where available).
    std::vector<SectorMoments> moments(points.size());
    std::vector<std::string> errors;
    if (want_predictor) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            try {
                Sector sec = sector_at(domain, classify(domain, points[i].second,
                                                        0.05 * domain.feature_scale()));
                if (std::holds_alternative<PredicateSector>(sec.kind))
                    moments[i] = monte_carlo_moments(sec, cfg.dim, 1u << 20, cfg.seed);
                else
                    moments[i] = closed_form_moments(sec, cfg.dim);
            } catch (const std::exception& e) {
                errors.push_back("moments[" + points[i].first + "]: " + e.what());
                moments[i].first_moment = Vec::Constant(cfg.dim, kNaN);
                moments[i].second_moment = Mat::Constant(cfg.dim, cfg.dim, kNaN);
                moments[i].measure = kNaN;
            }
        }
    }

    QuadOptions qopt;
    qopt.rel_tol = cfg.quad_rel_tol;

    // Compute all cells in parallel; write in order afterwards.
    const std::size_t cells = points.size() * grid.size();
    std::vector<OperatorReport> reports(cells);
    std::vector<std::string> cell_errors(cells);
    DistanceMode mode = domain.distance_mode();
    parallel_for(cells, [&](std::size_t job) {
        std::size_t pi = job / grid.size();
        std::size_t ti = job % grid.size();
        OperatorReport& rep = reports[job];
        rep.t = grid[ti];
        rep.eta = cfg.eta;
        rep.distance_mode = mode;
        const Vec& x = points[pi].second;
        if (want_discrete && samples.n() > 0) {
            try {
                rep.set_discrete(graph_laplacian(samples, field, x, rep.t, mode));
            } catch (const std::exception& e) {
                rep.set_discrete({kNaN, kNaN});
                cell_errors[job] = std::string("discrete: ") + e.what();
            }
        }
        if (want_continuum) {
            try {
                ContinuumResult c =
                    gauss_operator(domain, density, field, x, KernelParams(rep.t, cfg.eta), qopt);
                rep.set_continuum({c.value, c.quad_error + c.truncation_bound}, c.truncation_bound);
            } catch (const QuadratureNonConvergence& e) {
                rep.set_continuum({kNaN, kNaN}, kNaN);
                cell_errors[job] = std::string("continuum: ") + e.what();
            } catch (const std::exception& e) {
                rep.set_continuum({kNaN, kNaN}, kNaN);
                cell_errors[job] = std::string("continuum: ") + e.what();
            }
        }
        if (want_predictor) {
            try {
                rep.set_predictor(asymptotic_predictor(
                    moments[pi], density.value(x), density.gradient(x), field.gradient(x),
                    field.hessian(x), rep.t, cfg.dim));
            } catch (const std::exception& e) {
                rep.set_predictor(kNaN);
                cell_errors[job] = std::string("predictor: ") + e.what();
            }
        }
    });

    bool failure = false;
    for (std::size_t j = 0; j < cells; ++j)
        if (!cell_errors[j].empty()) {
            failure = true;
            errors.push_back("cell " + std::to_string(j) + ": " + cell_errors[j]);
        }

    // Write per-point CSVs in config order.
    RunResult out;
    std::filesystem::path prefix(cfg.output);
    if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        std::string path = cfg.output + "_" + points[pi].first + ".csv";
        std::ofstream csv(path);
        if (!csv.good()) throw ConfigError("cannot write " + path);
        csv << kReportCsvHeader << "\n";
        for (std::size_t ti = 0; ti < grid.size(); ++ti)
            csv << report_csv_row(reports[pi * grid.size() + ti]) << "\n";
        out.csv_paths.push_back(path);
    }

    auto t1 = std::chrono::steady_clock::now();
    double wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    // Sidecar metadata (wall time varies run to run; the CSVs do not).
    nlohmann::ordered_json meta;
    meta["seed"] = cfg.seed;
    meta["mode"] = cfg.mode;
    meta["eta"] = cfg.eta;
    meta["n"] = cfg.n;
    meta["distance_mode"] = cfg.distance_mode;
    meta["threads"] = worker_count();
    meta["wall_ms"] = wall_ms;
    meta["numeric_failures"] = errors;
    if (cfg.has_schedule) {
        BandwidthSchedule sched =
            BandwidthSchedule::power(cfg.dim, cfg.schedule_c0, cfg.schedule_beta);
        ConditionCheck c1 = check_probability_condition(sched);
        ConditionCheck c2 = check_as_condition(sched, 2.0);
        meta["schedule_check"] = {{"probability", c1.holds},
                                  {"probability_witness", c1.witness},
                                  {"almost_sure_alpha2", c2.holds},
                                  {"almost_sure_witness", c2.witness}};
    }
    out.meta_path = cfg.output + ".meta.json";
    std::ofstream mf(out.meta_path);
    mf << meta.dump(2) << "\n";
    out.numeric_failure = failure;
    return out;
}

std::vector<std::string> emit_plots(const std::vector<std::string>& csv_paths) {
    std::vector<std::string> scripts;
    const std::vector<std::pair<std::string, int>> series = {
        {"L_nt", 2}, {"L_t", 3}, {"sqrt_t_L_nt", 4}, {"sqrt_t_L_t", 5}};
    for (const auto& path : csv_paths) {
        std::ifstream in(path);
        if (!in.good()) throw ArgumentError("emit_plots: cannot open " + path);
        std::string header;
        std::getline(in, header);
        std::vector<std::string> cols;
        std::stringstream hs(header);
        std::string col;
        while (std::getline(hs, col, ',')) cols.push_back(col);
        std::string missing;
        auto have = [&](const std::string& name) {
            for (const auto& c : cols)
                if (c == name) return true;
            return false;
        };
        for (const auto& [name, idx] : series) {
            (void)idx;
            if (!have(name)) missing += missing.empty() ? name : ", " + name;
        }
        if (!have("t")) missing = missing.empty() ? "t" : "t, " + missing;
        if (!missing.empty())
            throw ArgumentError("emit_plots: " + path + " is missing columns: " + missing);

        std::string base = path.substr(0, path.size() - 4);  // strip .csv
        std::string gp = base + ".gp";
        std::ofstream out(gp);
        out << "# gnuplot script generated from " << path << "\n";
        out << "set datafile separator ','\n";
        out << "set logscale x\n";
        out << "set xlabel 't'\n";
        out << "set terminal svg size 720,480\n";
        out << "set output '" << base << ".svg'\n";
        out << "plot \\\n";
        for (std::size_t i = 0; i < series.size(); ++i) {
            out << "  '" << path << "' skip 1 using 1:" << series[i].second
                << " with linespoints title '" << series[i].first << "'";
            out << (i + 1 < series.size() ? ", \\\n" : "\n");
        }
        scripts.push_back(gp);
    }
    return scripts;
}

CheckOutcome check_against(const ExperimentConfig& cfg, const std::string& expected_path) {
    std::ifstream in(expected_path);
    if (!in.good()) throw ConfigError("check: cannot open expected-values file " + expected_path);

    Domain domain = make_domain(cfg);
    DensityField density = make_density(cfg, domain);
    ScalarField field = make_field(cfg);
    QuadOptions qopt;
    qopt.rel_tol = cfg.quad_rel_tol;

    CheckOutcome out;
    std::string line;
    std::getline(in, line);  // header point,t,expected,rel_tol
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string name, ts, es, tols;
        std::getline(ss, name, ',');
        std::getline(ss, ts, ',');
        std::getline(ss, es, ',');
        std::getline(ss, tols, ',');
        double t = std::strtod(ts.c_str(), nullptr);
        double expected = std::strtod(es.c_str(), nullptr);
        double rel_tol = std::strtod(tols.c_str(), nullptr);
        const std::vector<double>* coords = nullptr;
        for (const auto& [pname, c] : cfg.points)
            if (pname == name) coords = &c;
        if (!coords)
            throw ConfigError("check: expected-values row " + std::to_string(lineno) +
                              " names unknown point '" + name + "'");
        double got =
            gauss_operator(domain, density, field, to_vec(*coords), KernelParams(t, cfg.eta), qopt)
                .value;
        double rel = std::abs(got - expected) / std::max(1e-300, std::abs(expected));
        if (!(rel <= rel_tol)) {
            out.passed = false;
            char buf[256];
            std::snprintf(buf, sizeof(buf), "%s t=%.6g: got %.9g, expected %.9g (rel %.3g > %.3g)",
                          name.c_str(), t, got, expected, rel, rel_tol);
            out.failures.push_back(buf);
        }
    }
    return out;
}

}  // namespace kinklap
