//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#include "kinklap/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace kinklap {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_doubles(const std::string& v, int line) {
    std::vector<double> out;
    std::istringstream iss(v);
    double x;
    while (iss >> x) out.push_back(x);
    if (out.empty()) throw ConfigError("line " + std::to_string(line) + ": expected numbers");
    return out;
}

double parse_double(const std::string& v, int line) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || trim(end).size())
        throw ConfigError("line " + std::to_string(line) + ": expected a number, got '" + v + "'");
    return x;
}

std::int64_t parse_int(const std::string& v, int line) {
    double x = parse_double(v, line);
    if (x != std::floor(x))
        throw ConfigError("line " + std::to_string(line) + ": expected an integer, got '" + v + "'");
    return static_cast<std::int64_t>(x);
}

std::string fmt_num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_nums(const std::vector<double>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ' ';
        out += fmt_num(vs[i]);
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    cfg.points.clear();
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    bool saw_schedule = false;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("line " + std::to_string(line) + ": malformed section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "domain" && section != "density" && section != "field" &&
                section != "points" && section != "grid" && section != "run" &&
                section != "schedule")
                throw ConfigError("line " + std::to_string(line) + ": unknown section [" + section +
                                  "]");
            if (section == "schedule") saw_schedule = true;
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(line) + ": key outside any section");

        if (section == "domain") {
            if (key == "shape") {
                if (val != "ball" && val != "box" && val != "orthant" && val != "cone" &&
                    val != "cusp")
                    throw ConfigError("line " + std::to_string(line) +
                                      ": shape must be ball|box|orthant|cone|cusp, got '" + val +
                                      "'");
                cfg.shape = val;
            }
            else if (key == "dim") cfg.dim = static_cast<int>(parse_int(val, line));
            else if (key == "radius") cfg.radius = parse_double(val, line);
            else if (key == "lengths") cfg.lengths = parse_doubles(val, line);
            else if (key == "depth") cfg.depth = static_cast<int>(parse_int(val, line));
            else if (key == "half_angle") cfg.half_angle = parse_double(val, line);
            else if (key == "axis") cfg.axis = parse_doubles(val, line);
            else if (key == "beta") cfg.beta_exponent = parse_double(val, line);
            else if (key == "distance_mode") cfg.distance_mode = val;
            else throw ConfigError("line " + std::to_string(line) + ": unknown domain key '" + key + "'");
        } else if (section == "density") {
            if (key == "kind") cfg.density_kind = val;
            else throw ConfigError("line " + std::to_string(line) + ": unknown density key '" + key + "'");
        } else if (section == "field") {
            if (key == "kind") cfg.field_kind = val;
            else throw ConfigError("line " + std::to_string(line) + ": unknown field key '" + key + "'");
        } else if (section == "points") {
            cfg.points.emplace_back(key, parse_doubles(val, line));
        } else if (section == "grid") {
            if (key == "kind") cfg.grid_kind = val;
            else if (key == "t_min") cfg.t_min = parse_double(val, line);
            else if (key == "t_max") cfg.t_max = parse_double(val, line);
            else if (key == "count") cfg.t_count = static_cast<int>(parse_int(val, line));
            else throw ConfigError("line " + std::to_string(line) + ": unknown grid key '" + key + "'");
        } else if (section == "run") {
            if (key == "n") cfg.n = parse_int(val, line);
            else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(val, line));
            else if (key == "eta") cfg.eta = parse_double(val, line);
            else if (key == "mode") cfg.mode = val;
            else if (key == "output") cfg.output = val;
            else if (key == "quad_rel_tol") cfg.quad_rel_tol = parse_double(val, line);
            else throw ConfigError("line " + std::to_string(line) + ": unknown run key '" + key + "'");
        } else {  // schedule
            if (key == "beta") cfg.schedule_beta = parse_double(val, line);
            else if (key == "c0") cfg.schedule_c0 = parse_double(val, line);
            else if (key == "trials") cfg.trials = static_cast<int>(parse_int(val, line));
            else if (key == "n_grid") {
                cfg.n_grid.clear();
                for (double v : parse_doubles(val, line))
                    cfg.n_grid.push_back(static_cast<std::int64_t>(v));
            } else
                throw ConfigError("line " + std::to_string(line) + ": unknown schedule key '" + key + "'");
        }
    }
    cfg.has_schedule = saw_schedule;

    if (cfg.mode != "discrete" && cfg.mode != "continuum" && cfg.mode != "predictor" &&
        cfg.mode != "all")
        throw ConfigError("run.mode must be discrete|continuum|predictor|all");
    if (cfg.grid_kind != "linear" && cfg.grid_kind != "log")
        throw ConfigError("grid.kind must be linear|log");
    if (cfg.distance_mode != "intrinsic" && cfg.distance_mode != "extrinsic")
        throw ConfigError("domain.distance_mode must be intrinsic|extrinsic");
    if (cfg.t_count < 0) throw ConfigError("grid.count must be nonnegative");
    if (cfg.t_count > 0) {
        if (!(cfg.t_min > 0.0 && cfg.t_min < 1.0 && cfg.t_max > 0.0 && cfg.t_max < 1.0))
            throw ConfigError("grid endpoints must be in (0, 1)");
        if (cfg.t_min > cfg.t_max) throw ConfigError("grid requires t_min <= t_max");
    }
    if (!(cfg.eta > 0.0 && cfg.eta < 0.5)) throw ConfigError("run.eta must be in (0, 1/2)");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& cfg) {
    std::string out;
    out += "[domain]\n";
    out += "shape = " + cfg.shape + "\n";
    out += "dim = " + std::to_string(cfg.dim) + "\n";
    if (cfg.shape == "ball") out += "radius = " + fmt_num(cfg.radius) + "\n";
    if (cfg.shape == "box" && !cfg.lengths.empty()) out += "lengths = " + fmt_nums(cfg.lengths) + "\n";
    if (cfg.shape == "orthant") out += "depth = " + std::to_string(cfg.depth) + "\n";
    if (cfg.shape == "cone") {
        out += "half_angle = " + fmt_num(cfg.half_angle) + "\n";
        if (!cfg.axis.empty()) out += "axis = " + fmt_nums(cfg.axis) + "\n";
    }
    if (cfg.shape == "cusp") out += "beta = " + fmt_num(cfg.beta_exponent) + "\n";
    out += "distance_mode = " + cfg.distance_mode + "\n";
    out += "\n[density]\nkind = " + cfg.density_kind + "\n";
    out += "\n[field]\nkind = " + cfg.field_kind + "\n";
    out += "\n[points]\n";
    for (const auto& [name, coords] : cfg.points) out += name + " = " + fmt_nums(coords) + "\n";
    out += "\n[grid]\n";
    out += "kind = " + cfg.grid_kind + "\n";
    out += "t_min = " + fmt_num(cfg.t_min) + "\n";
    out += "t_max = " + fmt_num(cfg.t_max) + "\n";
    out += "count = " + std::to_string(cfg.t_count) + "\n";
    out += "\n[run]\n";
    out += "n = " + std::to_string(cfg.n) + "\n";
    out += "seed = " + std::to_string(cfg.seed) + "\n";
    out += "eta = " + fmt_num(cfg.eta) + "\n";
    out += "mode = " + cfg.mode + "\n";
    out += "output = " + cfg.output + "\n";
    out += "quad_rel_tol = " + fmt_num(cfg.quad_rel_tol) + "\n";
    if (cfg.has_schedule) {
        out += "\n[schedule]\n";
        out += "beta = " + fmt_num(cfg.schedule_beta) + "\n";
        out += "c0 = " + fmt_num(cfg.schedule_c0) + "\n";
        std::string ns;
        for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
            if (i) ns += ' ';
            ns += std::to_string(cfg.n_grid[i]);
        }
        out += "n_grid = " + ns + "\n";
        out += "trials = " + std::to_string(cfg.trials) + "\n";
    }
    return out;
}

Domain make_domain(const ExperimentConfig& cfg) {
    DistanceMode mode =
        cfg.distance_mode == "intrinsic" ? DistanceMode::intrinsic : DistanceMode::extrinsic;
    if (cfg.shape == "ball") return Domain::ball(cfg.dim, cfg.radius, mode);
    if (cfg.shape == "box") {
        Vec lengths = cfg.lengths.empty() ? Vec(Vec::Ones(cfg.dim))
                                          : Eigen::Map<const Vec>(cfg.lengths.data(),
                                                                  static_cast<int>(cfg.lengths.size()));
        if (static_cast<int>(lengths.size()) != cfg.dim)
            throw ConfigError("domain.lengths must list dim values");
        return Domain::box(lengths, mode);
    }
    if (cfg.shape == "orthant") return Domain::orthant_model(cfg.dim, cfg.depth, mode);
    if (cfg.shape == "cone") {
        Vec axis;
        if (cfg.axis.empty()) {
            axis = Vec::Zero(cfg.dim);
            axis[cfg.dim - 1] = 1.0;
        } else {
            if (static_cast<int>(cfg.axis.size()) != cfg.dim)
                throw ConfigError("domain.axis must list dim values");
            axis = Eigen::Map<const Vec>(cfg.axis.data(), cfg.dim);
        }
        return Domain::cone(cfg.dim, cfg.half_angle, axis, mode);
    }
    if (cfg.shape == "cusp") return Domain::cusp_epigraph(cfg.dim, cfg.beta_exponent, mode);
    throw ConfigError("unknown domain.shape '" + cfg.shape + "'");
}

DensityField make_density(const ExperimentConfig& cfg, const Domain& domain) {
    if (cfg.density_kind == "uniform") return DensityField::uniform(domain);
    throw ConfigError("unknown density.kind '" + cfg.density_kind + "'");
}

ScalarField make_field(const ExperimentConfig& cfg) {
    if (cfg.field_kind == "coordinate_sum") return ScalarField::coordinate_sum(cfg.dim);
    throw ConfigError("unknown field.kind '" + cfg.field_kind + "'");
}

std::vector<double> make_t_grid(const ExperimentConfig& cfg) {
    std::vector<double> grid;
    if (cfg.t_count == 0) return grid;
    if (cfg.t_count == 1) {
        grid.push_back(cfg.t_max);
        return grid;
    }
    for (int j = 0; j < cfg.t_count; ++j) {
        double s = static_cast<double>(j) / (cfg.t_count - 1);
        if (cfg.grid_kind == "linear")
            grid.push_back(cfg.t_max + s * (cfg.t_min - cfg.t_max));
        else
            grid.push_back(cfg.t_max * std::pow(cfg.t_min / cfg.t_max, s));
    }
    return grid;
}

}  // namespace kinklap
