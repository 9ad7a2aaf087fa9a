//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kinklap/experiment.hpp"

using namespace kinklap;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config_dir() { return KINKLAP_CONFIG_DIR; }

std::string tmp_prefix(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("bundled configs parse and round-trip") {
    for (const char* name : {"ball.cfg", "cube.cfg", "determinism.cfg", "concentration_pass.cfg",
                             "concentration_fail.cfg"}) {
        ExperimentConfig cfg = load_config(config_dir() + "/" + name);
        std::string emitted = emit_config(cfg);
        ExperimentConfig back = parse_config(emitted);
        CHECK(emit_config(back) == emitted);
    }
}

TEST_CASE("config errors carry line diagnostics") {
    CHECK_THROWS_WITH_AS(parse_config("[domain]\nshape == ball\n"),
                         doctest::Contains("line 2"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[nosuch]\nkey = 1\n"),
                         doctest::Contains("unknown section"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("key = 1\n"), doctest::Contains("outside any section"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[grid]\nkind = cubic\n"),
                         doctest::Contains("linear|log"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[run]\neta = 0.7\n"), doctest::Contains("eta"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[domain]\ndim = 2.5\n"),
                         doctest::Contains("integer"), ConfigError);
}

TEST_CASE("points outside the domain are rejected") {
    ExperimentConfig cfg = load_config(config_dir() + "/determinism.cfg");
    cfg.points.push_back({"bad", {2.0, 0.0, 0.0}});
    CHECK_THROWS_WITH_AS(run_table(cfg), doctest::Contains("outside the domain"), ConfigError);
}

TEST_CASE("empty t grid writes a header-only csv") {
    ExperimentConfig cfg = load_config(config_dir() + "/determinism.cfg");
    cfg.t_count = 0;
    cfg.n = 100;
    cfg.output = tmp_prefix("kl_empty");
    RunResult res = run_table(cfg);
    REQUIRE(res.csv_paths.size() == 2);
    for (const auto& p : res.csv_paths) {
        std::string content = slurp(p);
        CHECK(content == std::string(kReportCsvHeader) + "\n");
    }
}

TEST_CASE("run_table output is byte-identical across runs and thread counts") {
    ExperimentConfig cfg = load_config(config_dir() + "/determinism.cfg");
    cfg.n = 5000;
    cfg.t_count = 2;
    cfg.output = tmp_prefix("kl_det_a");
    setenv("KINKLAP_THREADS", "1", 1);
    RunResult a = run_table(cfg);
    cfg.output = tmp_prefix("kl_det_b");
    setenv("KINKLAP_THREADS", "8", 1);
    RunResult b = run_table(cfg);
    unsetenv("KINKLAP_THREADS");
    REQUIRE(a.csv_paths.size() == b.csv_paths.size());
    for (std::size_t i = 0; i < a.csv_paths.size(); ++i)
        CHECK(slurp(a.csv_paths[i]) == slurp(b.csv_paths[i]));
}

TEST_CASE("mode selects the populated columns") {
    ExperimentConfig cfg = load_config(config_dir() + "/determinism.cfg");
    cfg.n = 1000;
    cfg.t_count = 1;
    cfg.mode = "continuum";
    cfg.output = tmp_prefix("kl_modes");
    RunResult res = run_table(cfg);
    std::string content = slurp(res.csv_paths[0]);
    // second line: t,L_nt(empty),L_t(value),...
    std::string row = content.substr(content.find('\n') + 1);
    CHECK(row.find(",,") != std::string::npos);  // discrete cells left empty
    CHECK_FALSE(res.numeric_failure);
}

TEST_CASE("emit_plots writes one script per csv and validates headers") {
    ExperimentConfig cfg = load_config(config_dir() + "/determinism.cfg");
    cfg.n = 1000;
    cfg.t_count = 2;
    cfg.output = tmp_prefix("kl_plots");
    RunResult res = run_table(cfg);
    auto scripts = emit_plots(res.csv_paths);
    REQUIRE(scripts.size() == res.csv_paths.size());  // ball config: 2 points -> 2 scripts
    for (const auto& gp : scripts) {
        std::string content = slurp(gp);
        CHECK(content.find("set logscale x") != std::string::npos);
        CHECK(content.find("L_nt") != std::string::npos);
        CHECK(content.find("sqrt_t_L_t") != std::string::npos);
    }

    // single-row report still yields a valid script
    cfg.t_count = 1;
    cfg.output = tmp_prefix("kl_plots1");
    RunResult res1 = run_table(cfg);
    CHECK(emit_plots(res1.csv_paths).size() == res1.csv_paths.size());

    // missing columns are reported by name
    std::string bad = tmp_prefix("kl_badcols.csv");
    std::ofstream out(bad);
    out << "t,L_nt,quad_err\n0.05,1,0\n";
    out.close();
    CHECK_THROWS_WITH_AS(emit_plots({bad}), doctest::Contains("L_t"), ArgumentError);
}

TEST_CASE("cube config points reproduce the documented face and edge choices") {
    ExperimentConfig cfg = load_config(config_dir() + "/cube.cfg");
    REQUIRE(cfg.points.size() == 4);
    CHECK(cfg.points[1].first == "face");
    CHECK(cfg.points[1].second == std::vector<double>{0.5, 0.5, 1.0});
    CHECK(cfg.points[2].first == "edge");
    CHECK(cfg.points[2].second == std::vector<double>{0.5, 0.0, 0.0});
}

TEST_CASE("linear and log grids") {
    ExperimentConfig cfg;
    cfg.t_min = 0.01;
    cfg.t_max = 0.05;
    cfg.t_count = 20;
    cfg.grid_kind = "linear";
    auto lin = make_t_grid(cfg);
    REQUIRE(lin.size() == 20);
    CHECK(lin.front() == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(lin.back() == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(lin[6] == doctest::Approx(0.05 - 6.0 * 0.04 / 19.0).epsilon(1e-14));
    cfg.grid_kind = "log";
    auto lg = make_t_grid(cfg);
    CHECK(lg[10] == doctest::Approx(0.05 * std::pow(0.2, 10.0 / 19.0)).epsilon(1e-14));
}
