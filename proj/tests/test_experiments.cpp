#include <doctest.h>

#include "plap/experiments.hpp"
#include "plap/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace plap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / ("plap_test_experiments_" + name);
    fs::remove_all(dir);
    return dir;
}

int cli(std::vector<std::string> args, std::string* captured = nullptr)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (captured) {
        *captured = out.str() + err.str();
    }
    return code;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config JSON round trip")
{
    ExperimentConfig cfg;
    cfg.dims = 3;
    cfg.extents = {1.0, 2.0, 0.5};
    cfg.grids = {9, 17};
    cfg.components = 2;
    cfg.solver.p = 1.6;
    cfg.solver.mu = 0.02;
    cfg.source.kind = "random_sine";
    cfg.source.index = 3;
    cfg.mu_schedule = {0.1, 0.001};
    cfg.seed = 99;
    const auto back = experiment_config_from_json(to_json(cfg));
    CHECK(to_json(back) == to_json(cfg));

    // Partial documents keep the base values.
    const auto partial = experiment_config_from_json(nlohmann::json{{"seed", 5}});
    CHECK(partial.seed == 5);
    CHECK(partial.grids == ExperimentConfig{}.grids);

    CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json{{"seed", "x"}}), ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json::array()), ConfigError);
}

TEST_CASE("basic validation")
{
    ExperimentConfig cfg;
    CHECK_NOTHROW(validate_basic(cfg));
    cfg.dims = 4;
    CHECK_THROWS_AS(validate_basic(cfg), ConfigError);
    cfg = {};
    cfg.grids = {2};
    CHECK_THROWS_AS(validate_basic(cfg), ConfigError);
    cfg = {};
    cfg.extents = {1.0};
    CHECK_THROWS_AS(validate_basic(cfg), ConfigError);
}

TEST_CASE("exit codes for usage and configuration errors")
{
    const auto dir = scratch("codes");
    CHECK(cli({}) == 2);
    CHECK(cli({"frobnicate"}) == 2);
    CHECK(cli({"mms", "--grids", "17", "--out", dir.string()}) == 2);
    CHECK(cli({"solve", "--grids", "9,17", "--out", dir.string()}) == 2);
    CHECK(cli({"solve", "--p", "2.5", "--grids", "9", "--out", dir.string()}) == 2);
    CHECK(cli({"solve", "--mu", "0", "--grids", "9", "--out", dir.string()}) == 2);
    CHECK(cli({"solve", "--config", (dir / "missing.json").string()}) == 2);
    CHECK(cli({"report", "--out", (dir / "empty").string()}) == 2);
    fs::remove_all(dir);
}

TEST_CASE("config file is overridden by flags")
{
    const auto dir = scratch("override");
    fs::create_directories(dir);
    ExperimentConfig cfg;
    cfg.grids = {9};
    cfg.solver.p = 1.9;
    cfg.constants_samples = 2;
    io::write_json(dir / "cfg.json", to_json(cfg));
    const auto out = dir / "run";
    REQUIRE(cli({"solve", "--config", (dir / "cfg.json").string(), "--p", "1.8", "--out",
                 out.string()}) == 0);
    const auto manifest = io::read_json(out / "manifest.json");
    CHECK(manifest["command"] == "solve");
    CHECK(manifest["config"]["solver"]["p"].get<double>() == doctest::Approx(1.8));
    CHECK(manifest["config"]["grids"] == nlohmann::json::array({9}));
    fs::remove_all(dir);
}

TEST_CASE("solve at p = 2 writes its artifacts and a manifest")
{
    const auto dir = scratch("solve");
    std::string text;
    REQUIRE(cli({"solve", "--p", "2", "--grids", "17", "--samples", "2", "--out", dir.string()},
                &text) == 0);
    for (const char* f : {"u.bin", "constants.json", "trace.csv", "trace.json", "report.json",
                          "manifest.json"}) {
        CHECK_MESSAGE(fs::exists(dir / f), f);
    }
    const auto report = io::read_json(dir / "report.json");
    CHECK(report["converged"] == true);
    CHECK(report["iterations"] == 1);
    CHECK(slurp(dir / "trace.csv").rfind("k,lap_norm_q,update_norm_q,theta,ball_violation", 0) == 0);
    const auto manifest = io::read_json(dir / "manifest.json");
    CHECK(manifest["tool"] == "plap");
    CHECK(manifest["version"] == kVersion);
    CHECK(manifest["outputs"].size() >= 5);

    REQUIRE(cli({"report", "--out", dir.string()}) == 0);
    CHECK(fs::exists(dir / "summary.json"));
    fs::remove_all(dir);
}

TEST_CASE("small inequality run finds no violations")
{
    const auto dir = scratch("ineq");
    REQUIRE(cli({"inequalities", "--samples", "3000", "--seed", "3", "--out", dir.string()}) == 0);
    const auto csv = slurp(dir / "inequalities.csv");
    CHECK(csv.rfind("name,samples,violations,worst_slack,empirical_constant\n", 0) == 0);
    const auto app = io::read_json(dir / "appendix.json");
    CHECK(app["violations"] == 0);
    fs::remove_all(dir);
}

TEST_CASE("refinement study at p = 2")
{
    ExperimentConfig cfg;
    cfg.grids = {17, 33};
    cfg.solver.p = 2.0;
    cfg.solver.mu = 0.1;
    cfg.constants_samples = 4;
    cfg.oracle_tol = 1e-11;
    const auto table = mms_study(cfg);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.all_converged());
    for (const auto& r : table.rows) {
        // Same-discretization data is reproduced to solver tolerance.
        CHECK(r.same_disc_err <= 1e-6);
        CHECK(r.fp_iterations == 1);
        // At p = 2 both solvers reduce to the same Poisson problem.
        CHECK(r.cross_dist <= 1e-8);
    }
    CHECK(table.rows[1].oracle_order == doctest::Approx(2.0).epsilon(0.15));
    CHECK(table.to_csv().rfind("m,h,same_disc_err,oracle_err,oracle_order", 0) == 0);
}

TEST_CASE("repeated runs are bit-identical")
{
    const auto dir = scratch("det");
    const std::vector<std::string> args{"continuation", "--p",       "1.8", "--grids", "9",
                                        "--schedule",   "0.1,0.01", "--out", dir.string()};
    REQUIRE(cli(args) == 0);
    const auto a = slurp(dir / "continuation.csv");
    const auto m = slurp(dir / "manifest.json");
    REQUIRE(cli(args) == 0);
    CHECK(slurp(dir / "continuation.csv") == a);
    CHECK(slurp(dir / "manifest.json") == m);
    fs::remove_all(dir);
}
