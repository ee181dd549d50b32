#include <doctest.h>

#include "plap/calculus.hpp"
#include "plap/continuation.hpp"

#include <cmath>
#include <numbers>

using namespace plap;

namespace {

ConstantsReport constants()
{
    ConstantsReport c;
    c.C1 = 1.0;
    c.C2_of_q = {{2.0, 1.0}, {4.0, 1.05}};
    c.C3_of_q = {{4.0, 0.25}};
    return c;
}

VectorField smooth_f(const Grid& g)
{
    return field_from_fn(g, 1, [](const Point& x, std::span<double> out) {
        out[0] = 10 * std::sin(std::numbers::pi * x[0]) * std::sin(std::numbers::pi * x[1]);
    });
}

} // namespace

TEST_CASE("schedule helpers")
{
    const auto s = geometric_schedule(3);
    REQUIRE(s.size() == 3);
    CHECK(s[0] == doctest::Approx(0.1));
    CHECK(s[2] == doctest::Approx(1e-3));
    CHECK_THROWS_AS(geometric_schedule(0), ConfigError);
    CHECK(monotone_envelope({1.0, 0.8, 0.45}, 1e-9));
    CHECK(monotone_envelope({1.0, 0.3, 0.9}, 1e-9)); // running minimum
    CHECK_FALSE(monotone_envelope({1.0, 0.9, 0.8}, 1e-9));
    CHECK(monotone_envelope({1e-12, 1e-12}, 1e-9));
}

TEST_CASE("invalid schedules are rejected")
{
    const auto g = Grid::unit(2, 9);
    SolverConfig cfg;
    cfg.p = 1.8;
    const auto f = smooth_f(g);
    CHECK_THROWS_AS(run_continuation(f, cfg, {}, constants(), 1e-8), ConfigError);
    CHECK_THROWS_AS(run_continuation(f, cfg, {0.1, 0.1}, constants(), 1e-8), ConfigError);
    CHECK_THROWS_AS(run_continuation(f, cfg, {2.0, 0.1}, constants(), 1e-8), ConfigError);
    CHECK_THROWS_AS(run_continuation(f, cfg, {0.1, 0.0}, constants(), 1e-8), ConfigError);
    cfg.p = 1.0;
    CHECK_THROWS_AS(run_continuation(f, cfg, {0.1}, constants(), 1e-8), ConfigError);
}

TEST_CASE("p = 2: every solution is the Poisson solution")
{
    const auto g = Grid::unit(2, 17);
    SolverConfig cfg;
    cfg.p = 2.0;
    cfg.poisson_tol = 1e-12;
    const auto f = smooth_f(g);
    const auto rep = run_continuation(f, cfg, geometric_schedule(3), constants(), 1e-11);
    CHECK(rep.all_converged());
    const auto ref = solve_poisson(g, f, 1e-12).u;
    for (const auto& u : rep.solutions) {
        CHECK(lq_norm(u - ref, 2.0) <= 1e-9 * lq_norm(ref, 2.0));
    }
    for (const auto& r : rep.rows) {
        CHECK(r.w1p_dist <= 1e-7);
    }
    CHECK(rep.w2q_spread() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zero source gives zero everywhere")
{
    const auto g = Grid::unit(2, 9);
    SolverConfig cfg;
    cfg.p = 1.7;
    const auto rep = run_continuation(VectorField(g, 2), cfg, geometric_schedule(2), constants(), 1e-8);
    for (const auto& r : rep.rows) {
        CHECK(r.w2q_norm == 0.0);
        CHECK(r.w1p_dist == 0.0);
    }
    CHECK(rep.w2q_spread() == 1.0);
    CHECK(rep.monotone_envelope_ok);
}

TEST_CASE("p < 2: bounded norms, decreasing distance envelope, serialization")
{
    const auto g = Grid::unit(2, 17);
    SolverConfig cfg;
    cfg.p = 1.8;
    const auto f = smooth_f(g);
    const auto rep = run_continuation(f, cfg, geometric_schedule(4), constants(), 1e-9);
    CHECK(rep.all_converged());
    CHECK(rep.w2q_spread() <= 2.0);
    CHECK(rep.monotone_envelope_ok);
    for (const auto& r : rep.rows) {
        CHECK(r.ball_ratio <= 1.0);
    }
    const auto csv = rep.to_csv();
    CHECK(csv.rfind("mu,w2q_norm,w1p_dist,weak_residual,iters,converged\n", 0) == 0);
    CHECK(rep.to_json()["rows"].size() == 4);
    const auto again = run_continuation(f, cfg, geometric_schedule(4), constants(), 1e-9);
    CHECK(again.to_csv() == csv);
}
