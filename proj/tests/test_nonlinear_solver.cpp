#include <doctest.h>

#include "plap/calculus.hpp"
#include "plap/nonlinear_solver.hpp"

#include <cmath>
#include <numbers>

using namespace plap;
using std::numbers::pi;

namespace {

// Hand-set constants in the range measured on the unit square.
ConstantsReport fake_constants()
{
    ConstantsReport c;
    c.C1 = 1.0;
    c.C2_of_q = {{2.0, 1.0}, {4.0, 1.05}};
    c.C3_of_q = {{4.0, 0.3}};
    return c;
}

VectorField smooth_u(const Grid& g, int N)
{
    return field_from_fn(g, N, [N](const Point& x, std::span<double> out) {
        for (int i = 0; i < N; ++i) {
            out[i] = (0.5 + 0.3 * i) * std::sin(pi * x[0]) * std::sin((1 + i) * pi * x[1]) +
                     0.2 * std::sin(2 * pi * x[0]) * std::sin(pi * x[1]);
        }
    });
}

// Source that makes u an exact discrete solution of the nondivergence system.
VectorField manufactured_f(const VectorField& u, const SolverConfig& cfg)
{
    const VectorField zero(u.grid(), u.components());
    auto f = nondivergence_residual(u, zero, cfg);
    const Jet jet(u);
    const auto gm = jet.grad_magnitude();
    for (const std::size_t node : u.grid().interior_nodes()) {
        const double coef = std::pow(cfg.mu + gm[node], 2.0 - cfg.p);
        for (int i = 0; i < u.components(); ++i) {
            f.at(i, node) /= coef;
        }
    }
    return f;
}

} // namespace

TEST_CASE("r_of_q branches")
{
    CHECK(r_of_q(2, 2, 3) == doctest::Approx(2.0));
    CHECK(r_of_q(2, 1.5, 3) == doctest::Approx(2.4));
    CHECK(r_of_q(5, 1.5, 3) == 5.0);
    // Both branches meet at q = n.
    CHECK(r_of_q(3, 1.3, 3) == doctest::Approx(3.0));
    CHECK(r_of_q(2.9999999, 1.3, 3) == doctest::Approx(3.0));
    CHECK(r_of_q(2.5, 1.6, 3) > 2.5);
}

TEST_CASE("admissible_p_min")
{
    CHECK(admissible_p_min(1.0) == 1.0);
    CHECK(admissible_p_min(2.0) == 1.5);
    CHECK(admissible_p_min(4.0) == 1.75);
    CHECK_THROWS_AS(admissible_p_min(0.0), ConfigError);
}

TEST_CASE("compute_a closed forms")
{
    CHECK(compute_a(0.5, 0.7, 2.0) == doctest::Approx(6.0).epsilon(1e-10));
    CHECK(compute_a(1.0, 0.7, 2.0) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(compute_a(1.0, 1.0, 1.5) == doctest::Approx(3.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-10));
    CHECK_THROWS_AS(compute_a(0.0, 1.0, 1.5), ConfigError);
    CHECK_THROWS_AS(compute_a(-0.1, 1.0, 1.5), ConfigError);
}

TEST_CASE("compute_a is minimal and feasible")
{
    for (const double p : {1.2, 1.5, 1.8, 1.95}) {
        for (const double c3 : {0.1, 1.0, 5.0}) {
            for (const double delta : {0.05, 0.5, 1.0}) {
                const double a = compute_a(delta, c3, p);
                auto g = [&](double x) {
                    return x * delta - 1.0 - 2.0 * std::pow(c3, 2 - p) * std::pow(x, 2 - p);
                };
                CHECK(g(a) >= 0.0);
                CHECK(g(a * (1 - 1e-9)) < 0.0);
            }
        }
    }
}

TEST_CASE("ball radius examples")
{
    const auto g = Grid::unit(2, 17);
    const VectorField zero(g, 2);
    CHECK(ball_radius(3.0, zero, 4.0, 1.5, 2) == 0.0);
    const auto f = smooth_u(g, 2);
    CHECK(ball_radius(3.0, f, 4.0, 2.0, 2) == doctest::Approx(6.0 * lq_norm(f, 4.0)));
    const double R1 = ball_radius(3.0, f, 4.0, 1.6, 2);
    const double R8 = ball_radius(3.0, 8.0 * f, 4.0, 1.6, 2);
    CHECK(R8 <= std::pow(8.0, 1.0 / 0.6) * R1 * (1 + 1e-12));
    CHECK(R8 >= 8.0 * R1 * (1 - 1e-12));
}

TEST_CASE("validate rejects inadmissible configurations")
{
    const auto c = fake_constants();
    SolverConfig cfg;
    cfg.p = 1.7;
    CHECK_NOTHROW(validate(cfg, c, 2));
    auto bad = cfg;
    bad.q = 2.0;
    CHECK_THROWS_AS(validate(bad, c, 2), ConfigError); // q = n
    bad = cfg;
    bad.p = 1.0;
    CHECK_THROWS_AS(validate(bad, c, 2), ConfigError);
    bad = cfg;
    bad.mu = 0.0;
    CHECK_THROWS_AS(validate(bad, c, 2), ConfigError);
    bad = cfg;
    bad.q = 8.0; // not estimated
    CHECK_THROWS_AS(validate(bad, c, 2), ConfigError);
    bad = cfg;
    bad.p = 1.1; // (2-p) * 1.3125 > 1
    CHECK_THROWS_AS(validate(bad, c, 2), ConfigError);
    const auto bc = validate(cfg, c, 2);
    CHECK(bc.C2_used == doctest::Approx(1.25 * 1.05));
    CHECK(bc.delta == doctest::Approx(1 - 0.3 * 1.25 * 1.05));
}

TEST_CASE("apply_F at p = 2 ignores v; at v = 0 scales f by mu^(2-p)")
{
    const auto g = Grid::unit(2, 25);
    const auto f = random_sine_field(g, 2, 11, 0);
    SolverConfig cfg;
    cfg.p = 2.0;
    cfg.poisson_tol = 1e-12;
    const auto ref = solve_poisson(g, f, 1e-12).u;
    const auto out = apply_F(random_sine_field(g, 2, 11, 5), f, cfg).u;
    CHECK(lq_norm(out - ref, 2.0) <= 1e-10 * lq_norm(ref, 2.0));

    cfg.p = 1.6;
    cfg.mu = 0.3;
    const auto u0 = apply_F(VectorField(g, 2), f, cfg).u;
    const auto scaled = solve_poisson(g, std::pow(0.3, 0.4) * f, 1e-12).u;
    CHECK(lq_norm(u0 - scaled, 2.0) <= 1e-10 * lq_norm(scaled, 2.0));
}

TEST_CASE("linearized rhs respects the pointwise quotient bound")
{
    const auto g = Grid::unit(3, 9);
    SolverConfig cfg;
    cfg.p = 1.5;
    cfg.mu = 0.05;
    for (std::uint64_t i = 0; i < 5; ++i) {
        const auto v = random_sine_field(g, 3, 21, i);
        const auto lin = assemble_linearized_rhs(v, VectorField(g, 3), cfg);
        CHECK(lin.max_bound_ratio <= 1.0 + 1e-12);
        CHECK(lin.max_bound_ratio > 0.0);
    }
}

TEST_CASE("p = 2 collapse: one iteration from any start")
{
    const auto g = Grid::unit(2, 33);
    const auto f = random_sine_field(g, 2, 5, 1);
    SolverConfig cfg;
    cfg.p = 2.0;
    cfg.poisson_tol = 1e-12;
    const auto v0 = random_sine_field(g, 2, 5, 2);
    const auto res = solve_fixed_point(f, cfg, fake_constants(), &v0);
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    const auto ref = solve_poisson(g, f, 1e-12).u;
    CHECK(lq_norm(res.u - ref, 2.0) <= 1e-10 * lq_norm(ref, 2.0));
    CHECK(res.R == doctest::Approx(2 * res.constants.a * lq_norm(f, 4.0)));
}

TEST_CASE("zero source stays at zero")
{
    const auto g = Grid::unit(2, 17);
    SolverConfig cfg;
    cfg.p = 1.6;
    const auto res = solve_fixed_point(VectorField(g, 1), cfg, fake_constants());
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    CHECK(res.R == 0.0);
    for (const double v : res.u.values()) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("manufactured nondivergence problem is recovered")
{
    const auto g = Grid::unit(2, 33);
    SolverConfig cfg;
    cfg.p = 1.7;
    cfg.mu = 0.1;
    const auto u_ex = smooth_u(g, 2);
    const auto f = manufactured_f(u_ex, cfg);
    const auto res = solve_fixed_point(f, cfg, fake_constants());
    REQUIRE(res.converged);
    CHECK(res.ball_violations == 0);
    CHECK(w2q_norm(res.u - u_ex, cfg.q) <= 10 * cfg.picard_tol * std::max(1.0, res.R));

    const auto resid = nondivergence_residual(res.u, f, cfg);
    CHECK(lq_norm(resid, cfg.q) <= 10 * cfg.picard_tol * std::max(1.0, res.R));

    const double slack = 1e-8 * std::max(1.0, res.R);
    for (const auto& r : res.trace.records) {
        CHECK(r.chain_lhs <= r.chain_rhs + slack);
        if (r.lap_norm_q <= res.R) {
            CHECK(r.chain_lhs <= 1.05 * res.R);
        }
    }
}

TEST_CASE("iteration cap returns the best iterate unconverged")
{
    const auto g = Grid::unit(2, 17);
    SolverConfig cfg;
    cfg.p = 1.5;
    cfg.mu = 0.01;
    cfg.picard_max_iters = 2;
    const auto f = 50.0 * random_sine_field(g, 2, 3, 0);
    const auto res = solve_fixed_point(f, cfg, fake_constants());
    CHECK_FALSE(res.converged);
    CHECK(res.trace.records.size() == 2);
    CHECK(res.u.is_dirichlet_conforming());
}

TEST_CASE("trace serialization and determinism")
{
    const auto g = Grid::unit(2, 17);
    SolverConfig cfg;
    cfg.p = 1.8;
    const auto f = random_sine_field(g, 2, 8, 3);
    const auto a = solve_fixed_point(f, cfg, fake_constants());
    const auto b = solve_fixed_point(f, cfg, fake_constants());
    CHECK(a.trace.to_csv() == b.trace.to_csv());
    CHECK(a.trace.to_json().dump() == b.trace.to_json().dump());
    const auto csv = a.trace.to_csv();
    CHECK(csv.rfind("k,lap_norm_q,update_norm_q,theta,ball_violation", 0) == 0);
    CHECK(a.trace.to_json().size() == a.trace.records.size());
}

TEST_CASE("a priori ratio")
{
    const auto g = Grid::unit(2, 17);
    SolverConfig cfg;
    CHECK_FALSE(verify_apriori(VectorField(g, 1), VectorField(g, 1), cfg).has_value());
    cfg.p = 2.0;
    const auto f = random_sine_field(g, 1, 2, 0);
    const auto u = solve_poisson(g, f, 1e-12).u;
    const auto ratio = verify_apriori(u, f, cfg);
    REQUIRE(ratio.has_value());
    CHECK(*ratio == doctest::Approx(w2q_norm(u, 4.0) / (2 * lq_norm(f, 4.0))));
}

TEST_CASE("solver config JSON round trip")
{
    SolverConfig cfg;
    cfg.p = 1.65;
    cfg.picard_max_iters = 77;
    const auto back = solver_config_from_json(to_json(cfg));
    CHECK(back.p == 1.65);
    CHECK(back.picard_max_iters == 77);
    CHECK_THROWS_AS(solver_config_from_json(nlohmann::json{{"p", "x"}}), ConfigError);
}
