#include <doctest.h>

#include "plap/calculus.hpp"
#include "plap/linear_elliptic.hpp"

#include <cmath>
#include <numbers>

using namespace plap;
using std::numbers::pi;

namespace {

VectorField sine_rhs(const Grid& g)
{
    return field_from_fn(g, 1, [](const Point& x, std::span<double> out) {
        out[0] = 2 * pi * pi * std::sin(pi * x[0]) * std::sin(pi * x[1]);
    });
}

double max_error_vs_sine(const VectorField& u)
{
    const auto& g = u.grid();
    double err = 0.0;
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        const auto x = g.position(node);
        err = std::max(err, std::abs(u.at(0, node) - std::sin(pi * x[0]) * std::sin(pi * x[1])));
    }
    return err;
}

} // namespace

TEST_CASE("Poisson solve recovers the sine solution at second order")
{
    const auto g33 = Grid::unit(2, 33);
    const auto g65 = Grid::unit(2, 65);
    const auto s33 = solve_poisson(g33, sine_rhs(g33), 1e-12);
    const auto s65 = solve_poisson(g65, sine_rhs(g65), 1e-12);
    CHECK(s33.report.converged);
    CHECK(s65.report.converged);
    CHECK(s65.u.is_dirichlet_conforming());
    const double e33 = max_error_vs_sine(s33.u);
    const double e65 = max_error_vs_sine(s65.u);
    CHECK(e65 < 1e-3);
    CHECK(e33 / e65 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("Poisson round trip and report")
{
    const auto g = Grid::unit(3, 11);
    const auto rhs = random_sine_field(g, 2, 17, 0);
    const double tol = 1e-10;
    const auto sol = solve_poisson(g, rhs, tol);
    CHECK(sol.report.converged);
    CHECK(sol.report.residual <= tol * std::max(1.0, interior_l2_norm(rhs)));
    const auto back = negative_laplacian(sol.u);
    auto diff = back - rhs;
    CHECK(interior_l2_norm(diff) <= tol * std::max(1.0, interior_l2_norm(rhs)) * 1.0001);
}

TEST_CASE("zero right-hand side gives exactly zero")
{
    const auto g = Grid::unit(2, 17);
    const auto sol = solve_poisson(g, VectorField(g, 2), 1e-10);
    CHECK(sol.report.converged);
    CHECK(sol.report.iterations == 0);
    for (const double v : sol.u.values()) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("superposition")
{
    const auto g = Grid::unit(2, 25);
    const auto g1 = random_sine_field(g, 1, 3, 0);
    const auto g2 = random_sine_field(g, 1, 3, 1);
    const double tol = 1e-11;
    const auto a = solve_poisson(g, g1, tol).u;
    const auto b = solve_poisson(g, g2, tol).u;
    const auto ab = solve_poisson(g, g1 + g2, tol).u;
    const auto diff = ab - (a + b);
    CHECK(lq_norm(diff, 2.0) <= 1e-9 * lq_norm(ab, 2.0));
}

TEST_CASE("discrete maximum principle spot check")
{
    const auto g = Grid::unit(2, 21);
    const auto rhs = field_from_fn(g, 1, [](const Point& x, std::span<double> out) {
        out[0] = std::exp(-20 * ((x[0] - 0.3) * (x[0] - 0.3) + (x[1] - 0.6) * (x[1] - 0.6)));
    });
    const double tol = 1e-10;
    const auto sol = solve_poisson(g, rhs, tol);
    for (const double v : sol.u.values()) {
        CHECK(v >= -tol);
    }
}

TEST_CASE("iteration cap is reported, not thrown")
{
    const auto g = Grid::unit(2, 33);
    PoissonOptions opt;
    opt.max_iterations = 3;
    const auto bump = field_from_fn(g, 1, [](const Point& x, std::span<double> out) {
        out[0] = std::exp(-30 * ((x[0] - 0.4) * (x[0] - 0.4) + (x[1] - 0.7) * (x[1] - 0.7)));
    });
    const auto sol = solve_poisson(g, bump, 1e-12, opt);
    CHECK_FALSE(sol.report.converged);
    CHECK(sol.report.residual > 0.0);
}

TEST_CASE("C2 at q = 2 on the unit square is close to the convex-domain value 1")
{
    const auto g = Grid::unit(2, 33);
    const double c2 = estimate_C2(g, 2.0, 16, 30, 7);
    CHECK(c2 >= 0.9);
    CHECK(c2 <= 1.2);
}

TEST_CASE("single eigenmode ratio is at most 1 + O(h^2)")
{
    const auto g = Grid::unit(2, 33);
    const auto v = field_from_fn(g, 1, [](const Point& x, std::span<double> out) {
        out[0] = std::sin(pi * x[0]) * std::sin(pi * x[1]);
    });
    const Jet jet(v);
    const double ratio = lq_norm(jet.hess_magnitude(), 2.0, g) / lq_norm(jet.lap_magnitude(), 2.0, g);
    const double h = g.spacing(0);
    CHECK(ratio <= 1.0 + 10 * h * h);
    CHECK(ratio > 0.9);
}

TEST_CASE("C2 estimate is a supremum over a growing sample prefix")
{
    const auto g = Grid::unit(2, 17);
    double prev = 0.0;
    for (const int samples : {1, 2, 4, 8}) {
        const double c = estimate_C2(g, 4.0, samples, 10, 99);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("C2(q) profile over q = 2, 4, 8, 16")
{
    const auto g = Grid::unit(2, 33);
    std::vector<double> c;
    for (const double q : {2.0, 4.0, 8.0, 16.0}) {
        c.push_back(estimate_C2(g, q, 16, 30, 5));
    }
    for (std::size_t i = 1; i < c.size(); ++i) {
        CHECK(c[i] >= c[i - 1]);
    }
    double lo = 1e300, hi = 0.0;
    const double qs[] = {2.0, 4.0, 8.0, 16.0};
    for (std::size_t i = 0; i < c.size(); ++i) {
        lo = std::min(lo, c[i] / qs[i]);
        hi = std::max(hi, c[i] / qs[i]);
    }
    CHECK(hi / lo <= 10.0);
}

TEST_CASE("C3 branch selection and errors")
{
    const auto g2 = Grid::unit(2, 17);
    const auto g3 = Grid::unit(3, 9);
    const double c_3d = estimate_C3(g3, 4.0, 4, 1); // q > n = 3: sup norm branch
    CHECK(std::isfinite(c_3d));
    CHECK(c_3d > 0.0);
    const double c_2d = estimate_C3(g2, 4.0, 4, 1);
    CHECK(std::isfinite(c_2d));
    CHECK(c_2d > 0.0);
    // q < n branch: q* = nq/(n-q) = 15 for n = 3, q = 2.5.
    const double c_qstar = estimate_C3(g3, 2.5, 4, 1);
    CHECK(std::isfinite(c_qstar));
    CHECK_THROWS_AS(estimate_C3(g3, 3.0, 4, 1), ConfigError);
    CHECK_THROWS_AS(estimate_C3(g2, 2.0, 4, 1), ConfigError);
}

TEST_CASE("constants report JSON round trip")
{
    const auto g = Grid::unit(2, 17);
    const auto r = estimate_constants(g, {2.0, 4.0}, 4, 5, 3);
    CHECK(r.C1 > 0.0);
    CHECK(r.C2(2.0) == r.C1);
    CHECK(r.C3(4.0) > 0.0);
    CHECK_THROWS_AS(r.C2(8.0), ConfigError);
    const auto back = constants_from_json(to_json(r));
    CHECK(back.C1 == r.C1);
    CHECK(back.C2_of_q == r.C2_of_q);
    CHECK(back.C3_of_q == r.C3_of_q);
    CHECK(back.K_band == r.K_band);
}
