#include "plap/oracle_minimizer.hpp"

#include "plap/calculus.hpp"
#include "plap/linear_elliptic.hpp"
#include "plap/nonlinear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

namespace plap {

namespace {

void check_exponents(double p, double mu)
{
    if (!(p > 1.0 && p <= 2.0)) {
        throw ConfigError("p must lie in (1,2]");
    }
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
        throw ConfigError("mu must be finite and nonnegative");
    }
}

void check_pair(const VectorField& a, const VectorField& b)
{
    if (!(a.grid() == b.grid()) || a.components() != b.components()) {
        throw ConfigError("fields must share grid and component count");
    }
}

// (mu + t)^(p-2), extended by 0 at t = mu = 0.
double flux_coefficient(double t, double p, double mu)
{
    const double s = mu + t;
    return s > 0.0 ? std::pow(s, p - 2.0) : 0.0;
}

// Cells are indexed by their lowest node. Corner k of a cell sits at
// base + corner_offset[k]; its gradient along axis a is the difference over
// the cell edge (edge_lo, edge_hi)[k][a].
struct CellLayout {
    std::vector<std::size_t> bases;
    int corners = 0;
    std::vector<std::array<std::size_t, 3>> edge_lo;
    std::vector<std::array<std::size_t, 3>> edge_hi;
    std::array<double, 3> inv_h{};
    double corner_weight = 0.0;

    explicit CellLayout(const Grid& g)
    {
        const int n = g.dims();
        for (std::size_t node = 0; node < g.node_count(); ++node) {
            const auto idx = g.index(node);
            bool ok = true;
            for (int a = 0; a < n; ++a) {
                ok = ok && idx[a] < g.resolution(a) - 1;
            }
            if (ok) {
                bases.push_back(node);
            }
        }
        corners = 1 << n;
        edge_lo.resize(corners);
        edge_hi.resize(corners);
        for (int k = 0; k < corners; ++k) {
            for (int a = 0; a < n; ++a) {
                std::size_t lo = 0;
                for (int b = 0; b < n; ++b) {
                    if (b != a && (k >> b & 1)) {
                        lo += g.stride(b);
                    }
                }
                edge_lo[k][a] = lo;
                edge_hi[k][a] = lo + g.stride(a);
            }
        }
        for (int a = 0; a < n; ++a) {
            inv_h[a] = 1.0 / g.spacing(a);
        }
        corner_weight = g.cell_volume() / corners;
    }

    // G (N x n) of `field` at corner k of the cell with lowest node `base`.
    void corner_gradient(const VectorField& field, std::size_t base, int k, int n,
                         std::span<double> G) const
    {
        const int N = field.components();
        for (int i = 0; i < N; ++i) {
            for (int a = 0; a < n; ++a) {
                G[i * n + a] = (field.at(i, base + edge_hi[k][a]) - field.at(i, base + edge_lo[k][a])) *
                               inv_h[a];
            }
        }
    }
};

double norm(std::span<const double> v)
{
    double s = 0.0;
    for (const double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

double source_pairing(const VectorField& f, const VectorField& v)
{
    return interior_dot(f, v);
}

// Gauss-Legendre nodes and weights on [-1, 1], 8 points.
constexpr std::array<double, 8> kGlX{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                      -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                      0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlW{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                      0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                      0.2223810344533745, 0.1012285362903763};

} // namespace

double psi(double t, double p, double mu)
{
    check_exponents(p, mu);
    if (t < 0.0) {
        throw ConfigError("psi needs t >= 0");
    }
    if (mu == 0.0) {
        return std::pow(t, p) / p;
    }
    if (p == 2.0) {
        return 0.5 * t * t;
    }
    const double x = t / mu;
    if (x < 0.1) {
        // sum_{k>=2} (k-1)(p-2)...(p-k+1)/k! x^k
        double prod = 1.0; // (p-2)...(p-k+1)
        double fact = 2.0;
        double xk = x * x;
        double sum = 0.5 * xk;
        for (int k = 3; k < 60; ++k) {
            prod *= p - (k - 1);
            fact *= k;
            xk *= x;
            const double term = (k - 1) * prod / fact * xk;
            sum += term;
            if (std::abs(term) <= 1e-18 * std::abs(sum)) {
                break;
            }
        }
        return std::pow(mu, p) * sum;
    }
    const double s = mu + t;
    return std::pow(s, p) / p - mu * std::pow(s, p - 1.0) / (p - 1.0) +
           std::pow(mu, p) / (p * (p - 1.0));
}

double psi_prime(double t, double p, double mu)
{
    check_exponents(p, mu);
    return t == 0.0 ? 0.0 : std::pow(mu + t, p - 2.0) * t;
}

double psi_difference(double t, double dt, double p, double mu)
{
    if (dt == 0.0) {
        return 0.0;
    }
    const double lo = std::min(t, t + dt);
    if (std::abs(dt) > 0.5 * (mu + lo)) {
        return psi(t + dt, p, mu) - psi(t, p, mu);
    }
    double s = 0.0;
    for (std::size_t k = 0; k < kGlX.size(); ++k) {
        const double x = t + 0.5 * dt * (1.0 + kGlX[k]);
        s += kGlW[k] * std::pow(mu + x, p - 2.0) * x;
    }
    return 0.5 * dt * s;
}

double interior_dot(const VectorField& a, const VectorField& b)
{
    check_pair(a, b);
    const Grid& g = a.grid();
    double s = 0.0;
    for (int i = 0; i < a.components(); ++i) {
        for (const std::size_t node : g.interior_nodes()) {
            s += a.at(i, node) * b.at(i, node);
        }
    }
    return s * g.cell_volume();
}

double energy(const VectorField& u, const VectorField& f, double p, double mu)
{
    check_exponents(p, mu);
    check_pair(u, f);
    const Grid& g = u.grid();
    const int n = g.dims();
    const CellLayout cells(g);
    std::vector<double> G(u.components() * n);
    double s = 0.0;
    for (const std::size_t base : cells.bases) {
        for (int k = 0; k < cells.corners; ++k) {
            cells.corner_gradient(u, base, k, n, G);
            s += psi(norm(G), p, mu);
        }
    }
    return s * cells.corner_weight - source_pairing(f, u);
}

double energy_difference(const VectorField& u, const VectorField& d, double alpha,
                         const VectorField& f, double p, double mu)
{
    check_exponents(p, mu);
    check_pair(u, f);
    check_pair(u, d);
    const Grid& g = u.grid();
    const int n = g.dims();
    const CellLayout cells(g);
    const std::size_t len = static_cast<std::size_t>(u.components() * n);
    std::vector<double> G(len), D(len);
    double s = 0.0;
    for (const std::size_t base : cells.bases) {
        for (int k = 0; k < cells.corners; ++k) {
            cells.corner_gradient(u, base, k, n, G);
            cells.corner_gradient(d, base, k, n, D);
            double gd = 0.0, dd = 0.0;
            for (std::size_t j = 0; j < len; ++j) {
                gd += G[j] * D[j];
                dd += D[j] * D[j];
            }
            if (dd == 0.0) {
                continue;
            }
            const double t1 = norm(G);
            double t2sq = 0.0;
            for (std::size_t j = 0; j < len; ++j) {
                const double v = G[j] + alpha * D[j];
                t2sq += v * v;
            }
            const double t2 = std::sqrt(t2sq);
            const double dt = t1 + t2 > 0.0 ? alpha * (2.0 * gd + alpha * dd) / (t1 + t2) : 0.0;
            s += psi_difference(t1, dt, p, mu);
        }
    }
    return s * cells.corner_weight - alpha * source_pairing(f, d);
}

VectorField energy_gradient(const VectorField& u, const VectorField& f, double p, double mu)
{
    check_exponents(p, mu);
    check_pair(u, f);
    const Grid& g = u.grid();
    const int n = g.dims();
    const int N = u.components();
    const CellLayout cells(g);
    std::vector<double> G(N * n);
    VectorField out(g, N);
    for (const std::size_t base : cells.bases) {
        for (int k = 0; k < cells.corners; ++k) {
            cells.corner_gradient(u, base, k, n, G);
            const double c = flux_coefficient(norm(G), p, mu);
            if (c == 0.0) {
                continue;
            }
            for (int i = 0; i < N; ++i) {
                for (int a = 0; a < n; ++a) {
                    const double w = c * G[i * n + a] * cells.inv_h[a];
                    out.at(i, base + cells.edge_hi[k][a]) += w;
                    out.at(i, base + cells.edge_lo[k][a]) -= w;
                }
            }
        }
    }
    // Corner weight / cellvol = 1 / corners.
    const double scale = 1.0 / cells.corners;
    for (int i = 0; i < N; ++i) {
        for (std::size_t node = 0; node < g.node_count(); ++node) {
            out.at(i, node) = g.is_boundary(node) ? 0.0 : out.at(i, node) * scale - f.at(i, node);
        }
    }
    return out;
}

double weak_action(const VectorField& u, const VectorField& phi, const VectorField& f, double p,
                   double mu)
{
    check_exponents(p, mu);
    check_pair(u, f);
    check_pair(u, phi);
    const Grid& g = u.grid();
    const int n = g.dims();
    const CellLayout cells(g);
    const std::size_t len = static_cast<std::size_t>(u.components() * n);
    std::vector<double> G(len), P(len);
    double s = 0.0;
    for (const std::size_t base : cells.bases) {
        for (int k = 0; k < cells.corners; ++k) {
            cells.corner_gradient(u, base, k, n, G);
            cells.corner_gradient(phi, base, k, n, P);
            double gp = 0.0;
            for (std::size_t j = 0; j < len; ++j) {
                gp += G[j] * P[j];
            }
            s += flux_coefficient(norm(G), p, mu) * gp;
        }
    }
    return s * cells.corner_weight - source_pairing(f, phi);
}

double weak_residual(const VectorField& u, const VectorField& f, double p, double mu,
                     int test_count, std::uint64_t seed)
{
    if (test_count < 1) {
        throw ConfigError("weak_residual needs at least one test field");
    }
    double worst = 0.0;
    for (int t = 0; t < test_count; ++t) {
        auto phi = random_sine_field(u.grid(), u.components(), seed, static_cast<std::uint64_t>(t));
        const double nrm = std::sqrt(interior_dot(phi, phi));
        if (nrm == 0.0) {
            continue;
        }
        phi *= 1.0 / nrm;
        worst = std::max(worst, std::abs(weak_action(u, phi, f, p, mu)));
    }
    return worst;
}

nlohmann::json to_json(const EnergyReport& r)
{
    return {{"energy", r.energy},
            {"gradient_norm", r.gradient_norm},
            {"iterations", r.iterations},
            {"converged", r.converged}};
}

MinimizeResult minimize(const VectorField& f, double p, double mu, const MinimizeOptions& options)
{
    check_exponents(p, mu);
    if (!(options.tol > 0.0)) {
        throw ConfigError("minimize tolerance must be positive");
    }
    if (options.max_iters < 0 || options.memory < 0) {
        throw ConfigError("iteration cap and memory must be nonnegative");
    }
    const Grid& grid = f.grid();
    MinimizeResult res{VectorField(grid, f.components()), {}, {}};
    VectorField& u = res.u;
    if (options.initial_guess != nullptr) {
        check_pair(*options.initial_guess, f);
        u = enforce_dirichlet(*options.initial_guess);
    }

    const double target = options.tol * std::max(1.0, std::sqrt(interior_dot(f, f)));
    auto precondition = [&](const VectorField& r) { return solve_poisson(grid, r, 1e-10).u; };

    struct Pair {
        VectorField s, y;
        double rho;
    };
    std::deque<Pair> memory;
    double gamma = 1.0;

    double J = energy(u, f, p, mu);
    res.energy_history.push_back(J);
    VectorField g = energy_gradient(u, f, p, mu);
    double gnorm = std::sqrt(interior_dot(g, g));

    int it = 0;
    for (; it < options.max_iters && gnorm > target; ++it) {
        // Two-loop recursion with H0 = gamma (-lap_h)^{-1}.
        VectorField q = g;
        std::vector<double> alphas(memory.size());
        for (std::size_t j = memory.size(); j-- > 0;) {
            alphas[j] = memory[j].rho * interior_dot(memory[j].s, q);
            axpy(-alphas[j], memory[j].y, q);
        }
        VectorField d = gamma * precondition(q);
        for (std::size_t j = 0; j < memory.size(); ++j) {
            const double beta = memory[j].rho * interior_dot(memory[j].y, d);
            axpy(alphas[j] - beta, memory[j].s, d);
        }
        d *= -1.0;
        double slope = interior_dot(g, d);
        if (!(slope < 0.0)) {
            memory.clear();
            d = -1.0 * precondition(g);
            slope = interior_dot(g, d);
        }

        double alpha = 1.0;
        double dJ = 0.0;
        bool accepted = false;
        for (int tries = 0; tries < 60; ++tries) {
            dJ = energy_difference(u, d, alpha, f, p, mu);
            if (dJ <= 1e-4 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (memory.empty()) {
                break; // no descent possible at working precision
            }
            memory.clear();
            continue;
        }

        VectorField s = alpha * d;
        u += s;
        J += dJ;
        res.energy_history.push_back(J);
        VectorField g_new = energy_gradient(u, f, p, mu);
        VectorField y = g_new - g;
        g = std::move(g_new);
        gnorm = std::sqrt(interior_dot(g, g));

        const double sy = interior_dot(s, y);
        if (options.memory > 0 && sy > 0.0) {
            const double sAs = interior_dot(s, negative_laplacian(s));
            if (sAs > 0.0) {
                gamma = sy / sAs;
            }
            memory.push_back({std::move(s), std::move(y), 1.0 / sy});
            if (static_cast<int>(memory.size()) > options.memory) {
                memory.pop_front();
            }
        }
    }

    res.report.energy = J;
    res.report.gradient_norm = gnorm;
    res.report.iterations = it;
    res.report.converged = gnorm <= target;
    return res;
}

Discretization discretization_from_string(const std::string& name)
{
    if (name == "nondivergence") {
        return Discretization::nondivergence;
    }
    if (name == "variational") {
        return Discretization::variational;
    }
    throw ConfigError("unknown discretization '" + name + "'");
}

ManufacturedProblem manufactured_problem(const PointFn& u_exact_fn, int components, double p,
                                         double mu, const Grid& grid, Discretization disc)
{
    check_exponents(p, mu);
    auto u = field_from_fn(grid, components, u_exact_fn);
    double bmax = 0.0, umax = 0.0;
    for (int i = 0; i < components; ++i) {
        for (std::size_t node = 0; node < grid.node_count(); ++node) {
            const double v = std::abs(u.at(i, node));
            umax = std::max(umax, v);
            if (grid.is_boundary(node)) {
                bmax = std::max(bmax, v);
            }
        }
    }
    if (bmax > 1e-12 * std::max(1.0, umax)) {
        throw ConfigError("manufactured solution does not vanish on the boundary");
    }
    u = enforce_dirichlet(u);
    const VectorField zero(grid, components);
    if (disc == Discretization::variational) {
        return {u, energy_gradient(u, zero, p, mu)};
    }
    if (!(mu > 0.0)) {
        throw ConfigError("the nondivergence discretization needs mu > 0");
    }
    SolverConfig cfg;
    cfg.p = p;
    cfg.mu = mu;
    auto f = nondivergence_residual(u, zero, cfg);
    const auto gm = Jet(u).grad_magnitude();
    for (const std::size_t node : grid.interior_nodes()) {
        const double c = std::pow(mu + gm[node], p - 2.0);
        for (int i = 0; i < components; ++i) {
            f.at(i, node) *= c;
        }
    }
    return {u, f};
}

void SineProduct::value(const Point& x, std::span<double> out) const
{
    using std::numbers::pi;
    for (int i = 0; i < components(); ++i) {
        double v = amplitude[i];
        for (int a = 0; a < dims; ++a) {
            v *= std::sin(wavenumber[i][a] * pi * x[a] / extent[a]);
        }
        out[i] = v;
    }
}

void SineProduct::gradient(const Point& x, std::span<double> out) const
{
    using std::numbers::pi;
    const int n = dims;
    for (int i = 0; i < components(); ++i) {
        std::array<double, 3> s{}, c{}, k{};
        for (int a = 0; a < n; ++a) {
            k[a] = wavenumber[i][a] * pi / extent[a];
            s[a] = std::sin(k[a] * x[a]);
            c[a] = std::cos(k[a] * x[a]);
        }
        for (int a = 0; a < n; ++a) {
            double v = amplitude[i] * k[a] * c[a];
            for (int b = 0; b < n; ++b) {
                if (b != a) {
                    v *= s[b];
                }
            }
            out[i * n + a] = v;
        }
    }
}

void SineProduct::hessian(const Point& x, std::span<double> out) const
{
    using std::numbers::pi;
    const int n = dims;
    for (int i = 0; i < components(); ++i) {
        std::array<double, 3> s{}, c{}, k{};
        for (int a = 0; a < n; ++a) {
            k[a] = wavenumber[i][a] * pi / extent[a];
            s[a] = std::sin(k[a] * x[a]);
            c[a] = std::cos(k[a] * x[a]);
        }
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                double v = amplitude[i];
                for (int e = 0; e < n; ++e) {
                    if (a == b && e == a) {
                        v *= -k[e] * k[e] * s[e];
                    } else if (e == a || e == b) {
                        v *= k[e] * c[e];
                    } else {
                        v *= s[e];
                    }
                }
                out[(i * n + a) * n + b] = v;
            }
        }
    }
}

SineProduct default_sine_product(const Grid& grid, int components)
{
    if (components < 1) {
        throw ConfigError("need at least one component");
    }
    SineProduct s;
    s.dims = grid.dims();
    for (int a = 0; a < s.dims; ++a) {
        s.extent[a] = grid.extent(a);
    }
    for (int i = 0; i < components; ++i) {
        s.amplitude.push_back(i % 2 == 0 ? 1.0 / (1 + i) : -0.6 / i);
        s.wavenumber.push_back({1, 1 + i, 1});
    }
    return s;
}

VectorField sample(const SineProduct& s, const Grid& grid)
{
    return enforce_dirichlet(field_from_fn(grid, s.components(),
                                           [&s](const Point& x, std::span<double> out) { s.value(x, out); }));
}

VectorField continuous_source(const SineProduct& s, const Grid& grid, double p, double mu)
{
    check_exponents(p, mu);
    if (!(mu > 0.0)) {
        throw ConfigError("continuous_source needs mu > 0 (the source is unbounded at critical points)");
    }
    const int N = s.components();
    const int n = s.dims;
    if (n != grid.dims()) {
        throw ConfigError("solution and grid dimensions differ");
    }
    std::vector<double> G(N * n), H(N * n * n), cubic(N);
    return field_from_fn(grid, N, [&](const Point& x, std::span<double> out) {
        s.gradient(x, G);
        s.hessian(x, H);
        const double gm = norm(G);
        const double coef = std::pow(mu + gm, p - 2.0);
        if (gm > 0.0) {
            cubic_contraction(G, H, N, n, cubic);
        }
        for (int i = 0; i < N; ++i) {
            double lap = 0.0;
            for (int a = 0; a < n; ++a) {
                lap += H[(i * n + a) * n + a];
            }
            const double S = gm > 0.0 ? cubic[i] / ((mu + gm) * gm) : 0.0;
            out[i] = coef * (-lap - (p - 2.0) * S);
        }
    });
}

} // namespace plap
