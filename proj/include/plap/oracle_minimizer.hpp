#pragma once

#include "plap/grid.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace plap {

/// psi(t) = (mu+t)^p/p - mu (mu+t)^(p-1)/(p-1) + mu^p/(p(p-1)), so psi(0) = 0 and
/// psi'(t) = (mu+t)^(p-2) t. Evaluated by series when t is small against mu.
double psi(double t, double p, double mu);
double psi_prime(double t, double p, double mu);
/// psi(t + dt) - psi(t) without cancellation when |dt| is small against mu + t.
double psi_difference(double t, double dt, double p, double mu);

/// Discrete energy
///   J(u) = sum_cells sum_corners psi(|G_corner u|) cellvol/2^n - sum_interior f.u cellvol,
/// where G_corner uses the forward edge differences of the cell meeting at that corner.
/// At p = 2 the Euler-Lagrange operator is the (2n+1)-point Laplacian.
double energy(const VectorField& u, const VectorField& f, double p, double mu);

/// J(u + alpha d) - J(u), accumulated per corner without cancellation.
double energy_difference(const VectorField& u, const VectorField& d, double alpha,
                         const VectorField& f, double p, double mu);

/// dJ/du divided by cellvol on interior nodes (zero on the boundary), i.e. the
/// gradient for the interior inner product <a,b> = cellvol sum_interior a.b:
/// -div_h((mu+|G u|)^(p-2) G u) - f. At mu = 0 the flux vanishes where G u = 0.
VectorField energy_gradient(const VectorField& u, const VectorField& f, double p, double mu);

/// <a,b> = cellvol sum_interior a.b
double interior_dot(const VectorField& a, const VectorField& b);

/// sum_cells sum_corners flux(G u).G phi cellvol/2^n - sum_interior f.phi cellvol,
/// computed by direct pairing (not through energy_gradient).
double weak_action(const VectorField& u, const VectorField& phi, const VectorField& f, double p,
                   double mu);

/// max over `test_count` random Dirichlet sine fields phi with ||phi||_2 = 1 of |weak_action|.
double weak_residual(const VectorField& u, const VectorField& f, double p, double mu,
                     int test_count, std::uint64_t seed);

struct EnergyReport {
    double energy = 0.0;
    /// Interior discrete L^2 norm of energy_gradient.
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

nlohmann::json to_json(const EnergyReport& r);

struct MinimizeResult {
    VectorField u;
    EnergyReport report;
    /// J after every accepted step, starting with J(u0); nonincreasing.
    std::vector<double> energy_history;
};

struct MinimizeOptions {
    double tol = 1e-8;
    int max_iters = 2000;
    /// Limited-memory depth; 0 gives preconditioned steepest descent.
    int memory = 8;
    const VectorField* initial_guess = nullptr;
};

/// Minimizes J by preconditioned L-BFGS (initial inverse Hessian a scaled
/// inverse discrete Laplacian) with Armijo backtracking on exact energy
/// differences. Converged when ||grad J||_2 <= tol max(1, ||f||_2).
MinimizeResult minimize(const VectorField& f, double p, double mu, const MinimizeOptions& options);

enum class Discretization { nondivergence, variational };

Discretization discretization_from_string(const std::string& name);

struct ManufacturedProblem {
    VectorField u_exact;
    VectorField f;
};

/// Samples u_exact and applies the chosen discrete operator to it, so that the
/// sample is an exact discrete solution. Nondivergence: f = [-lap_h u - (p-2) S(u)]
/// (mu+|grad u|)^(p-2). Variational: f = -div_h flux. Throws ConfigError when
/// u_exact does not vanish on the boundary or when mu = 0 with nondivergence.
ManufacturedProblem manufactured_problem(const PointFn& u_exact_fn, int components, double p,
                                         double mu, const Grid& grid, Discretization disc);

/// u_i(x) = amplitude_i prod_a sin(k_{i,a} pi x_a / L_a), with value, gradient and
/// Hessian in closed form. Used for sources evaluated from the continuous operator.
struct SineProduct {
    std::vector<double> amplitude;
    std::vector<std::array<int, 3>> wavenumber;
    std::array<double, 3> extent{1.0, 1.0, 1.0};
    int dims = 2;

    int components() const { return static_cast<int>(amplitude.size()); }
    void value(const Point& x, std::span<double> out) const;
    /// N x n
    void gradient(const Point& x, std::span<double> out) const;
    /// N x n x n
    void hessian(const Point& x, std::span<double> out) const;
};

/// Component i: amplitude 1/(1+i) (even i) or -0.6/i (odd i), wavenumbers (1, 1+i, 1).
SineProduct default_sine_product(const Grid& grid, int components);

/// Samples the exact solution on the grid.
VectorField sample(const SineProduct& s, const Grid& grid);

/// f = (mu+|grad u|)^(p-2) [-lap u - (p-2) S(u)] from the exact derivatives, with
/// S(u) = 0 where |grad u| = 0. This is the data for which u solves both the
/// nondivergence and the divergence form of the system.
VectorField continuous_source(const SineProduct& s, const Grid& grid, double p, double mu);

} // namespace plap
