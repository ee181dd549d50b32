#pragma once

#include "plap/grid.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

namespace plap {

struct PoissonSolveReport {
    int iterations = 0;
    /// Discrete L^2 norm of -lap_h u - g over the interior.
    double residual = 0.0;
    bool converged = false;
};

struct PoissonSolution {
    VectorField u;
    PoissonSolveReport report;
};

struct PoissonOptions {
    /// Per-component CG iteration cap; 0 selects 20 x (interior node count).
    int max_iterations = 0;
    /// Starting iterate; its boundary values are ignored.
    const VectorField* initial_guess = nullptr;
};

/// Solves -lap_h u = g with u = 0 on the boundary, component by component,
/// by conjugate gradients on the (2n+1)-point Laplacian with Dirichlet rows
/// eliminated. Stops when ||-lap_h u - g||_2 <= tol * max(1, ||g||_2) (both
/// over the interior). Values of g on boundary nodes are ignored.
PoissonSolution solve_poisson(const Grid& grid, const VectorField& g, double tol,
                              const PoissonOptions& options = {});

/// Applies -lap_h on interior nodes (boundary entries of the result are zero).
VectorField negative_laplacian(const VectorField& u);

/// Interior-only discrete L^2 norm.
double interior_l2_norm(const VectorField& v);

/// Empirical Laplacian-estimate constants on a grid.
///
/// Every value is a supremum over the sampled fields, hence a lower bound on
/// the true discrete constant.
struct ConstantsReport {
    /// ||D^2 v||_2 <= C1 ||lap v||_2
    double C1 = 0.0;
    /// ||D^2 v||_q <= C2(q) ||lap v||_q
    std::map<double, double> C2_of_q;
    /// ||grad v||_{q*} (q < n) or ||grad v||_inf (q > n) <= C3(q) ||lap v||_q
    std::map<double, double> C3_of_q;
    /// min and max of C2(q)/q over the estimated q values.
    std::pair<double, double> K_band{0.0, 0.0};
    int sample_count = 0;
    int ascent_steps = 0;

    /// C2 at q (C1 when q = 2); throws ConfigError when q was not estimated.
    double C2(double q) const;
    double C3(double q) const;
};

nlohmann::json to_json(const ConstantsReport& report);
ConstantsReport constants_from_json(const nlohmann::json& doc);

/// max over sampled Dirichlet fields of ||D^2 v||_q / ||lap v||_q.
///
/// Even samples are sums of at most 8 sine modes with random amplitudes, each
/// improved by `ascent_steps` rounds of coordinate ascent on the amplitudes.
/// Odd samples are the discrete Poisson solutions for a Laplacian made of
/// sign jumps across random cell midplanes (full-spectrum sine sums). Sample i
/// depends only on (seed, i), so adding samples never lowers the estimate.
double estimate_C2(const Grid& grid, double q, int samples, int ascent_steps, std::uint64_t seed);

/// max over sampled Dirichlet fields of ||grad v||_{q*} / ||lap v||_q with
/// q* = nq/(n-q) when q < n, or ||grad v||_inf / ||lap v||_q when q > n.
double estimate_C3(const Grid& grid, double q, int samples, std::uint64_t seed,
                   int ascent_steps = 20);

/// Runs estimate_C2 (and estimate_C3 where defined) for every q in `qs`.
ConstantsReport estimate_constants(const Grid& grid, const std::vector<double>& qs, int samples,
                                   int ascent_steps, std::uint64_t seed);

/// Random sine-sum Dirichlet field (sample `index` of the family for `seed`).
/// Shared by the constant estimators and the randomized test-field generators.
VectorField random_sine_field(const Grid& grid, int components, std::uint64_t seed,
                              std::uint64_t index, int max_modes = 8, int max_wavenumber = 8);

} // namespace plap
