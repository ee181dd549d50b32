#pragma once

#include "plap/grid.hpp"
#include "plap/linear_elliptic.hpp"

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace plap {

/// Parameters of the regularized (mu > 0) nondivergence-form solve.
struct SolverConfig {
    double p = 2.0;
    double mu = 0.1;
    double q = 4.0;
    double picard_tol = 1e-8;
    int picard_max_iters = 500;
    double damping_theta = 1.0;
    /// Below this gradient magnitude the singular quotient is set to zero.
    double sing_guard = 1e-12;
    /// Multiplies the estimated constants before they are used.
    double safety_factor = 1.25;
    /// Relative tolerance of every inner Poisson solve.
    double poisson_tol = 1e-11;
};

nlohmann::json to_json(const SolverConfig& cfg);
SolverConfig solver_config_from_json(const nlohmann::json& doc, SolverConfig base = {});

/// Constants of the invariant-ball construction, raw and inflated.
struct BallConstants {
    double C2_raw = 0.0;
    double C3_raw = 0.0;
    double C2_used = 0.0;
    double C3_used = 0.0;
    /// 1 - (2-p) C2_used
    double delta = 0.0;
    /// Smallest a with 1 + 2 C3^(2-p) a^(2-p) <= a delta.
    double a = 0.0;
};

nlohmann::json to_json(const BallConstants& c);

/// Checks ranges, q != n and (2-p) C2_used < 1; throws ConfigError.
BallConstants validate(const SolverConfig& cfg, const ConstantsReport& constants, int n_dims);

/// Integrability exponent required of f for W^{2,q} regularity.
double r_of_q(double q, double p, int n);

/// 2 - 1/C2_used: every p strictly above it satisfies (2-p) C2_used < 1.
double admissible_p_min(double C2_used);

/// Minimal a > 0 with 1 + 2 C3^(2-p) a^(2-p) <= a delta (bisection, relative accuracy 1e-10).
double compute_a(double delta, double C3, double p);

/// R = a (||f||_q + ||f||_{r(q)}^(1/(p-1))).
double ball_radius(double a, const VectorField& f, double q, double p, int n);

/// (p-2) S(v) + f (mu + |grad v|)^(2-p), with S(v) the cubic term divided by
/// (mu + |grad v|)|grad v| (zero where |grad v| < sing_guard). Interior only.
struct LinearizedRhs {
    VectorField rhs;
    /// max over nodes of |S(v)| / (|grad v| |D^2 v| / (mu + |grad v|)); <= 1 up to rounding.
    double max_bound_ratio = 0.0;
};
LinearizedRhs assemble_linearized_rhs(const VectorField& v, const VectorField& f,
                                      const SolverConfig& cfg);

/// u = F(v): the Dirichlet solution of -lap_h u = (p-2) S(v) + f (mu + |grad v|)^(2-p).
/// The Poisson solve is warm-started from v.
PoissonSolution apply_F(const VectorField& v, const VectorField& f, const SolverConfig& cfg);

/// Pointwise residual of the nondivergence system,
/// -lap_h u - (p-2) S(u) - f (mu + |grad u|)^(2-p), on interior nodes.
VectorField nondivergence_residual(const VectorField& u, const VectorField& f,
                                   const SolverConfig& cfg);

struct IterationRecord {
    int k = 0;
    /// ||lap_h v_k||_q
    double lap_norm_q = 0.0;
    /// ||lap_h (v_{k+1} - v_k)||_q
    double update_norm_q = 0.0;
    double theta = 1.0;
    /// ||lap_h v_k||_q > R (beyond a 1e-8 max(1,R) rounding slack).
    bool ball_violation = false;
    /// ||lap_h F(v_k)||_q and the bound (2-p)||D^2 v_k||_q + ||f||_q + || |grad v_k|^(2-p) f ||_q.
    double chain_lhs = 0.0;
    double chain_rhs = 0.0;
    bool poisson_converged = true;
};

struct IterationTrace {
    std::vector<IterationRecord> records;

    std::string to_csv() const;
    nlohmann::json to_json() const;
};

struct FixedPointResult {
    VectorField u;
    IterationTrace trace;
    bool converged = false;
    /// Number of F applications that changed the iterate by more than the tolerance.
    int iterations = 0;
    double R = 0.0;
    BallConstants constants;
    int ball_violations = 0;
};

/// Damped Picard iteration v_{k+1} = (1-theta) v_k + theta F(v_k) from v0
/// (zero when not given). Stops when ||lap_h(v_{k+1}-v_k)||_q <= picard_tol max(1,R);
/// halves theta after three consecutive increases of the update norm. On
/// exhaustion returns the iterate with the smallest update, converged = false.
FixedPointResult solve_fixed_point(const VectorField& f, const SolverConfig& cfg,
                                   const ConstantsReport& constants,
                                   const VectorField* v0 = nullptr);

/// ||u||_{2,q} / (||f||_q + ||f||_{r(q)}^(1/(p-1))); nullopt when the denominator vanishes.
std::optional<double> verify_apriori(const VectorField& u, const VectorField& f,
                                     const SolverConfig& cfg);

} // namespace plap
