#pragma once

#include "plap/grid.hpp"
#include "plap/linear_elliptic.hpp"
#include "plap/nonlinear_solver.hpp"
#include "plap/oracle_minimizer.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace plap {

struct ContinuationRow {
    double mu = 0.0;
    /// ||u_mu||_{2,q} with the solver's q.
    double w2q_norm = 0.0;
    /// ||lap_h u_mu||_q / R, R the (mu-independent) ball radius.
    double ball_ratio = 0.0;
    /// ||u_mu - u_0||_{1,p}, u_0 the mu = 0 minimizer.
    double w1p_dist = 0.0;
    /// weak_residual of u_mu for the mu = 0 system.
    double weak_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct ContinuationReport {
    std::vector<double> mu_schedule;
    std::vector<ContinuationRow> rows;
    std::vector<VectorField> solutions;
    VectorField oracle_solution;
    EnergyReport oracle_report;
    double R = 0.0;
    bool monotone_envelope_ok = false;

    /// max / min of w2q_norm over the schedule (1 when all vanish).
    double w2q_spread() const;
    bool all_converged() const;

    nlohmann::json to_json() const;
    /// mu,w2q_norm,w1p_dist,weak_residual,iters,converged
    std::string to_csv() const;
};

struct ContinuationOptions {
    int weak_test_count = 8;
    std::uint64_t weak_seed = 1;
    int oracle_max_iters = 5000;
};

/// 10^-1, ..., 10^-k
std::vector<double> geometric_schedule(int k);

/// Solves at each mu of a strictly decreasing schedule in (0,1], warm-starting
/// from the previous solution, and compares against the mu = 0 minimizer.
/// Non-convergent inner solves are recorded and the run continues.
ContinuationReport run_continuation(const VectorField& f, const SolverConfig& cfg_base,
                                    const std::vector<double>& mu_schedule,
                                    const ConstantsReport& constants, double oracle_tol,
                                    const ContinuationOptions& options = {});

/// Running minimum of the distances decreases by at least 2x from the first to
/// the last entry, or ends below `floor`.
bool monotone_envelope(const std::vector<double>& distances, double floor);

} // namespace plap
