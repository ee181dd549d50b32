#include "plap/continuation.hpp"

#include "plap/calculus.hpp"
#include "plap/io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace plap {

double ContinuationReport::w2q_spread() const
{
    double lo = kInfNorm, hi = 0.0;
    for (const auto& r : rows) {
        lo = std::min(lo, r.w2q_norm);
        hi = std::max(hi, r.w2q_norm);
    }
    if (hi == 0.0) {
        return 1.0;
    }
    return lo > 0.0 ? hi / lo : kInfNorm;
}

bool ContinuationReport::all_converged() const
{
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.converged; }) &&
           oracle_report.converged;
}

nlohmann::json ContinuationReport::to_json() const
{
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"mu", r.mu},
                       {"w2q_norm", r.w2q_norm},
                       {"ball_ratio", r.ball_ratio},
                       {"w1p_dist", r.w1p_dist},
                       {"weak_residual", r.weak_residual},
                       {"iters", r.iterations},
                       {"converged", r.converged}});
    }
    return {{"mu_schedule", mu_schedule},
            {"rows", arr},
            {"R", R},
            {"w2q_spread", w2q_spread()},
            {"oracle", plap::to_json(oracle_report)},
            {"monotone_envelope_ok", monotone_envelope_ok}};
}

std::string ContinuationReport::to_csv() const
{
    std::ostringstream os;
    os << "mu,w2q_norm,w1p_dist,weak_residual,iters,converged\n";
    for (const auto& r : rows) {
        os << io::format_double(r.mu) << ',' << io::format_double(r.w2q_norm) << ','
           << io::format_double(r.w1p_dist) << ',' << io::format_double(r.weak_residual) << ','
           << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
    }
    return os.str();
}

std::vector<double> geometric_schedule(int k)
{
    if (k < 1) {
        throw ConfigError("schedule needs at least one entry");
    }
    std::vector<double> out;
    for (int i = 1; i <= k; ++i) {
        out.push_back(std::pow(10.0, -i));
    }
    return out;
}

bool monotone_envelope(const std::vector<double>& distances, double floor)
{
    if (distances.empty()) {
        return false;
    }
    double env = distances.front();
    for (const double d : distances) {
        env = std::min(env, d);
    }
    return env <= 0.5 * distances.front() || env < floor;
}

ContinuationReport run_continuation(const VectorField& f, const SolverConfig& cfg_base,
                                    const std::vector<double>& mu_schedule,
                                    const ConstantsReport& constants, double oracle_tol,
                                    const ContinuationOptions& options)
{
    if (mu_schedule.empty()) {
        throw ConfigError("empty mu schedule");
    }
    for (std::size_t i = 0; i < mu_schedule.size(); ++i) {
        const double mu = mu_schedule[i];
        if (!(mu > 0.0 && mu <= 1.0)) {
            throw ConfigError("schedule entries must lie in (0,1]");
        }
        if (i > 0 && !(mu < mu_schedule[i - 1])) {
            throw ConfigError("schedule must be strictly decreasing");
        }
    }
    if (!(oracle_tol > 0.0)) {
        throw ConfigError("oracle tolerance must be positive");
    }
    // Fails fast on an inadmissible configuration before any compute.
    auto probe = cfg_base;
    probe.mu = mu_schedule.front();
    validate(probe, constants, f.grid().dims());

    ContinuationReport rep{mu_schedule, {}, {}, VectorField(f.grid(), f.components()), {}, 0.0, false};
    MinimizeOptions mo;
    mo.tol = oracle_tol;
    mo.max_iters = options.oracle_max_iters;
    auto oracle = minimize(f, cfg_base.p, 0.0, mo);
    rep.oracle_solution = oracle.u;
    rep.oracle_report = oracle.report;

    VectorField prev(f.grid(), f.components());
    std::vector<double> dists;
    for (const double mu : mu_schedule) {
        auto cfg = cfg_base;
        cfg.mu = mu;
        auto res = solve_fixed_point(f, cfg, constants, &prev);
        rep.R = res.R;
        ContinuationRow row;
        row.mu = mu;
        row.w2q_norm = w2q_norm(res.u, cfg.q);
        row.ball_ratio = res.R > 0.0 ? lq_norm(discrete_laplacian(res.u), cfg.q) / res.R : 0.0;
        row.w1p_dist = w1p_norm(res.u - rep.oracle_solution, cfg.p);
        row.weak_residual =
            weak_residual(res.u, f, cfg.p, 0.0, options.weak_test_count, options.weak_seed);
        row.iterations = res.iterations;
        row.converged = res.converged;
        rep.rows.push_back(row);
        dists.push_back(row.w1p_dist);
        prev = res.u;
        rep.solutions.push_back(std::move(res.u));
    }
    rep.monotone_envelope_ok = monotone_envelope(dists, oracle_tol);
    return rep;
}

} // namespace plap
