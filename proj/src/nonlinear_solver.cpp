#include "plap/nonlinear_solver.hpp"

#include "plap/calculus.hpp"
#include "plap/io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace plap {

namespace {

double frobenius(std::span<const double> v)
{
    double s = 0.0;
    for (const double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

void check_field_pair(const VectorField& v, const VectorField& f)
{
    if (!(v.grid() == f.grid()) || v.components() != f.components()) {
        throw ConfigError("iterate and source must share grid and component count");
    }
}

LinearizedRhs assemble(const Jet& jet, const VectorField& f, const SolverConfig& cfg)
{
    const Grid& grid = jet.grid();
    const int N = jet.components();
    const int n = jet.dims();
    LinearizedRhs out{VectorField(grid, N), 0.0};
    std::vector<double> cubic(N);
    for (const std::size_t node : grid.interior_nodes()) {
        const auto g = jet.grad(node);
        const auto h = jet.hess(node);
        const double gm = frobenius(g);
        const double coef = std::pow(cfg.mu + gm, 2.0 - cfg.p);
        bool singular = gm < cfg.sing_guard;
        if (!singular) {
            cubic_contraction(g, h, N, n, cubic);
            const double denom = (cfg.mu + gm) * gm;
            double s2 = 0.0;
            for (int i = 0; i < N; ++i) {
                cubic[i] /= denom;
                s2 += cubic[i] * cubic[i];
            }
            const double bound = gm * frobenius(h) / (cfg.mu + gm);
            if (bound > 0.0) {
                out.max_bound_ratio = std::max(out.max_bound_ratio, std::sqrt(s2) / bound);
            }
        }
        for (int i = 0; i < N; ++i) {
            const double s = singular ? 0.0 : cubic[i];
            out.rhs.at(i, node) = (cfg.p - 2.0) * s + f.at(i, node) * coef;
        }
    }
    return out;
}

PoissonSolution apply_F_jet(const Jet& jet, const VectorField& v, const VectorField& f,
                            const SolverConfig& cfg)
{
    const auto lin = assemble(jet, f, cfg);
    PoissonOptions opt;
    opt.initial_guess = &v;
    return solve_poisson(v.grid(), lin.rhs, cfg.poisson_tol, opt);
}

} // namespace

nlohmann::json to_json(const SolverConfig& cfg)
{
    return {{"p", cfg.p},
            {"mu", cfg.mu},
            {"q", cfg.q},
            {"picard_tol", cfg.picard_tol},
            {"picard_max_iters", cfg.picard_max_iters},
            {"damping_theta", cfg.damping_theta},
            {"sing_guard", cfg.sing_guard},
            {"safety_factor", cfg.safety_factor},
            {"poisson_tol", cfg.poisson_tol}};
}

SolverConfig solver_config_from_json(const nlohmann::json& doc, SolverConfig base)
{
    try {
        base.p = doc.value("p", base.p);
        base.mu = doc.value("mu", base.mu);
        base.q = doc.value("q", base.q);
        base.picard_tol = doc.value("picard_tol", base.picard_tol);
        base.picard_max_iters = doc.value("picard_max_iters", base.picard_max_iters);
        base.damping_theta = doc.value("damping_theta", base.damping_theta);
        base.sing_guard = doc.value("sing_guard", base.sing_guard);
        base.safety_factor = doc.value("safety_factor", base.safety_factor);
        base.poisson_tol = doc.value("poisson_tol", base.poisson_tol);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad solver configuration: ") + e.what());
    }
    return base;
}

nlohmann::json to_json(const BallConstants& c)
{
    return {{"C2_raw", c.C2_raw}, {"C3_raw", c.C3_raw}, {"C2_used", c.C2_used},
            {"C3_used", c.C3_used}, {"delta", c.delta},  {"a", c.a}};
}

double r_of_q(double q, double p, int n)
{
    if (q >= n) {
        return q;
    }
    return n * q / (n * (p - 1.0) + q * (2.0 - p));
}

double admissible_p_min(double C2_used)
{
    if (!(C2_used > 0.0)) {
        throw ConfigError("C2 must be positive");
    }
    return 2.0 - 1.0 / C2_used;
}

double compute_a(double delta, double C3, double p)
{
    if (!(delta > 0.0) || !(delta <= 1.0)) {
        throw ConfigError("delta must lie in (0,1], got " + io::format_double(delta));
    }
    if (!(C3 >= 0.0) || !std::isfinite(C3)) {
        throw ConfigError("C3 must be finite and nonnegative");
    }
    const double s = 2.0 - p;
    const double k = 2.0 * std::pow(C3, s); // pow(0,0) = 1
    if (s == 0.0) {
        return (1.0 + k) / delta;
    }
    // g(a) = a delta - 1 - k a^s is convex with g(0) = -1: a single positive root.
    auto g = [&](double a) { return a * delta - 1.0 - k * std::pow(a, s); };
    double lo = 0.0;
    double hi = 1.0 / delta;
    while (g(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return hi;
}

double ball_radius(double a, const VectorField& f, double q, double p, int n)
{
    const double r = r_of_q(q, p, n);
    return a * (lq_norm(f, q) + std::pow(lq_norm(f, r), 1.0 / (p - 1.0)));
}

BallConstants validate(const SolverConfig& cfg, const ConstantsReport& constants, int n_dims)
{
    if (!(cfg.p > 1.0 && cfg.p <= 2.0)) {
        throw ConfigError("p must lie in (1,2]");
    }
    if (!(cfg.mu > 0.0 && cfg.mu <= 1.0)) {
        throw ConfigError("mu must lie in (0,1]");
    }
    if (!(cfg.q >= 2.0) || !std::isfinite(cfg.q)) {
        throw ConfigError("q must be finite and at least 2");
    }
    if (cfg.q == n_dims) {
        throw ConfigError("q = n is not admissible");
    }
    if (!(cfg.picard_tol > 0.0) || cfg.picard_max_iters < 1) {
        throw ConfigError("Picard tolerance and iteration cap must be positive");
    }
    if (!(cfg.damping_theta > 0.0 && cfg.damping_theta <= 1.0)) {
        throw ConfigError("damping_theta must lie in (0,1]");
    }
    if (!(cfg.sing_guard >= 0.0) || !(cfg.safety_factor >= 1.0) || !(cfg.poisson_tol > 0.0)) {
        throw ConfigError("sing_guard >= 0, safety_factor >= 1 and poisson_tol > 0 required");
    }
    BallConstants c;
    c.C2_raw = constants.C2(cfg.q);
    if (cfg.p < 2.0) {
        c.C3_raw = constants.C3(cfg.q);
    } else {
        const auto it = constants.C3_of_q.find(cfg.q);
        c.C3_raw = it == constants.C3_of_q.end() ? 0.0 : it->second;
    }
    c.C2_used = cfg.safety_factor * c.C2_raw;
    c.C3_used = cfg.safety_factor * c.C3_raw;
    c.delta = 1.0 - (2.0 - cfg.p) * c.C2_used;
    if (!(c.delta > 0.0)) {
        throw ConfigError("(2-p) C2 >= 1: p = " + io::format_double(cfg.p) +
                          " is below the admissible minimum " +
                          io::format_double(admissible_p_min(c.C2_used)));
    }
    c.a = compute_a(c.delta, c.C3_used, cfg.p);
    return c;
}

LinearizedRhs assemble_linearized_rhs(const VectorField& v, const VectorField& f,
                                      const SolverConfig& cfg)
{
    check_field_pair(v, f);
    return assemble(Jet(v), f, cfg);
}

PoissonSolution apply_F(const VectorField& v, const VectorField& f, const SolverConfig& cfg)
{
    check_field_pair(v, f);
    return apply_F_jet(Jet(v), v, f, cfg);
}

VectorField nondivergence_residual(const VectorField& u, const VectorField& f,
                                   const SolverConfig& cfg)
{
    check_field_pair(u, f);
    const Jet jet(u);
    auto out = assemble(jet, f, cfg).rhs;
    const int N = u.components();
    for (const std::size_t node : u.grid().interior_nodes()) {
        const auto lap = jet.lap(node);
        for (int i = 0; i < N; ++i) {
            out.at(i, node) = -lap[i] - out.at(i, node);
        }
    }
    return out;
}

std::string IterationTrace::to_csv() const
{
    std::ostringstream os;
    os << "k,lap_norm_q,update_norm_q,theta,ball_violation,chain_lhs,chain_rhs,poisson_converged\n";
    for (const auto& r : records) {
        os << r.k << ',' << io::format_double(r.lap_norm_q) << ','
           << io::format_double(r.update_norm_q) << ',' << io::format_double(r.theta) << ','
           << (r.ball_violation ? 1 : 0) << ',' << io::format_double(r.chain_lhs) << ','
           << io::format_double(r.chain_rhs) << ',' << (r.poisson_converged ? 1 : 0) << '\n';
    }
    return os.str();
}

nlohmann::json IterationTrace::to_json() const
{
    auto arr = nlohmann::json::array();
    for (const auto& r : records) {
        arr.push_back({{"k", r.k},
                       {"lap_norm_q", r.lap_norm_q},
                       {"update_norm_q", r.update_norm_q},
                       {"theta", r.theta},
                       {"ball_violation", r.ball_violation},
                       {"chain_lhs", r.chain_lhs},
                       {"chain_rhs", r.chain_rhs},
                       {"poisson_converged", r.poisson_converged}});
    }
    return arr;
}

FixedPointResult solve_fixed_point(const VectorField& f, const SolverConfig& cfg,
                                   const ConstantsReport& constants, const VectorField* v0)
{
    const Grid& grid = f.grid();
    FixedPointResult res{VectorField(grid, f.components()), {}, false, 0, 0.0, {}, 0};
    res.constants = validate(cfg, constants, grid.dims());
    res.R = ball_radius(res.constants.a, f, cfg.q, cfg.p, grid.dims());

    VectorField v(grid, f.components());
    if (v0 != nullptr) {
        check_field_pair(*v0, f);
        v = enforce_dirichlet(*v0);
    }

    const double fq = lq_norm(f, cfg.q);
    const auto f_mag = magnitudes(f);
    const double threshold = cfg.picard_tol * std::max(1.0, res.R);
    const double ball_slack = 1e-8 * std::max(1.0, res.R);

    double theta = cfg.damping_theta;
    double prev_update = kInfNorm;
    int increases = 0;
    double best_update = kInfNorm;
    VectorField best = v;

    for (int k = 0; k < cfg.picard_max_iters; ++k) {
        const Jet jet(v);
        IterationRecord rec;
        rec.k = k;
        rec.theta = theta;
        rec.lap_norm_q = lq_norm(jet.lap_magnitude(), cfg.q, grid);

        const auto grad_mag = jet.grad_magnitude();
        std::vector<double> weighted(grad_mag.size());
        for (std::size_t i = 0; i < weighted.size(); ++i) {
            weighted[i] = std::pow(grad_mag[i], 2.0 - cfg.p) * f_mag[i];
        }
        rec.chain_rhs = (2.0 - cfg.p) * lq_norm(jet.hess_magnitude(), cfg.q, grid) + fq +
                        lq_norm(weighted, cfg.q, grid);

        auto Fv = apply_F_jet(jet, v, f, cfg);
        rec.poisson_converged = Fv.report.converged;
        rec.chain_lhs = lq_norm(discrete_laplacian(Fv.u), cfg.q);
        rec.ball_violation = rec.lap_norm_q > res.R + ball_slack;
        res.ball_violations += rec.ball_violation ? 1 : 0;

        VectorField step = Fv.u - v;
        step *= theta;
        rec.update_norm_q = lq_norm(discrete_laplacian(step), cfg.q);
        res.trace.records.push_back(rec);

        if (!std::isfinite(rec.update_norm_q)) {
            break;
        }
        v += step;
        if (rec.update_norm_q < best_update) {
            best_update = rec.update_norm_q;
            best = v;
        }
        if (rec.update_norm_q <= threshold) {
            res.converged = true;
            res.iterations = k;
            res.u = std::move(v);
            return res;
        }
        increases = rec.update_norm_q > prev_update ? increases + 1 : 0;
        prev_update = rec.update_norm_q;
        if (increases >= 3) {
            theta *= 0.5;
            increases = 0;
        }
    }
    res.iterations = static_cast<int>(res.trace.records.size());
    res.u = std::move(best);
    return res;
}

std::optional<double> verify_apriori(const VectorField& u, const VectorField& f,
                                     const SolverConfig& cfg)
{
    check_field_pair(u, f);
    const int n = u.grid().dims();
    const double den =
        lq_norm(f, cfg.q) + std::pow(lq_norm(f, r_of_q(cfg.q, cfg.p, n)), 1.0 / (cfg.p - 1.0));
    if (!(den > 0.0)) {
        return std::nullopt;
    }
    return w2q_norm(u, cfg.q) / den;
}

} // namespace plap
