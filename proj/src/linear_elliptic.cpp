#include "plap/linear_elliptic.hpp"

#include "plap/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace plap {

namespace {

// y = -lap_h x on the interior; boundary entries of x are treated as zero.
void apply_neg_laplacian(const Grid& grid, std::span<const double> x, std::span<double> y)
{
    std::array<double, 3> inv_h2{};
    for (int a = 0; a < grid.dims(); ++a) {
        inv_h2[a] = 1.0 / (grid.spacing(a) * grid.spacing(a));
    }
    for (const std::size_t node : grid.interior_nodes()) {
        double s = 0.0;
        for (int a = 0; a < grid.dims(); ++a) {
            const std::size_t st = grid.stride(a);
            const double xp = grid.is_boundary(node + st) ? 0.0 : x[node + st];
            const double xm = grid.is_boundary(node - st) ? 0.0 : x[node - st];
            s += (2.0 * x[node] - xp - xm) * inv_h2[a];
        }
        y[node] = s;
    }
}

double interior_dot(const Grid& grid, std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (const std::size_t node : grid.interior_nodes()) {
        s += a[node] * b[node];
    }
    return s * grid.cell_volume();
}

struct CgOutcome {
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

// Unpreconditioned CG for one component; x holds the initial guess on entry.
// The recursive residual is replaced by the true residual whenever it claims
// convergence, so the reported residual is always the true one.
CgOutcome cg_component(const Grid& grid, std::span<const double> b, std::span<double> x,
                       double target, int max_iterations)
{
    const std::size_t nodes = grid.node_count();
    std::vector<double> r(nodes, 0.0), p(nodes, 0.0), ap(nodes, 0.0);
    CgOutcome out;

    auto true_residual = [&]() {
        apply_neg_laplacian(grid, x, ap);
        for (const std::size_t node : grid.interior_nodes()) {
            r[node] = b[node] - ap[node];
        }
        return std::sqrt(interior_dot(grid, r, r));
    };

    double rnorm = true_residual();
    int restarts = 0;
    while (true) {
        if (rnorm <= target) {
            out.converged = true;
            break;
        }
        if (out.iterations >= max_iterations || restarts > 8) {
            break;
        }
        p = r;
        double rr = interior_dot(grid, r, r);
        while (out.iterations < max_iterations) {
            apply_neg_laplacian(grid, p, ap);
            const double pap = interior_dot(grid, p, ap);
            if (!(pap > 0.0)) {
                break;
            }
            const double alpha = rr / pap;
            for (const std::size_t node : grid.interior_nodes()) {
                x[node] += alpha * p[node];
                r[node] -= alpha * ap[node];
            }
            ++out.iterations;
            const double rr_new = interior_dot(grid, r, r);
            if (std::sqrt(rr_new) <= target) {
                break;
            }
            const double beta = rr_new / rr;
            rr = rr_new;
            for (const std::size_t node : grid.interior_nodes()) {
                p[node] = r[node] + beta * p[node];
            }
        }
        rnorm = true_residual();
        ++restarts;
    }
    out.residual = rnorm;
    return out;
}

} // namespace

VectorField negative_laplacian(const VectorField& u)
{
    VectorField out(u.grid(), u.components());
    for (int c = 0; c < u.components(); ++c) {
        apply_neg_laplacian(u.grid(), u.component(c), out.component(c));
    }
    return out;
}

double interior_l2_norm(const VectorField& v)
{
    double s = 0.0;
    for (int c = 0; c < v.components(); ++c) {
        s += interior_dot(v.grid(), v.component(c), v.component(c));
    }
    return std::sqrt(s);
}

PoissonSolution solve_poisson(const Grid& grid, const VectorField& g, double tol,
                              const PoissonOptions& options)
{
    if (!(tol > 0.0)) {
        throw ConfigError("Poisson tolerance must be positive");
    }
    if (!(g.grid() == grid)) {
        throw ConfigError("right-hand side lives on a different grid");
    }
    const int N = g.components();
    const double scale = std::max(1.0, interior_l2_norm(g));
    const double target = tol * scale / std::sqrt(static_cast<double>(N));
    const int max_it = options.max_iterations > 0
                           ? options.max_iterations
                           : static_cast<int>(20 * std::max<std::size_t>(grid.interior_count(), 1));

    VectorField u(grid, N);
    if (options.initial_guess != nullptr) {
        u = enforce_dirichlet(*options.initial_guess);
    }
    PoissonSolution sol{std::move(u), {}};
    sol.report.converged = true;
    double res2 = 0.0;
    for (int c = 0; c < N; ++c) {
        const auto outcome = cg_component(grid, g.component(c), sol.u.component(c), target, max_it);
        sol.report.iterations = std::max(sol.report.iterations, outcome.iterations);
        sol.report.converged = sol.report.converged && outcome.converged;
        res2 += outcome.residual * outcome.residual;
    }
    sol.report.residual = std::sqrt(res2);
    return sol;
}

// ----------------------------------------------------------------------------
// constants

double ConstantsReport::C2(double q) const
{
    if (q == 2.0 && C1 > 0.0) {
        return C1;
    }
    const auto it = C2_of_q.find(q);
    if (it == C2_of_q.end()) {
        throw ConfigError("no C2 estimate available for q = " + std::to_string(q));
    }
    return it->second;
}

double ConstantsReport::C3(double q) const
{
    const auto it = C3_of_q.find(q);
    if (it == C3_of_q.end()) {
        throw ConfigError("no C3 estimate available for q = " + std::to_string(q));
    }
    return it->second;
}

nlohmann::json to_json(const ConstantsReport& report)
{
    nlohmann::json doc;
    doc["C1"] = report.C1;
    auto table = [](const std::map<double, double>& m) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [q, c] : m) {
            arr.push_back({{"q", q}, {"value", c}});
        }
        return arr;
    };
    doc["C2_of_q"] = table(report.C2_of_q);
    doc["C3_of_q"] = table(report.C3_of_q);
    doc["K_band"] = {report.K_band.first, report.K_band.second};
    doc["sample_count"] = report.sample_count;
    doc["ascent_steps"] = report.ascent_steps;
    return doc;
}

ConstantsReport constants_from_json(const nlohmann::json& doc)
{
    ConstantsReport r;
    r.C1 = doc.at("C1").get<double>();
    for (const auto& e : doc.at("C2_of_q")) {
        r.C2_of_q[e.at("q").get<double>()] = e.at("value").get<double>();
    }
    for (const auto& e : doc.at("C3_of_q")) {
        r.C3_of_q[e.at("q").get<double>()] = e.at("value").get<double>();
    }
    r.K_band = {doc.at("K_band").at(0).get<double>(), doc.at("K_band").at(1).get<double>()};
    r.sample_count = doc.at("sample_count").get<int>();
    r.ascent_steps = doc.at("ascent_steps").get<int>();
    return r;
}

namespace {

struct Mode {
    std::array<int, 3> k{1, 1, 1};
};

struct SineSample {
    std::vector<Mode> modes;
    std::vector<double> amplitudes;
};

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x5eedu};
    return std::mt19937_64(seq);
}

SineSample draw_sample(const Grid& grid, std::uint64_t seed, std::uint64_t index, int max_modes,
                       int max_wavenumber)
{
    auto rng = sample_rng(seed, index);
    std::uniform_int_distribution<int> count(1, max_modes);
    std::normal_distribution<double> amp(0.0, 1.0);
    SineSample s;
    const int m = count(rng);
    for (int i = 0; i < m; ++i) {
        Mode mode;
        for (int a = 0; a < grid.dims(); ++a) {
            const int kmax = std::max(1, std::min(max_wavenumber, (grid.resolution(a) - 1) / 2));
            mode.k[a] = std::uniform_int_distribution<int>(1, kmax)(rng);
        }
        s.modes.push_back(mode);
        s.amplitudes.push_back(amp(rng));
    }
    return s;
}

std::vector<double> mode_values(const Grid& grid, const Mode& mode)
{
    std::vector<double> v(grid.node_count(), 0.0);
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        if (grid.is_boundary(node)) {
            continue;
        }
        const auto x = grid.position(node);
        double prod = 1.0;
        for (int a = 0; a < grid.dims(); ++a) {
            prod *= std::sin(mode.k[a] * std::numbers::pi * x[a] / grid.extent(a));
        }
        v[node] = prod;
    }
    return v;
}

// Field whose discrete Laplacian is a product of sign jumps across random
// cell midplanes (on at least two axes). Its full discrete sine expansion
// puts D^2 v near a logarithmic singularity where the jump planes cross,
// which is what drives C2(q) up with q; few-mode smooth sums cannot see it.
std::vector<double> sign_pattern_values(const Grid& grid, std::uint64_t seed, std::uint64_t index)
{
    auto rng = sample_rng(seed, index);
    const int n = grid.dims();
    std::array<bool, 3> active{true, true, n == 3};
    if (n == 3 && std::bernoulli_distribution(0.5)(rng)) {
        active[std::uniform_int_distribution<int>(0, 2)(rng)] = false;
    }
    std::array<double, 3> centre{};
    for (int a = 0; a < n; ++a) {
        const int m = grid.resolution(a);
        const int lo = std::max(0, static_cast<int>(0.2 * (m - 1)));
        const int hi = std::max(lo, static_cast<int>(0.8 * (m - 1)) - 1);
        centre[a] = (std::uniform_int_distribution<int>(lo, hi)(rng) + 0.5) * grid.spacing(a);
    }
    VectorField g(grid, 1);
    for (const std::size_t node : grid.interior_nodes()) {
        const auto x = grid.position(node);
        double s = 1.0;
        for (int a = 0; a < n; ++a) {
            if (active[a]) {
                s *= x[a] < centre[a] ? -1.0 : 1.0;
            }
        }
        g.at(0, node) = s;
    }
    auto sol = solve_poisson(grid, g, 1e-13);
    const auto v = sol.u.component(0);
    return std::vector<double>(v.begin(), v.end());
}

enum class Numerator { hessian, gradient };

// Linear combinations of precomputed per-mode jets; evaluates the ratio of
// a derivative norm to ||lap v||_q for given amplitudes.
class RatioEvaluator {
public:
    RatioEvaluator(const Grid& grid, const std::vector<std::vector<double>>& modes, Numerator num,
                   double q, double q_num)
        : grid_(grid), q_(q), q_num_(q_num)
    {
        const std::size_t nodes = grid.node_count();
        width_ = num == Numerator::hessian ? static_cast<std::size_t>(grid.dims() * grid.dims())
                                           : static_cast<std::size_t>(grid.dims());
        for (const auto& values : modes) {
            VectorField f(grid, 1, values);
            const Jet jet(f);
            std::vector<double> d(nodes * width_, 0.0);
            std::vector<double> l(nodes, 0.0);
            for (std::size_t node = 0; node < nodes; ++node) {
                const auto src = num == Numerator::hessian ? jet.hess(node) : jet.grad(node);
                std::copy(src.begin(), src.end(), d.begin() + static_cast<long>(node * width_));
                l[node] = jet.lap(node)[0];
            }
            deriv_.push_back(std::move(d));
            lap_.push_back(std::move(l));
        }
        num_mag_.assign(nodes, 0.0);
        lap_mag_.assign(nodes, 0.0);
        buf_.assign(width_, 0.0);
    }

    /// Returns nullopt for degenerate (||lap v||_q < 1e-12) amplitudes.
    std::optional<double> operator()(const std::vector<double>& a)
    {
        const std::size_t nodes = grid_.node_count();
        for (std::size_t node = 0; node < nodes; ++node) {
            std::fill(buf_.begin(), buf_.end(), 0.0);
            double l = 0.0;
            for (std::size_t m = 0; m < a.size(); ++m) {
                const double* d = deriv_[m].data() + node * width_;
                for (std::size_t k = 0; k < width_; ++k) {
                    buf_[k] += a[m] * d[k];
                }
                l += a[m] * lap_[m][node];
            }
            double s = 0.0;
            for (const double v : buf_) {
                s += v * v;
            }
            num_mag_[node] = std::sqrt(s);
            lap_mag_[node] = std::abs(l);
        }
        const double den = lq_norm(lap_mag_, q_, grid_);
        if (den < 1e-12) {
            return std::nullopt;
        }
        return lq_norm(num_mag_, q_num_, grid_) / den;
    }

private:
    const Grid& grid_;
    double q_;
    double q_num_;
    std::size_t width_ = 0;
    std::vector<std::vector<double>> deriv_;
    std::vector<std::vector<double>> lap_;
    std::vector<double> num_mag_, lap_mag_, buf_;
};

// Coordinate ascent on the amplitudes; returns the best ratio found or
// nullopt if the starting amplitudes are degenerate.
std::optional<double> ascend(RatioEvaluator& eval, std::vector<double> a, int steps)
{
    auto best = eval(a);
    if (!best) {
        return std::nullopt;
    }
    double scale = 0.0;
    for (const double v : a) {
        scale = std::max(scale, std::abs(v));
    }
    double step = 0.5 * scale;
    const std::size_t m = a.size();
    for (int s = 0; s < steps && m > 1; ++s) {
        const std::size_t j = static_cast<std::size_t>(s) % m;
        bool improved = false;
        for (const double sign : {1.0, -1.0}) {
            auto trial = a;
            trial[j] += sign * step;
            const auto r = eval(trial);
            if (r && *r > *best) {
                best = r;
                a = std::move(trial);
                improved = true;
                break;
            }
        }
        if (!improved && j + 1 == m) {
            step *= 0.5;
        }
    }
    return best;
}

double estimate_ratio(const Grid& grid, Numerator num, double q, double q_num, int samples,
                      int ascent_steps, std::uint64_t seed)
{
    if (samples < 1) {
        throw ConfigError("constant estimation needs at least one sample");
    }
    double best = 0.0;
    bool any = false;
    for (int i = 0; i < samples; ++i) {
        const auto index = static_cast<std::uint64_t>(i);
        std::optional<double> r;
        if (i % 2 == 0) {
            const auto sample = draw_sample(grid, seed, index, 8, 8);
            std::vector<std::vector<double>> modes;
            for (const auto& mode : sample.modes) {
                modes.push_back(mode_values(grid, mode));
            }
            RatioEvaluator eval(grid, modes, num, q, q_num);
            r = ascend(eval, sample.amplitudes, ascent_steps);
        } else {
            RatioEvaluator eval(grid, {sign_pattern_values(grid, seed, index)}, num, q, q_num);
            r = eval({1.0});
        }
        if (r) {
            best = any ? std::max(best, *r) : *r;
            any = true;
        }
    }
    if (!any) {
        throw NumericalError("every constant-estimation sample was degenerate");
    }
    return best;
}

} // namespace

VectorField random_sine_field(const Grid& grid, int components, std::uint64_t seed,
                              std::uint64_t index, int max_modes, int max_wavenumber)
{
    VectorField out(grid, components);
    for (int c = 0; c < components; ++c) {
        const auto sample = draw_sample(grid, seed, index * 1009u + static_cast<std::uint64_t>(c),
                                        max_modes, max_wavenumber);
        for (std::size_t m = 0; m < sample.modes.size(); ++m) {
            const auto v = mode_values(grid, sample.modes[m]);
            auto comp = out.component(c);
            for (std::size_t node = 0; node < v.size(); ++node) {
                comp[node] += sample.amplitudes[m] * v[node];
            }
        }
    }
    return out;
}

double estimate_C2(const Grid& grid, double q, int samples, int ascent_steps, std::uint64_t seed)
{
    if (!(q >= 2.0)) {
        throw ConfigError("C2 estimation needs q >= 2");
    }
    return estimate_ratio(grid, Numerator::hessian, q, q, samples, ascent_steps, seed);
}

double estimate_C3(const Grid& grid, double q, int samples, std::uint64_t seed, int ascent_steps)
{
    const double n = grid.dims();
    if (q == n) {
        throw ConfigError("C3 is undefined for q = n");
    }
    if (!(q >= 2.0)) {
        throw ConfigError("C3 estimation needs q >= 2");
    }
    const double q_num = q < n ? n * q / (n - q) : kInfNorm;
    return estimate_ratio(grid, Numerator::gradient, q, q_num, samples, ascent_steps, seed);
}

ConstantsReport estimate_constants(const Grid& grid, const std::vector<double>& qs, int samples,
                                   int ascent_steps, std::uint64_t seed)
{
    ConstantsReport r;
    r.sample_count = samples;
    r.ascent_steps = ascent_steps;
    r.C1 = estimate_C2(grid, 2.0, samples, ascent_steps, seed);
    r.C2_of_q[2.0] = r.C1;
    for (const double q : qs) {
        if (q != 2.0) {
            r.C2_of_q[q] = estimate_C2(grid, q, samples, ascent_steps, seed);
        }
        if (q != grid.dims()) {
            r.C3_of_q[q] = estimate_C3(grid, q, samples, seed, ascent_steps);
        }
    }
    double lo = kInfNorm;
    double hi = 0.0;
    for (const auto& [q, c] : r.C2_of_q) {
        lo = std::min(lo, c / q);
        hi = std::max(hi, c / q);
    }
    r.K_band = {lo, hi};
    return r;
}

} // namespace plap
