#include "plap/inequality_lab.hpp"

#include "plap/calculus.hpp"
#include "plap/grid.hpp"
#include "plap/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace plap {

namespace {

constexpr double kSlack = 1e-12;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t tag)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag)};
    return std::mt19937_64(seq);
}

// Cycles through standard normal, clipped Cauchy, and normal scaled by 10^U(-6,6).
void draw(std::mt19937_64& rng, std::vector<double>& out, int mode)
{
    std::normal_distribution<double> normal;
    std::cauchy_distribution<double> cauchy;
    std::uniform_real_distribution<double> expo(-6.0, 6.0);
    const double scale = mode == 2 ? std::pow(10.0, expo(rng)) : 1.0;
    for (double& x : out) {
        if (mode == 1) {
            x = std::clamp(cauchy(rng), -1e4, 1e4);
        } else {
            x = scale * normal(rng);
        }
    }
}

double norm(const std::vector<double>& v)
{
    double s = 0.0;
    for (const double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

struct Tally {
    int samples = 0;
    int violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    double ratio = 0.0;

    void add(double lhs, double rhs)
    {
        ++samples;
        const double m = relative_margin(lhs, rhs);
        worst = std::min(worst, m);
        if (m < -kSlack) {
            ++violations;
        }
        if (rhs > 0.0) {
            ratio = std::max(ratio, lhs / rhs);
        }
    }

    InequalitySweep sweep(std::string name, std::uint64_t seed) const
    {
        InequalitySweep s;
        s.name = std::move(name);
        s.samples = samples;
        s.violations = violations;
        s.worst_slack = samples > 0 ? worst : 0.0;
        s.empirical_constant = ratio;
        s.seed = seed;
        return s;
    }
};

void check_samples(int samples)
{
    if (samples < 1) {
        throw ConfigError("a sweep needs at least one sample");
    }
}

void check_p(double p)
{
    if (!(p > 1.0 && p <= 2.0)) {
        throw ConfigError("p must lie in (1,2]");
    }
}

// (y+d)^s - y^s for y > 0 without cancellation.
double power_difference(double y, double d, double s)
{
    if (d == 0.0 || s == 0.0) {
        return 0.0;
    }
    return std::pow(y, s) * std::expm1(s * std::log1p(d / y));
}

} // namespace

double relative_margin(double lhs, double rhs)
{
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    return scale > 0.0 ? (rhs - lhs) / scale : 0.0;
}

nlohmann::json to_json(const InequalitySweep& s)
{
    nlohmann::json j{{"name", s.name},
                     {"samples", s.samples},
                     {"violations", s.violations},
                     {"worst_slack", s.worst_slack},
                     {"seed", s.seed},
                     {"details", s.details}};
    j["empirical_constant"] = std::isfinite(s.empirical_constant)
                                  ? nlohmann::json(s.empirical_constant)
                                  : nlohmann::json(nullptr);
    return j;
}

std::string sweeps_csv(const std::vector<InequalitySweep>& sweeps)
{
    std::ostringstream os;
    os << "name,samples,violations,worst_slack,empirical_constant\n";
    for (const auto& s : sweeps) {
        os << s.name << ',' << s.samples << ',' << s.violations << ','
           << io::format_double(s.worst_slack) << ',' << io::format_double(s.empirical_constant)
           << '\n';
    }
    return os.str();
}

InequalitySweep check_appendix(int samples, std::uint64_t seed, int N, int n)
{
    check_samples(samples);
    if (N < 1 || n < 1 || n > 3) {
        throw ConfigError("appendix sweep needs N >= 1 and 1 <= n <= 3");
    }
    auto rng = make_rng(seed, 1);
    std::vector<double> grad(N * n), hess(N * n * n), cubic(N), lap(N), b(n);
    Tally main, inter;
    for (int s = 0; s < samples; ++s) {
        draw(rng, grad, s % 3);
        draw(rng, hess, (s / 3) % 3);
        for (int i = 0; i < N; ++i) {
            for (int a = 0; a < n; ++a) {
                for (int c = 0; c < a; ++c) {
                    hess[(i * n + c) * n + a] = hess[(i * n + a) * n + c];
                }
            }
        }
        cubic_contraction(grad, hess, N, n, cubic);
        double I = 0.0;
        for (int i = 0; i < N; ++i) {
            lap[i] = 0.0;
            for (int a = 0; a < n; ++a) {
                lap[i] += hess[(i * n + a) * n + a];
            }
            I += cubic[i] * lap[i];
        }
        const double g = norm(grad);
        const double H = norm(hess);
        const double L = norm(lap);
        main.add(std::abs(I), g * g * H * L);
        for (int j = 0; j < n; ++j) {
            b[j] = 0.0;
            for (int i = 0; i < N; ++i) {
                b[j] += grad[i * n + j] * lap[i];
            }
        }
        const double bn = norm(b);
        inter.add(bn * bn, L * L * g * g);
    }
    auto out = main.sweep("appendix", seed);
    out.violations += inter.violations;
    out.worst_slack = std::min(out.worst_slack, inter.worst);
    out.details = {{"N", N},
                   {"n", n},
                   {"main_violations", main.violations},
                   {"intermediate", to_json(inter.sweep("appendix_intermediate", seed))}};
    return out;
}

double tensor_quotient(const std::vector<double>& A, const std::vector<double>& B, double p,
                       double mu)
{
    if (A.size() != B.size()) {
        throw ConfigError("tensor arguments differ in size");
    }
    double dist2 = 0.0;
    for (std::size_t k = 0; k < A.size(); ++k) {
        dist2 += (A[k] - B[k]) * (A[k] - B[k]);
    }
    if (dist2 == 0.0) {
        return 0.0;
    }
    const double a = norm(A);
    const double b = norm(B);
    const double ca = mu + a > 0.0 ? std::pow(mu + a, p - 2.0) : 0.0;
    const double cb = mu + b > 0.0 ? std::pow(mu + b, p - 2.0) : 0.0;
    double diff2 = 0.0;
    for (std::size_t k = 0; k < A.size(); ++k) {
        const double d = ca * A[k] - cb * B[k];
        diff2 += d * d;
    }
    return std::sqrt(diff2) * std::pow(mu + a + b, 2.0 - p) / std::sqrt(dist2);
}

InequalitySweep check_tensor_lipschitz(int samples, std::uint64_t seed, double p,
                                       const std::vector<double>& mu_list, int N, int n)
{
    check_samples(samples);
    check_p(p);
    if (mu_list.empty()) {
        throw ConfigError("tensor sweep needs at least one mu");
    }
    for (const double mu : mu_list) {
        if (!(mu >= 0.0)) {
            throw ConfigError("mu must be nonnegative");
        }
    }
    auto rng = make_rng(seed, 2);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> expo(-6.0, 0.0);
    const std::size_t len = static_cast<std::size_t>(N * n);
    std::vector<double> A(len), B(len), pert(len);
    std::vector<double> sup(mu_list.size(), 0.0);
    int nonfinite = 0;
    for (int s = 0; s < samples; ++s) {
        draw(rng, A, s % 3);
        switch ((s / 3) % 4) {
        case 0:
            draw(rng, B, (s / 12) % 3);
            break;
        case 1: { // B close to A
            draw(rng, pert, 0);
            const double eps = std::pow(10.0, expo(rng)) * norm(A);
            for (std::size_t k = 0; k < len; ++k) {
                B[k] = A[k] + eps * pert[k];
            }
            break;
        }
        case 2:
            std::fill(B.begin(), B.end(), 0.0);
            break;
        default: { // collinear, possibly opposite
            const double c = normal(rng);
            for (std::size_t k = 0; k < len; ++k) {
                B[k] = c * A[k];
            }
        }
        }
        for (std::size_t m = 0; m < mu_list.size(); ++m) {
            const double qv = tensor_quotient(A, B, p, mu_list[m]);
            if (!std::isfinite(qv)) {
                ++nonfinite;
                continue;
            }
            sup[m] = std::max(sup[m], qv);
        }
    }
    InequalitySweep out;
    out.name = "tensor_lipschitz";
    out.samples = samples;
    out.violations = nonfinite;
    out.worst_slack = 0.0;
    out.seed = seed;
    const double hi = *std::max_element(sup.begin(), sup.end());
    const double lo = *std::min_element(sup.begin(), sup.end());
    out.empirical_constant = hi;
    auto per_mu = nlohmann::json::array();
    for (std::size_t m = 0; m < mu_list.size(); ++m) {
        per_mu.push_back({{"mu", mu_list[m]}, {"supremum", sup[m]}});
    }
    out.details = {{"p", p},
                   {"per_mu", per_mu},
                   {"spread", lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity()},
                   {"stable_within_factor_2", lo > 0.0 && hi <= 2.0 * lo}};
    return out;
}

InequalitySweep check_young_type(int samples, std::uint64_t seed, double p)
{
    check_samples(samples);
    check_p(p);
    auto rng = make_rng(seed, 3);
    std::uniform_real_distribution<double> expo(-6.0, 6.0);
    Tally t;
    for (int s = 0; s < samples; ++s) {
        const double x = std::pow(10.0, expo(rng));
        const double y = std::pow(10.0, expo(rng));
        t.add(std::pow(x, 2.0 - p) * y, x + std::pow(y, 1.0 / (p - 1.0)));
    }
    auto out = t.sweep("young_type", seed);
    out.details = {{"p", p}};
    return out;
}

std::vector<InequalitySweep> check_mu_bounds(int samples, std::uint64_t seed, double p, double mu)
{
    check_samples(samples);
    check_p(p);
    if (mu > 1.0) {
        throw ConfigError("(mu+t)^(2-p) <= 1 + t^(2-p) only holds for mu <= 1");
    }
    if (!(mu > 0.0)) {
        throw ConfigError("the mu-Lipschitz bound needs mu > 0");
    }
    auto rng = make_rng(seed, 4);
    std::uniform_real_distribution<double> expo(-8.0, 0.0);
    std::vector<double> a(6), b(6), pert(6);
    const double s2 = 2.0 - p;
    const double lip = s2 * std::pow(mu, 1.0 - p);
    Tally first, second;
    for (int s = 0; s < samples; ++s) {
        draw(rng, a, s % 3);
        if ((s / 3) % 2 == 0) {
            draw(rng, b, (s / 6) % 3);
        } else {
            draw(rng, pert, 0);
            const double eps = std::pow(10.0, expo(rng)) * std::max(norm(a), mu);
            for (std::size_t k = 0; k < a.size(); ++k) {
                b[k] = a[k] + eps * pert[k];
            }
        }
        const double na = norm(a);
        const double nb = norm(b);
        first.add(std::pow(mu + na, s2), 1.0 + std::pow(na, s2));

        double dist2 = 0.0, dot = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            dist2 += (a[k] - b[k]) * (a[k] - b[k]);
            dot += (a[k] - b[k]) * (a[k] + b[k]);
        }
        // |a| - |b| = (a-b).(a+b) / (|a|+|b|)
        const double dn = na + nb > 0.0 ? dot / (na + nb) : 0.0;
        const double lhs = std::abs(power_difference(mu + nb, dn, s2));
        second.add(lhs, lip * std::sqrt(dist2));
    }
    auto one = first.sweep("mu_bound_power", seed);
    one.details = {{"p", p}, {"mu", mu}};
    auto two = second.sweep("mu_bound_lipschitz", seed);
    two.details = {{"p", p}, {"mu", mu}};
    return {one, two};
}

} // namespace plap
