#include "plap/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace plap {

Jet::Jet(const VectorField& field)
    : grid_(field.grid()), components_(field.components()), dims_(field.grid().dims())
{
    const std::size_t nodes = grid_.node_count();
    const int N = components_;
    const int n = dims_;
    grad_.assign(nodes * grad_stride(), 0.0);
    hess_.assign(nodes * hess_stride(), 0.0);
    lap_.assign(nodes * N, 0.0);

    std::array<double, 3> inv2h{};
    std::array<double, 3> invh2{};
    for (int a = 0; a < n; ++a) {
        inv2h[a] = 0.5 / grid_.spacing(a);
        invh2[a] = 1.0 / (grid_.spacing(a) * grid_.spacing(a));
    }

    for (const std::size_t node : grid_.interior_nodes()) {
        double* g = grad_.data() + node * grad_stride();
        double* h = hess_.data() + node * hess_stride();
        double* l = lap_.data() + node * N;
        for (int i = 0; i < N; ++i) {
            const auto u = field.component(i);
            const double u0 = u[node];
            for (int j = 0; j < n; ++j) {
                const std::size_t sj = grid_.stride(j);
                const double up = u[node + sj];
                const double um = u[node - sj];
                g[i * n + j] = (up - um) * inv2h[j];
                const double djj = (up - 2.0 * u0 + um) * invh2[j];
                h[(i * n + j) * n + j] = djj;
                l[i] += djj;
                for (int k = j + 1; k < n; ++k) {
                    const std::size_t sk = grid_.stride(k);
                    const double djk = (u[node + sj + sk] - u[node + sj - sk] - u[node - sj + sk] +
                                        u[node - sj - sk]) *
                                       inv2h[j] * inv2h[k];
                    h[(i * n + j) * n + k] = djk;
                    h[(i * n + k) * n + j] = djk;
                }
            }
        }
    }
}

namespace {
std::vector<double> blockwise_magnitude(const std::vector<double>& data, std::size_t block)
{
    const std::size_t count = block == 0 ? 0 : data.size() / block;
    std::vector<double> out(count, 0.0);
    for (std::size_t node = 0; node < count; ++node) {
        double s = 0.0;
        for (std::size_t k = 0; k < block; ++k) {
            const double v = data[node * block + k];
            s += v * v;
        }
        out[node] = std::sqrt(s);
    }
    return out;
}
} // namespace

std::vector<double> Jet::grad_magnitude() const { return blockwise_magnitude(grad_, grad_stride()); }
std::vector<double> Jet::hess_magnitude() const { return blockwise_magnitude(hess_, hess_stride()); }
std::vector<double> Jet::lap_magnitude() const
{
    return blockwise_magnitude(lap_, static_cast<std::size_t>(components_));
}

VectorField Jet::laplacian_field() const
{
    VectorField out(grid_, components_);
    for (std::size_t node = 0; node < grid_.node_count(); ++node) {
        for (int i = 0; i < components_; ++i) {
            out.at(i, node) = lap_[node * components_ + i];
        }
    }
    return out;
}

void cubic_contraction(std::span<const double> grad, std::span<const double> hess, int components,
                       int dims, std::span<double> out)
{
    const int N = components;
    const int n = dims;
    // c_j = sum_{k,l} (d_l u_k)(d_jl u_k)
    std::array<double, 3> c{0, 0, 0};
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < N; ++k) {
            for (int l = 0; l < n; ++l) {
                s += grad[k * n + l] * hess[(k * n + j) * n + l];
            }
        }
        c[j] = s;
    }
    for (int i = 0; i < N; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            s += c[j] * grad[i * n + j];
        }
        out[i] = s;
    }
}

VectorField cubic_term(const Jet& jet)
{
    const int N = jet.components();
    VectorField out(jet.grid(), N);
    std::vector<double> buf(static_cast<std::size_t>(N));
    for (const std::size_t node : jet.grid().interior_nodes()) {
        cubic_contraction(jet.grad(node), jet.hess(node), N, jet.dims(), buf);
        for (int i = 0; i < N; ++i) {
            out.at(i, node) = buf[i];
        }
    }
    return out;
}

VectorField discrete_laplacian(const VectorField& field)
{
    const auto& grid = field.grid();
    VectorField out(grid, field.components());
    for (int i = 0; i < field.components(); ++i) {
        const auto u = field.component(i);
        auto o = out.component(i);
        for (const std::size_t node : grid.interior_nodes()) {
            double s = 0.0;
            for (int j = 0; j < grid.dims(); ++j) {
                const std::size_t sj = grid.stride(j);
                const double h = grid.spacing(j);
                s += (u[node + sj] - 2.0 * u[node] + u[node - sj]) / (h * h);
            }
            o[node] = s;
        }
    }
    return out;
}

double lq_norm(std::span<const double> mags, double q, const Grid& grid)
{
    if (!(q >= 1.0)) {
        throw ConfigError("L^q norm needs q >= 1");
    }
    if (mags.size() != grid.node_count()) {
        throw ConfigError("L^q norm: one magnitude per node expected");
    }
    if (std::isinf(q)) {
        double m = 0.0;
        for (const double v : mags) {
            m = std::max(m, std::abs(v));
        }
        return m;
    }
    double s = 0.0;
    if (q == 2.0) {
        for (std::size_t node = 0; node < mags.size(); ++node) {
            s += mags[node] * mags[node] * grid.node_weight(node);
        }
        return std::sqrt(s);
    }
    // Scale by the maximum so large q cannot overflow.
    double m = 0.0;
    for (const double v : mags) {
        m = std::max(m, std::abs(v));
    }
    if (m == 0.0) {
        return 0.0;
    }
    for (std::size_t node = 0; node < mags.size(); ++node) {
        s += std::pow(std::abs(mags[node]) / m, q) * grid.node_weight(node);
    }
    return m * std::pow(s, 1.0 / q);
}

std::vector<double> magnitudes(const VectorField& field)
{
    const auto& grid = field.grid();
    std::vector<double> mags(grid.node_count(), 0.0);
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        double s = 0.0;
        for (int c = 0; c < field.components(); ++c) {
            const double v = field.at(c, node);
            s += v * v;
        }
        mags[node] = std::sqrt(s);
    }
    return mags;
}

double lq_norm(const VectorField& field, double q)
{
    return lq_norm(magnitudes(field), q, field.grid());
}

double w2q_norm(const VectorField& field, double q)
{
    const Jet jet(field);
    const auto& g = field.grid();
    return lq_norm(field, q) + lq_norm(jet.grad_magnitude(), q, g) +
           lq_norm(jet.hess_magnitude(), q, g);
}

double w1p_norm(const VectorField& field, double p)
{
    const Jet jet(field);
    return lq_norm(field, p) + lq_norm(jet.grad_magnitude(), p, field.grid());
}

double holder_seminorm(const VectorField& field, double alpha, const HolderSampling& sampling)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("Hoelder exponent must lie in (0,1)");
    }
    const Jet jet(field);
    const auto& grid = field.grid();
    const auto interior = grid.interior_nodes();
    const std::size_t width = jet.grad_stride();

    auto ratio = [&](std::size_t a, std::size_t b) {
        const auto ga = jet.grad(a);
        const auto gb = jet.grad(b);
        double diff = 0.0;
        for (std::size_t k = 0; k < width; ++k) {
            const double d = ga[k] - gb[k];
            diff += d * d;
        }
        const auto xa = grid.position(a);
        const auto xb = grid.position(b);
        double dist = 0.0;
        for (int k = 0; k < grid.dims(); ++k) {
            dist += (xa[k] - xb[k]) * (xa[k] - xb[k]);
        }
        return std::sqrt(diff) / std::pow(std::sqrt(dist), alpha);
    };

    double best = 0.0;
    if (interior.size() <= sampling.exhaustive_limit) {
        for (std::size_t i = 0; i < interior.size(); ++i) {
            for (std::size_t j = i + 1; j < interior.size(); ++j) {
                best = std::max(best, ratio(interior[i], interior[j]));
            }
        }
        return best;
    }
    std::mt19937_64 rng(sampling.seed);
    std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
    for (std::size_t s = 0; s < sampling.random_pairs; ++s) {
        const std::size_t i = pick(rng);
        const std::size_t j = pick(rng);
        if (i != j) {
            best = std::max(best, ratio(interior[i], interior[j]));
        }
    }
    return best;
}

} // namespace plap
