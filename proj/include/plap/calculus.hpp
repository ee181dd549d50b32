#pragma once

#include "plap/grid.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace plap {

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// Discrete gradient, Hessian and Laplacian of a field at every node.
///
/// Central second-order stencils; entries at boundary nodes are zero. Storage
/// is node-major: grad(node) is N x n (row i = component), hess(node) is
/// N x n x n, lap(node) is N.
class Jet {
public:
    explicit Jet(const VectorField& field);

    const Grid& grid() const { return grid_; }
    int components() const { return components_; }
    int dims() const { return dims_; }

    std::span<const double> grad(std::size_t node) const
    {
        return std::span(grad_).subspan(node * grad_stride(), grad_stride());
    }
    std::span<const double> hess(std::size_t node) const
    {
        return std::span(hess_).subspan(node * hess_stride(), hess_stride());
    }
    std::span<const double> lap(std::size_t node) const
    {
        return std::span(lap_).subspan(node * components_, components_);
    }

    std::size_t grad_stride() const { return static_cast<std::size_t>(components_ * dims_); }
    std::size_t hess_stride() const
    {
        return static_cast<std::size_t>(components_ * dims_ * dims_);
    }

    /// Euclidean magnitudes per node of each part (|grad u|, |D^2 u|, |lap u|).
    std::vector<double> grad_magnitude() const;
    std::vector<double> hess_magnitude() const;
    std::vector<double> lap_magnitude() const;

    /// The Laplacian as an N-component field (zero on the boundary).
    VectorField laplacian_field() const;

private:
    Grid grid_;
    int components_;
    int dims_;
    std::vector<double> grad_;
    std::vector<double> hess_;
    std::vector<double> lap_;
};

/// (grad u . d_j grad u) d_j u_i = (d_l u_k)(d_jl u_k)(d_j u_i) for a single
/// node. `grad` is N x n, `hess` is N x n x n, `out` has N entries.
void cubic_contraction(std::span<const double> grad, std::span<const double> hess, int components,
                       int dims, std::span<double> out);

/// Per-node cubic term of a jet, as an N-component field.
VectorField cubic_term(const Jet& jet);

/// Discrete Laplacian only (cheaper than a full jet).
VectorField discrete_laplacian(const VectorField& field);

/// (sum_nodes |v|^q * w_node)^(1/q) with trapezoidal node weights; max |v| for q = inf.
/// `magnitudes` holds one nonnegative value per grid node.
double lq_norm(std::span<const double> magnitudes, double q, const Grid& grid);

/// L^q norm of a field using the Euclidean magnitude over components.
double lq_norm(const VectorField& field, double q);

/// Per-node Euclidean magnitude over components.
std::vector<double> magnitudes(const VectorField& field);

/// ||u||_q + ||grad u||_q + ||D^2 u||_q.
double w2q_norm(const VectorField& field, double q);

/// ||u||_p + ||grad u||_p.
double w1p_norm(const VectorField& field, double p);

struct HolderSampling {
    /// All pairs are used when the interior has at most this many nodes.
    std::size_t exhaustive_limit = 1200;
    std::size_t random_pairs = 200000;
    std::uint64_t seed = 1;
};

/// max |grad u(x) - grad u(y)| / |x - y|^alpha over interior node pairs.
double holder_seminorm(const VectorField& field, double alpha, const HolderSampling& sampling = {});

} // namespace plap
