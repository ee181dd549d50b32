#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace plap {

/// Raised for any inadmissible configuration or argument.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative method fails in a way the caller cannot recover from.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Point = std::array<double, 3>;
using MultiIndex = std::array<int, 3>;

/// Uniform node-centred grid on the box [0,L_1] x ... x [0,L_n], n in {2,3}.
///
/// Nodes are numbered row-major (last axis fastest). Boundary nodes are the
/// ones with an extremal index on some axis; they carry the Dirichlet data.
/// Copies are cheap: the node tables are shared and immutable.
class Grid {
public:
    static Grid make(int n_dims, std::span<const int> resolution,
                     std::span<const double> extents);
    /// Unit box with `m` nodes per axis.
    static Grid unit(int n_dims, int m);

    int dims() const { return data_->dims; }
    int resolution(int axis) const { return data_->resolution[axis]; }
    double extent(int axis) const { return data_->extents[axis]; }
    double spacing(int axis) const { return data_->spacing[axis]; }
    std::size_t stride(int axis) const { return data_->stride[axis]; }

    std::size_t node_count() const { return data_->boundary.size(); }
    std::size_t interior_count() const { return data_->interior.size(); }
    std::size_t boundary_count() const { return node_count() - interior_count(); }
    std::span<const std::size_t> interior_nodes() const { return data_->interior; }

    bool is_boundary(std::size_t node) const { return data_->boundary[node] != 0; }
    MultiIndex index(std::size_t node) const;
    std::size_t node(const MultiIndex& idx) const;
    Point position(std::size_t node) const;

    /// Product of the spacings.
    double cell_volume() const { return data_->cell_volume; }
    /// Trapezoidal quadrature weight: cell volume halved once per extremal axis.
    double node_weight(std::size_t node) const { return data_->weight[node]; }

    bool operator==(const Grid& other) const;

private:
    struct Data {
        int dims = 0;
        std::array<int, 3> resolution{1, 1, 1};
        std::array<double, 3> extents{0, 0, 0};
        std::array<double, 3> spacing{0, 0, 0};
        std::array<std::size_t, 3> stride{0, 0, 0};
        double cell_volume = 0;
        std::vector<std::uint8_t> boundary;
        std::vector<double> weight;
        std::vector<std::size_t> interior;
    };
    explicit Grid(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
    std::shared_ptr<const Data> data_;
};

/// N-component nodal field. Values are stored component-major, then by node.
class VectorField {
public:
    VectorField(Grid grid, int components);
    VectorField(Grid grid, int components, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    int components() const { return components_; }

    double& at(int c, std::size_t node) { return values_[c * grid_.node_count() + node]; }
    double at(int c, std::size_t node) const { return values_[c * grid_.node_count() + node]; }

    std::span<double> component(int c);
    std::span<const double> component(int c) const;
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    /// True when every boundary value is exactly zero.
    bool is_dirichlet_conforming() const;

    VectorField& operator+=(const VectorField& other);
    VectorField& operator-=(const VectorField& other);
    VectorField& operator*=(double s);

private:
    Grid grid_;
    int components_;
    std::vector<double> values_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

/// Sets out = a + s*b. All three fields must share a grid and component count.
void axpy(double s, const VectorField& b, VectorField& a);

/// Pointwise map position -> R^N; writes into `out` (size N).
using PointFn = std::function<void(const Point&, std::span<double>)>;

VectorField field_from_fn(const Grid& grid, int components, const PointFn& fn);

/// Copy with every boundary value set to zero.
VectorField enforce_dirichlet(const VectorField& field);

/// Writes `<path>` (raw little-endian doubles, component-major then row-major
/// nodes) and the sidecar `<path>.json` with n_dims, resolution, extents,
/// components.
void save_field(const VectorField& field, const std::filesystem::path& path);
VectorField load_field(const std::filesystem::path& path);

} // namespace plap
