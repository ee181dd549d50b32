#include "plap/grid.hpp"

#include "plap/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>

namespace plap {

Grid Grid::make(int n_dims, std::span<const int> resolution, std::span<const double> extents)
{
    if (n_dims != 2 && n_dims != 3) {
        throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(n_dims));
    }
    if (resolution.size() != static_cast<std::size_t>(n_dims) ||
        extents.size() != static_cast<std::size_t>(n_dims)) {
        throw ConfigError("grid needs one resolution and one extent per axis");
    }
    auto d = std::make_shared<Data>();
    d->dims = n_dims;
    d->cell_volume = 1.0;
    for (int a = 0; a < n_dims; ++a) {
        if (resolution[a] < 3) {
            throw ConfigError("each grid axis needs at least 3 nodes (one interior node)");
        }
        if (!(extents[a] > 0.0)) {
            throw ConfigError("grid extents must be positive");
        }
        d->resolution[a] = resolution[a];
        d->extents[a] = extents[a];
        d->spacing[a] = extents[a] / (resolution[a] - 1);
        d->cell_volume *= d->spacing[a];
    }
    std::size_t s = 1;
    for (int a = 2; a >= 0; --a) {
        d->stride[a] = s;
        s *= static_cast<std::size_t>(d->resolution[a]);
    }
    d->boundary.assign(s, 0);
    d->weight.assign(s, d->cell_volume);
    for (std::size_t node = 0; node < s; ++node) {
        std::size_t rem = node;
        for (int a = 0; a < 3; ++a) {
            const int i = static_cast<int>(rem / d->stride[a]);
            rem %= d->stride[a];
            if (a < n_dims && (i == 0 || i == d->resolution[a] - 1)) {
                d->boundary[node] = 1;
                d->weight[node] *= 0.5;
            }
        }
        if (!d->boundary[node]) {
            d->interior.push_back(node);
        }
    }
    return Grid(std::move(d));
}

Grid Grid::unit(int n_dims, int m)
{
    const std::array<int, 3> res{m, m, m};
    const std::array<double, 3> ext{1.0, 1.0, 1.0};
    if (n_dims != 2 && n_dims != 3) {
        throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(n_dims));
    }
    return make(n_dims, std::span(res.data(), static_cast<std::size_t>(n_dims)),
                std::span(ext.data(), static_cast<std::size_t>(n_dims)));
}

MultiIndex Grid::index(std::size_t node) const
{
    MultiIndex idx{0, 0, 0};
    for (int a = 0; a < 3; ++a) {
        idx[a] = static_cast<int>(node / data_->stride[a]);
        node %= data_->stride[a];
    }
    return idx;
}

std::size_t Grid::node(const MultiIndex& idx) const
{
    std::size_t n = 0;
    for (int a = 0; a < 3; ++a) {
        n += static_cast<std::size_t>(idx[a]) * data_->stride[a];
    }
    return n;
}

Point Grid::position(std::size_t node) const
{
    const auto idx = index(node);
    Point x{0, 0, 0};
    for (int a = 0; a < dims(); ++a) {
        x[a] = idx[a] * data_->spacing[a];
    }
    return x;
}

bool Grid::operator==(const Grid& other) const
{
    if (data_ == other.data_) {
        return true;
    }
    return data_->dims == other.data_->dims && data_->resolution == other.data_->resolution &&
           data_->extents == other.data_->extents;
}

VectorField::VectorField(Grid grid, int components)
    : grid_(std::move(grid)), components_(components)
{
    if (components < 1) {
        throw ConfigError("a field needs at least one component");
    }
    values_.assign(static_cast<std::size_t>(components) * grid_.node_count(), 0.0);
}

VectorField::VectorField(Grid grid, int components, std::vector<double> values)
    : grid_(std::move(grid)), components_(components), values_(std::move(values))
{
    if (components < 1) {
        throw ConfigError("a field needs at least one component");
    }
    if (values_.size() != static_cast<std::size_t>(components) * grid_.node_count()) {
        throw ConfigError("field value count does not match components x nodes");
    }
}

std::span<double> VectorField::component(int c)
{
    return std::span(values_).subspan(c * grid_.node_count(), grid_.node_count());
}

std::span<const double> VectorField::component(int c) const
{
    return std::span(values_).subspan(c * grid_.node_count(), grid_.node_count());
}

bool VectorField::is_dirichlet_conforming() const
{
    for (int c = 0; c < components_; ++c) {
        for (std::size_t node = 0; node < grid_.node_count(); ++node) {
            if (grid_.is_boundary(node) && at(c, node) != 0.0) {
                return false;
            }
        }
    }
    return true;
}

namespace {
void check_compatible(const VectorField& a, const VectorField& b)
{
    if (!(a.grid() == b.grid()) || a.components() != b.components()) {
        throw ConfigError("fields live on different grids or have different component counts");
    }
}
} // namespace

VectorField& VectorField::operator+=(const VectorField& other)
{
    check_compatible(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] += other.values_[i];
    }
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& other)
{
    check_compatible(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] -= other.values_[i];
    }
    return *this;
}

VectorField& VectorField::operator*=(double s)
{
    for (auto& v : values_) {
        v *= s;
    }
    return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

void axpy(double s, const VectorField& b, VectorField& a)
{
    check_compatible(a, b);
    auto av = a.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) {
        av[i] += s * bv[i];
    }
}

VectorField field_from_fn(const Grid& grid, int components, const PointFn& fn)
{
    VectorField field(grid, components);
    std::vector<double> out(static_cast<std::size_t>(components));
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        std::fill(out.begin(), out.end(), 0.0);
        fn(grid.position(node), out);
        for (int c = 0; c < components; ++c) {
            field.at(c, node) = out[c];
        }
    }
    return field;
}

VectorField enforce_dirichlet(const VectorField& field)
{
    VectorField out = field;
    const auto& grid = field.grid();
    for (int c = 0; c < field.components(); ++c) {
        for (std::size_t node = 0; node < grid.node_count(); ++node) {
            if (grid.is_boundary(node)) {
                out.at(c, node) = 0.0;
            }
        }
    }
    return out;
}

namespace {
std::filesystem::path sidecar_path(const std::filesystem::path& path)
{
    auto side = path;
    side += ".json";
    return side;
}

std::uint64_t to_little_endian(std::uint64_t bits)
{
    if constexpr (std::endian::native == std::endian::big) {
        return __builtin_bswap64(bits);
    }
    return bits;
}
} // namespace

void save_field(const VectorField& field, const std::filesystem::path& path)
{
    const auto vals = field.values();
    std::string bytes(vals.size() * sizeof(double), '\0');
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const auto bits = to_little_endian(std::bit_cast<std::uint64_t>(vals[i]));
        std::memcpy(bytes.data() + i * sizeof(double), &bits, sizeof(bits));
    }
    const auto& g = field.grid();
    nlohmann::json meta;
    meta["n_dims"] = g.dims();
    meta["resolution"] = nlohmann::json::array();
    meta["extents"] = nlohmann::json::array();
    for (int a = 0; a < g.dims(); ++a) {
        meta["resolution"].push_back(g.resolution(a));
        meta["extents"].push_back(g.extent(a));
    }
    meta["components"] = field.components();
    io::write_atomic(path, bytes);
    io::write_json(sidecar_path(path), meta);
}

VectorField load_field(const std::filesystem::path& path)
{
    const auto meta = io::read_json(sidecar_path(path));
    const int n = meta.at("n_dims").get<int>();
    const auto res = meta.at("resolution").get<std::vector<int>>();
    const auto ext = meta.at("extents").get<std::vector<double>>();
    const int comps = meta.at("components").get<int>();
    const auto grid = Grid::make(n, res, ext);

    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open field dump " + path.string());
    }
    const std::size_t count = static_cast<std::size_t>(comps) * grid.node_count();
    std::string bytes(count * sizeof(double), '\0');
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
        throw ConfigError("field dump " + path.string() + " is truncated");
    }
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, bytes.data() + i * sizeof(double), sizeof(bits));
        values[i] = std::bit_cast<double>(to_little_endian(bits));
    }
    return VectorField(grid, comps, std::move(values));
}

} // namespace plap
