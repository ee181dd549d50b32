#pragma once

#include "plap/grid.hpp"
#include "plap/linear_elliptic.hpp"
#include "plap/nonlinear_solver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace plap {

inline constexpr const char* kVersion = "0.1.0";

/// Source term specification.
///   sine:         amplitude * sin(pi x_1/L_1) ... in every component
///   sine_product: continuous operator applied to the default sine-product solution
///   random_sine:  sample `index` of the random sine family for the run seed
///   field:        a field dump at `path`
struct SourceSpec {
    std::string kind = "sine";
    double amplitude = 10.0;
    std::uint64_t index = 0;
    std::string path;
};

struct ExperimentConfig {
    int dims = 2;
    std::vector<int> grids{33};
    std::vector<double> extents{1.0, 1.0};
    int components = 1;
    SolverConfig solver{};
    SourceSpec source{};

    int constants_samples = 8;
    int constants_ascent = 10;
    std::vector<double> constants_qs{2.0, 4.0};
    /// Optional path of a saved constants report; skips estimation.
    std::string constants_path;

    double oracle_tol = 1e-9;
    int oracle_max_iters = 5000;

    std::vector<double> mu_schedule{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};

    int inequality_samples = 100000;
    std::vector<double> inequality_p{1.1, 1.5, 1.9};
    std::vector<double> tensor_mu{1e-6, 1e-3, 1.0};
    std::vector<double> bound_mu{1e-4, 1e-2, 1.0};

    std::uint64_t seed = 1;
    std::string out = "out";
};

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Missing keys keep the values of `base`; wrong types raise ConfigError.
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc, ExperimentConfig base = {});

/// Range checks shared by every subcommand (not the constant-dependent ones).
void validate_basic(const ExperimentConfig& cfg);

Grid make_grid(const ExperimentConfig& cfg, int m);
VectorField make_source(const ExperimentConfig& cfg, const Grid& grid);
/// Loads or estimates constants, always covering q = 2 and the solver's q.
ConstantsReport resolve_constants(const ExperimentConfig& cfg, const Grid& grid);

struct MmsRow {
    int m = 0;
    double h = 0.0;
    /// Fixed point vs u_exact for nondivergence-manufactured data, W^{2,q}.
    double same_disc_err = 0.0;
    /// Oracle vs u_exact for the continuous source, L^2.
    double oracle_err = 0.0;
    double oracle_order = 0.0;
    /// Fixed point vs oracle, both for the continuous source, L^2.
    double cross_dist = 0.0;
    double cross_order = 0.0;
    int fp_iterations = 0;
    bool converged = false;
};

struct MmsTable {
    std::vector<MmsRow> rows;
    bool all_converged() const;
    std::string to_csv() const;
    nlohmann::json to_json() const;
};

/// Manufactured-solution refinement study over cfg.grids (at least two).
MmsTable mms_study(const ExperimentConfig& cfg);

/// Command-line entry point. Returns 0 on success, 1 on numerical
/// non-convergence, 2 on invalid configuration or usage.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace plap
