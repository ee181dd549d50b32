#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace plap {

/// Outcome of one randomized inequality sweep.
///
/// Margins are (rhs - lhs) / max(|lhs|, |rhs|); a sample is a violation when
/// its margin is below -1e-12. worst_slack is the smallest margin seen.
struct InequalitySweep {
    std::string name;
    int samples = 0;
    int violations = 0;
    double worst_slack = 0.0;
    /// Largest observed lhs/rhs ratio (or supremum of the tracked quotient); NaN if not applicable.
    double empirical_constant = 0.0;
    std::uint64_t seed = 0;
    /// Sweep-specific extras (per-mu suprema, sub-checks).
    nlohmann::json details = nlohmann::json::object();
};

nlohmann::json to_json(const InequalitySweep& s);

/// name,samples,violations,worst_slack,empirical_constant
std::string sweeps_csv(const std::vector<InequalitySweep>& sweeps);

/// Relative margin used by every sweep.
double relative_margin(double lhs, double rhs);

/// |sum_i cubic_i lap_i| <= |grad|^2 |D^2| |lap| for random grad (N x n) and
/// Hessians symmetric in the last two indices; also |b|^2 <= |lap|^2 |grad|^2 with
/// b_j = sum_i d_j v_i lap_i (reported under details.intermediate).
InequalitySweep check_appendix(int samples, std::uint64_t seed, int N, int n);

/// Supremum per mu of |(mu+|A|)^(p-2) A - (mu+|B|)^(p-2) B| (mu+|A|+|B|)^(2-p) / |A-B|
/// over random A, B in R^{N x n}. details holds the per-mu suprema and whether
/// they agree within a factor 2.
InequalitySweep check_tensor_lipschitz(int samples, std::uint64_t seed, double p,
                                       const std::vector<double>& mu_list, int N = 2, int n = 3);

/// The single tensor quotient above (0 when A = B). A and B have equal length.
double tensor_quotient(const std::vector<double>& A, const std::vector<double>& B, double p,
                       double mu);

/// x^(2-p) y <= x + y^(1/(p-1)) for x, y log-uniform in [1e-6, 1e6].
InequalitySweep check_young_type(int samples, std::uint64_t seed, double p);

/// Two sweeps: (mu+|a|)^(2-p) <= 1 + |a|^(2-p) (needs mu <= 1), and
/// |(mu+|a|)^(2-p) - (mu+|b|)^(2-p)| <= (2-p) mu^(1-p) |a-b| (needs mu > 0).
std::vector<InequalitySweep> check_mu_bounds(int samples, std::uint64_t seed, double p, double mu);

} // namespace plap
