#pragma once

#include <cstdint>
#include <optional>

#include "paddle/types.hpp"

namespace paddle {

struct TaskSpec {
    int k_total = 5;
    int k_effective = 5;
    int shots = 5;
    int query_size = 75;
    std::uint64_t seed = 0;
    /// When set, every task shares the support set drawn from this seed and
    /// only the query draw depends on `seed`.
    std::optional<std::uint64_t> fixed_support_seed;

    void validate() const;
};

/// Number of query redraws attempted before giving up on hitting exactly
/// k_effective distinct query classes.
inline constexpr int kMaxQueryRedraws = 100;

/// Checks that `bank` can serve `spec`; throws ConfigError naming the first
/// deficient class otherwise.
void check_feasible(const FeatureBank& bank, const TaskSpec& spec);

/// Imbalanced few-shot episode:
///  1. k_total classes are picked from the bank (all of them when the bank
///     has exactly k_total), in bank order;
///  2. `shots` support vectors are drawn uniformly without replacement from
///     each of them;
///  3. k_effective of those classes are picked uniformly without replacement;
///  4. query_size vectors are drawn uniformly without replacement from the
///     pooled non-support vectors of the chosen classes, redrawn until all
///     k_effective classes are represented.
TaskInstance generate_task(const FeatureBank& bank, const TaskSpec& spec);

/// k Gaussian classes with centers uniform on the sphere of radius
/// `separation` and identity covariance. Values are rounded to float.
FeatureBank synth_gaussian_bank(int k, int dim, int per_class, double separation,
                                std::uint64_t seed);

/// Class centers used by synth_gaussian_bank for the same arguments.
Matrix synth_gaussian_centers(int k, int dim, double separation, std::uint64_t seed);

} // namespace paddle
