#pragma once

// Hill estimation, the tail k-means baseline and group-level index aggregation.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tailclust/tail_core.hpp"

namespace tailclust {

struct HillEstimate {
  double gamma_hat = 0.0;
  std::size_t k_used = 0;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::optional<double> ci_level;
};

/// Description of the band formula used by hill_ci, echoed in CLI output.
inline constexpr const char* kHillBandMethod = "asymptotic normal: gamma_hat * (1 -/+ z_{(1+level)/2} / sqrt(k)), lower end clipped at 0";

/// gamma_hat = (1/k) sum_{i=0}^{k-1} [log X_{n-i:n} - log X_{n-k:n}].
/// Requires 1 <= k <= n-1 and X_{n-k:n} > 0.
HillEstimate hill(std::span<const double> column, std::size_t k);

/// Adds a two-sided asymptotic normal band at `level` in (0,1).
HillEstimate hill_ci(const HillEstimate& estimate, double level);

/// Hill estimate of every column.
std::vector<double> hill_all(const DataMatrix& data, std::size_t k);

/// Globally optimal 1-D k-means (minimum within-group sum of squares) by
/// dynamic programming over sorted values. Groups are returned ordered by
/// descending sum of member values; indices within a group ascend.
std::vector<ColumnSet> kmeans_1d_exact(std::span<const double> values, std::size_t g);

/// Within-group sum of squared deviations from the group means.
double within_cluster_ss(std::span<const double> values, const std::vector<ColumnSet>& groups);

/// Hill per column, then exact 1-D k-means on the estimates.
TailPartition tail_kmeans(const DataMatrix& data, std::size_t g, std::size_t k);

struct GroupIndexEstimate {
  std::vector<double> group_gammas;
  std::vector<double> column_gammas;
  std::vector<double> raw_hill;
};

/// Averages Hill estimates within each group and assigns the average to every member.
GroupIndexEstimate estimate_group_indices(const DataMatrix& data, const TailPartition& partition,
                                          std::size_t k_hill);

/// Same aggregation from precomputed per-column estimates.
GroupIndexEstimate aggregate_group_indices(std::span<const double> raw_hill, const TailPartition& partition);

}  // namespace tailclust
