#pragma once

// Iterative tail clustering on self-scaled data.
//
// Each iteration pools the scaled observations of the still-active columns,
// takes u = the (k*|active|)-th largest pooled value, and extracts every
// active column whose (floor(beta*k)+1)-th largest scaled value is >= u. The
// extracted columns form the next (lighter) group.

#include <cstddef>
#include <span>
#include <vector>

#include "tailclust/order_stats.hpp"
#include "tailclust/tail_core.hpp"

namespace tailclust {

struct IterationRecord {
  ColumnSet active;
  double threshold = 0.0;
  /// Y_{n-floor(beta k):n} per column of `active`, same order.
  std::vector<double> statistics;
  ColumnSet extracted;
};

struct IterationTrace {
  std::vector<IterationRecord> iterations;
};

struct Extraction {
  ColumnSet group;
  double threshold = 0.0;
  std::vector<double> statistics;
};

/// One thresholding step over `active` (sorted, non-empty). k*|active| must not
/// exceed n*|active| and floor(beta*k) must be below n.
Extraction extract_heaviest_group(const ScaledMatrix& scaled, std::span<const std::size_t> active,
                                  std::size_t k, double beta);

struct ClusterResult {
  TailPartition partition;
  IterationTrace trace;
};

/// Exactly params.known_g groups; the last group is whatever remains.
/// Throws ActiveSetExhausted if the columns run out first.
ClusterResult cluster_known_g(const DataMatrix& data, const ClusterParams& params);

/// Extract groups until no column is left; the group count is emergent.
ClusterResult cluster_unknown_g(const DataMatrix& data, const ClusterParams& params);

/// Dispatches on params.known_g.
ClusterResult cluster(const DataMatrix& data, const ClusterParams& params);

nlohmann::json to_json(const IterationTrace& trace, const std::vector<std::string>& labels);

}  // namespace tailclust
