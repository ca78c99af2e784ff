#pragma once

// Order-statistic selection and the self-scaling transform.
//
// Convention: X_{n-m:n} is the (m+1)-th largest of n values, so m = 0 is the
// maximum and m = n-1 the minimum. Ties are kept as duplicates.

#include <cstddef>
#include <span>
#include <vector>

#include "tailclust/tail_core.hpp"

namespace tailclust {

/// X_{n-m:n}: the (m+1)-th largest element. Linear expected time (selection,
/// not a full sort); the input is not modified.
double upper_order_stat(std::span<const double> column, std::size_t m);

/// Same, but reorders `scratch` in place instead of copying.
double upper_order_stat_inplace(std::span<double> scratch, std::size_t m);

/// Columns divided by their own X_{n-k*:n}.
struct ScaledMatrix {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> values;  // column-major
  std::vector<double> scale_denominators;
  std::size_t k_star = 0;

  std::span<const double> column(std::size_t j) const { return {values.data() + j * n, n}; }
};

/// Y_i^(j) = X_i^(j) / X_{n-k*:n}^(j). Throws NonpositiveThreshold for the first
/// column whose denominator is <= 0, InvalidArgument when k_star > n-1.
ScaledMatrix self_scale(const DataMatrix& data, std::size_t k_star);

/// The rank_from_top-th largest value (rank 1 = maximum) among all n*|active|
/// scaled entries of the active columns.
double pooled_upper_order_stat(const ScaledMatrix& scaled, std::span<const std::size_t> active,
                               std::size_t rank_from_top);

}  // namespace tailclust
