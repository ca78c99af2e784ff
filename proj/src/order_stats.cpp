#include "tailclust/order_stats.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include "tailclust/error.hpp"

namespace tailclust {

double upper_order_stat_inplace(std::span<double> scratch, std::size_t m) {
  if (m >= scratch.size()) {
    throw InvalidArgument("order statistic rank m=" + std::to_string(m) + " outside [0, " +
                          std::to_string(scratch.size()) + ")");
  }
  // Introselect is deterministic for a given input, so equal inputs give equal outputs.
  auto nth = scratch.begin() + static_cast<std::ptrdiff_t>(m);
  std::nth_element(scratch.begin(), nth, scratch.end(), std::greater<>());
  return *nth;
}

double upper_order_stat(std::span<const double> column, std::size_t m) {
  std::vector<double> scratch(column.begin(), column.end());
  return upper_order_stat_inplace(scratch, m);
}

ScaledMatrix self_scale(const DataMatrix& data, std::size_t k_star) {
  const std::size_t n = data.rows();
  const std::size_t p = data.cols();
  if (k_star > n - 1) {
    throw InvalidArgument("k_star=" + std::to_string(k_star) + " exceeds n-1=" + std::to_string(n - 1));
  }
  ScaledMatrix out;
  out.n = n;
  out.p = p;
  out.k_star = k_star;
  out.values.resize(n * p);
  out.scale_denominators.resize(p);
  std::vector<double> scratch(n);
  for (std::size_t j = 0; j < p; ++j) {
    auto col = data.column(j);
    std::copy(col.begin(), col.end(), scratch.begin());
    const double denom = upper_order_stat_inplace(scratch, k_star);
    if (!(denom > 0.0)) throw NonpositiveThreshold(j, denom);
    out.scale_denominators[j] = denom;
    double* dst = out.values.data() + j * n;
    for (std::size_t i = 0; i < n; ++i) dst[i] = col[i] / denom;
  }
  return out;
}

double pooled_upper_order_stat(const ScaledMatrix& scaled, std::span<const std::size_t> active,
                               std::size_t rank_from_top) {
  if (active.empty()) throw InvalidArgument("pooled order statistic over an empty active set");
  const std::size_t total = scaled.n * active.size();
  if (rank_from_top < 1 || rank_from_top > total) {
    throw InvalidArgument("pooled rank " + std::to_string(rank_from_top) + " outside [1, " +
                          std::to_string(total) + "]");
  }
  std::vector<double> pool;
  pool.reserve(total);
  for (std::size_t j : active) {
    if (j >= scaled.p) throw InvalidArgument("active column index out of range");
    auto c = scaled.column(j);
    pool.insert(pool.end(), c.begin(), c.end());
  }
  return upper_order_stat_inplace(pool, rank_from_top - 1);
}

}  // namespace tailclust
