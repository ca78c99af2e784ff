#include "tailclust/hill_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "tailclust/error.hpp"

namespace tailclust {

HillEstimate hill(std::span<const double> column, std::size_t k) {
  const std::size_t n = column.size();
  if (k < 1 || k + 1 > n) {
    throw InvalidArgument("Hill k=" + std::to_string(k) + " outside [1, n-1] for n=" + std::to_string(n));
  }
  std::vector<double> top(column.begin(), column.end());
  std::partial_sort(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k + 1), top.end(), std::greater<>());
  const double threshold = top[k];
  if (!(threshold > 0.0)) throw NonpositiveOrderStat(k, threshold);
  const double log_threshold = std::log(threshold);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += std::log(top[i]) - log_threshold;
  return {acc / static_cast<double>(k), k, std::nullopt, std::nullopt, std::nullopt};
}

HillEstimate hill_ci(const HillEstimate& estimate, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("confidence level must lie in (0,1)");
  if (estimate.k_used < 1) throw InvalidArgument("Hill estimate carries no k");
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 * (1.0 + level));
  const double half = z / std::sqrt(static_cast<double>(estimate.k_used));
  HillEstimate out = estimate;
  out.ci_low = std::max(0.0, estimate.gamma_hat * (1.0 - half));
  out.ci_high = estimate.gamma_hat * (1.0 + half);
  out.ci_level = level;
  return out;
}

std::vector<double> hill_all(const DataMatrix& data, std::size_t k) {
  std::vector<double> out(data.cols());
  for (std::size_t j = 0; j < data.cols(); ++j) {
    try {
      out[j] = hill(data.column(j), k).gamma_hat;
    } catch (const NonpositiveOrderStat& e) {
      throw Error("column " + data.label(j) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ColumnSet> kmeans_1d_exact(std::span<const double> values, std::size_t g) {
  const std::size_t p = values.size();
  if (g < 1) throw InvalidArgument("k-means needs at least one group");
  if (g > p) throw InvalidArgument("k-means asked for g=" + std::to_string(g) + " groups from " +
                                   std::to_string(p) + " values");

  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  // Prefix sums over sorted values, centred for numerical stability.
  const double centre = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(p);
  std::vector<double> s1(p + 1, 0.0), s2(p + 1, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    const double v = values[order[i]] - centre;
    s1[i + 1] = s1[i] + v;
    s2[i + 1] = s2[i] + v * v;
  }
  // Cost of sorted block [a, b).
  auto cost = [&](std::size_t a, std::size_t b) {
    const double m = static_cast<double>(b - a);
    const double sum = s1[b] - s1[a];
    return std::max(0.0, (s2[b] - s2[a]) - sum * sum / m);
  };

  constexpr double inf = std::numeric_limits<double>::infinity();
  // best[m][j]: optimal cost of the first j sorted values in m+1 groups.
  std::vector<std::vector<double>> best(g, std::vector<double>(p + 1, inf));
  std::vector<std::vector<std::size_t>> split(g, std::vector<std::size_t>(p + 1, 0));
  for (std::size_t j = 1; j <= p; ++j) best[0][j] = cost(0, j);
  for (std::size_t m = 1; m < g; ++m) {
    for (std::size_t j = m + 1; j <= p; ++j) {
      for (std::size_t i = m; i < j; ++i) {
        const double c = best[m - 1][i] + cost(i, j);
        if (c < best[m][j]) {
          best[m][j] = c;
          split[m][j] = i;
        }
      }
    }
  }

  std::vector<ColumnSet> groups(g);
  std::size_t end = p;
  for (std::size_t m = g; m-- > 0;) {
    const std::size_t begin = (m == 0) ? 0 : split[m][end];
    for (std::size_t i = begin; i < end; ++i) groups[m].push_back(order[i]);
    end = begin;
  }

  // Heaviest first: reverse value order, then order by descending group sum.
  std::reverse(groups.begin(), groups.end());
  std::vector<double> sums(g);
  for (auto& grp : groups) std::sort(grp.begin(), grp.end());
  std::vector<std::size_t> rank(g);
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  for (std::size_t l = 0; l < g; ++l) {
    for (std::size_t j : groups[l]) sums[l] += values[j];
  }
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) { return sums[a] > sums[b]; });
  std::vector<ColumnSet> ordered;
  ordered.reserve(g);
  for (std::size_t r : rank) ordered.push_back(std::move(groups[r]));
  return ordered;
}

double within_cluster_ss(std::span<const double> values, const std::vector<ColumnSet>& groups) {
  double total = 0.0;
  for (const auto& grp : groups) {
    if (grp.empty()) continue;
    double mean = 0.0;
    for (std::size_t j : grp) mean += values[j];
    mean /= static_cast<double>(grp.size());
    for (std::size_t j : grp) total += (values[j] - mean) * (values[j] - mean);
  }
  return total;
}

TailPartition tail_kmeans(const DataMatrix& data, std::size_t g, std::size_t k) {
  const auto gammas = hill_all(data, k);
  return TailPartition(kmeans_1d_exact(gammas, g), data.cols());
}

GroupIndexEstimate aggregate_group_indices(std::span<const double> raw_hill, const TailPartition& partition) {
  if (raw_hill.size() != partition.dimension()) throw InvalidArgument("Hill vector length differs from p");
  GroupIndexEstimate out;
  out.raw_hill.assign(raw_hill.begin(), raw_hill.end());
  out.column_gammas.assign(raw_hill.size(), 0.0);
  for (const auto& grp : partition.groups()) {
    double mean = 0.0;
    for (std::size_t j : grp) mean += raw_hill[j];
    mean /= static_cast<double>(grp.size());
    out.group_gammas.push_back(mean);
    for (std::size_t j : grp) out.column_gammas[j] = mean;
  }
  return out;
}

GroupIndexEstimate estimate_group_indices(const DataMatrix& data, const TailPartition& partition,
                                          std::size_t k_hill) {
  if (partition.dimension() != data.cols()) throw InvalidArgument("partition does not match the data");
  return aggregate_group_indices(hill_all(data, k_hill), partition);
}

}  // namespace tailclust
