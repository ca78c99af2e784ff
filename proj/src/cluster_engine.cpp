#include "tailclust/cluster_engine.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>
#include <string>

#include "tailclust/error.hpp"

namespace tailclust {

namespace {

std::size_t floor_rank(double beta, std::size_t k) {
  return ClusterParams{k, 0, beta, std::nullopt}.beta_rank();
}

ColumnSet remove_all(const ColumnSet& from, const ColumnSet& taken) {
  ColumnSet rest;
  rest.reserve(from.size() - taken.size());
  std::set_difference(from.begin(), from.end(), taken.begin(), taken.end(), std::back_inserter(rest));
  return rest;
}

// Per-column statistic is fixed across iterations; compute it once.
std::vector<double> column_statistics(const ScaledMatrix& scaled, std::size_t rank) {
  std::vector<double> stats(scaled.p);
  for (std::size_t j = 0; j < scaled.p; ++j) stats[j] = upper_order_stat(scaled.column(j), rank);
  return stats;
}

Extraction extract_with(const ScaledMatrix& scaled, std::span<const std::size_t> active, std::size_t k,
                        std::span<const double> all_stats) {
  Extraction out;
  out.threshold = pooled_upper_order_stat(scaled, active, k * active.size());
  out.statistics.reserve(active.size());
  for (std::size_t j : active) {
    const double s = all_stats[j];
    out.statistics.push_back(s);
    if (s >= out.threshold) out.group.push_back(j);
  }
  return out;
}

void record(IterationTrace& trace, const ColumnSet& active, const Extraction& ex) {
  trace.iterations.push_back({active, ex.threshold, ex.statistics, ex.group});
}

void check_k_fits(std::size_t n, std::size_t k, std::size_t rank) {
  if (k < 1 || k > n) throw InvalidArgument("k=" + std::to_string(k) + " must lie in [1, n]");
  if (rank >= n) throw InvalidArgument("floor(beta*k) must be below n");
}

ColumnSet all_columns(std::size_t p) {
  ColumnSet cols(p);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  return cols;
}

}  // namespace

Extraction extract_heaviest_group(const ScaledMatrix& scaled, std::span<const std::size_t> active,
                                  std::size_t k, double beta) {
  if (active.empty()) throw InvalidArgument("extraction over an empty active set");
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0,1)");
  const std::size_t rank = floor_rank(beta, k);
  check_k_fits(scaled.n, k, rank);
  std::vector<double> stats(scaled.p, 0.0);
  for (std::size_t j : active) {
    if (j >= scaled.p) throw InvalidArgument("active column index out of range");
    stats[j] = upper_order_stat(scaled.column(j), rank);
  }
  return extract_with(scaled, active, k, stats);
}

ClusterResult cluster_known_g(const DataMatrix& data, const ClusterParams& params) {
  if (!params.known_g) throw InvalidArgument("cluster_known_g requires params.known_g");
  params.validate(data.rows(), data.cols());
  const std::size_t g = *params.known_g;
  const ScaledMatrix scaled = self_scale(data, params.k_star);

  IterationTrace trace;
  ColumnSet active = all_columns(data.cols());
  if (g == 1) return {TailPartition({active}, data.cols()), trace};

  const auto stats = column_statistics(scaled, params.beta_rank());
  std::vector<ColumnSet> groups;
  for (std::size_t level = 1; level < g; ++level) {
    if (active.empty()) throw ActiveSetExhausted(level);
    Extraction ex = extract_with(scaled, active, params.k, stats);
    record(trace, active, ex);
    active = remove_all(active, ex.group);
    groups.push_back(std::move(ex.group));
  }
  if (active.empty()) throw ActiveSetExhausted(g);
  groups.push_back(std::move(active));
  return {TailPartition(std::move(groups), data.cols()), std::move(trace)};
}

ClusterResult cluster_unknown_g(const DataMatrix& data, const ClusterParams& params) {
  params.validate(data.rows(), data.cols());
  const ScaledMatrix scaled = self_scale(data, params.k_star);
  const auto stats = column_statistics(scaled, params.beta_rank());

  IterationTrace trace;
  std::vector<ColumnSet> groups;
  ColumnSet active = all_columns(data.cols());
  while (!active.empty()) {
    Extraction ex = extract_with(scaled, active, params.k, stats);
    // Pigeonhole: some active column holds >= k of the top k*|active| pooled
    // values, and floor(beta*k) < k, so the group is never empty.
    if (ex.group.empty()) throw Error("internal error: empty extraction with beta < 1");
    record(trace, active, ex);
    active = remove_all(active, ex.group);
    groups.push_back(std::move(ex.group));
  }
  return {TailPartition(std::move(groups), data.cols()), std::move(trace)};
}

ClusterResult cluster(const DataMatrix& data, const ClusterParams& params) {
  return params.known_g ? cluster_known_g(data, params) : cluster_unknown_g(data, params);
}

nlohmann::json to_json(const IterationTrace& trace, const std::vector<std::string>& labels) {
  auto names = [&](const ColumnSet& s) {
    nlohmann::json a = nlohmann::json::array();
    for (std::size_t j : s) a.push_back(labels.at(j));
    return a;
  };
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t l = 0; l < trace.iterations.size(); ++l) {
    const auto& it = trace.iterations[l];
    out.push_back({{"iteration", l + 1},
                   {"active", names(it.active)},
                   {"threshold", it.threshold},
                   {"statistics", it.statistics},
                   {"extracted", names(it.extracted)}});
  }
  return out;
}

}  // namespace tailclust
