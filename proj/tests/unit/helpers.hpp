#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tailclust/rng.hpp"
#include "tailclust/tail_core.hpp"

namespace testutil {

// n x p matrix of U^-gamma_j draws; gammas cycle over the columns.
inline tailclust::DataMatrix pareto_matrix(std::size_t n, const std::vector<double>& gammas, std::uint64_t seed) {
  tailclust::CounterStream s(seed, 99);
  std::vector<double> v(n * gammas.size());
  for (std::size_t j = 0; j < gammas.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) v[j * n + i] = std::pow(s.uniform(), -gammas[j]);
  return tailclust::DataMatrix(n, gammas.size(), std::move(v));
}

// Deterministic exact Pareto quantiles ((n+1)/(n+1-i))^gamma, i = 1..n.
inline std::vector<double> pareto_quantiles(std::size_t n, double gamma) {
  std::vector<double> v(n);
  for (std::size_t i = 1; i <= n; ++i)
    v[i - 1] = std::pow(static_cast<double>(n + 1) / static_cast<double>(n + 1 - i), gamma);
  return v;
}

inline tailclust::DataMatrix hand_example() {
  return tailclust::DataMatrix::from_columns({{1, 2, 3, 4, 5, 100}, {1, 1.2, 1.4, 1.6, 1.8, 1.9}});
}

}  // namespace testutil

namespace testutil {

// Kolmogorov critical value at level 0.01 (asymptotic, with the usual small-n correction).
inline constexpr double kKsC01 = 1.628;

template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

template <class Cdf>
bool ks_passes(const std::vector<double>& xs, Cdf cdf) {
  const double rn = std::sqrt(static_cast<double>(xs.size()));
  return ks_statistic(xs, cdf) * (rn + 0.12 + 0.11 / rn) <= kKsC01;
}

inline bool ks_two_sample_passes(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d <= kKsC01 * std::sqrt((na + nb) / (na * nb));
}

}  // namespace testutil
