#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"
#include "helpers.hpp"
#include "tailclust/error.hpp"
#include "tailclust/hill_baseline.hpp"

using namespace tailclust;
using Catch::Approx;

TEST_CASE("hill estimator examples", "[hill]") {
  const double e = std::numbers::e;
  std::vector<double> col{1, e * e, e};
  CHECK(hill(col, 2).gamma_hat == Approx(1.5).epsilon(1e-15));
  std::vector<double> flat(20, 3.0);
  CHECK(hill(flat, 7).gamma_hat == 0.0);
  CHECK_THROWS_AS(hill(col, 3), InvalidArgument);
  CHECK_THROWS_AS(hill(col, 0), InvalidArgument);
  std::vector<double> neg{-1, -2, 5};
  CHECK_THROWS_AS(hill(neg, 2), NonpositiveOrderStat);
}

TEST_CASE("hill estimator on exact Pareto quantiles", "[hill]") {
  // Oracle: 50-digit evaluation of mean_{i<k} log(X_{(n-i)}/X_{(n-k)}) on the same column.
  CHECK(hill(testutil::pareto_quantiles(100, 1.0), 10).gamma_hat == Approx(0.88745401549081901).epsilon(1e-13));
  CHECK(hill(testutil::pareto_quantiles(100, 0.25), 10).gamma_hat == Approx(0.22186350387270475).epsilon(1e-13));
  CHECK(hill(testutil::pareto_quantiles(10000, 1.0), 1000).gamma_hat == Approx(0.99662660082705724).epsilon(1e-12));
}

TEST_CASE("hill estimator is scale invariant", "[hill]") {
  auto col = testutil::pareto_quantiles(500, 0.7);
  auto scaled = col;
  for (auto& x : scaled) x *= 13.25;
  CHECK(hill(scaled, 40).gamma_hat == Approx(hill(col, 40).gamma_hat).epsilon(1e-13));
}

TEST_CASE("hill confidence band", "[hill]") {
  auto b = hill_ci(HillEstimate{1.0, 100}, 0.95);
  CHECK(*b.ci_low == Approx(1 - 1.959963984540054 / 10).epsilon(1e-12));
  CHECK(*b.ci_high == Approx(1 + 1.959963984540054 / 10).epsilon(1e-12));
  auto z = hill_ci(HillEstimate{0.0, 9}, 0.95);
  CHECK(*z.ci_low == 0.0);
  CHECK(*z.ci_high == 0.0);
  auto wide = hill_ci(HillEstimate{0.8, 30}, 0.99);
  auto narrow = hill_ci(HillEstimate{0.8, 30}, 0.90);
  CHECK(*wide.ci_low < *narrow.ci_low);
  CHECK(*wide.ci_high > *narrow.ci_high);
  CHECK_THROWS_AS(hill_ci(HillEstimate{1.0, 10}, 1.0), InvalidArgument);
  auto tiny = hill_ci(HillEstimate{1.0, 1}, 0.99);
  CHECK(*tiny.ci_low == 0.0);
}

TEST_CASE("exact one-dimensional k-means", "[hill]") {
  std::vector<double> v{1.0, 1.1, 2.0, 2.1};
  CHECK(kmeans_1d_exact(v, 2) == std::vector<ColumnSet>{{2, 3}, {0, 1}});
  CHECK(kmeans_1d_exact(v, 1) == std::vector<ColumnSet>{{0, 1, 2, 3}});
  std::vector<double> w{0.3, 0.9, 0.1, 0.5};
  CHECK(kmeans_1d_exact(w, 4) == std::vector<ColumnSet>{{1}, {3}, {0}, {2}});
  CHECK_THROWS_AS(kmeans_1d_exact(v, 5), InvalidArgument);
  CHECK_THROWS_AS(kmeans_1d_exact(v, 0), InvalidArgument);
}

TEST_CASE("k-means optimum matches exhaustive search", "[hill]") {
  CounterStream s(77, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + s.next_u64() % 7;
    const std::size_t g = 1 + s.next_u64() % n;
    std::vector<double> v(n);
    for (auto& x : v) x = std::round(s.uniform() * 20.0) / 10.0;
    // Enumerate every labelling with exactly g non-empty clusters.
    double best = 1e300;
    std::vector<std::size_t> lab(n, 0);
    while (true) {
      std::vector<ColumnSet> groups(g);
      for (std::size_t i = 0; i < n; ++i) groups[lab[i]].push_back(i);
      bool full = std::all_of(groups.begin(), groups.end(), [](const ColumnSet& c) { return !c.empty(); });
      if (full) best = std::min(best, within_cluster_ss(v, groups));
      std::size_t i = 0;
      while (i < n && ++lab[i] == g) lab[i++] = 0;
      if (i == n) break;
    }
    auto got = kmeans_1d_exact(v, g);
    REQUIRE(got.size() == g);
    CHECK(within_cluster_ss(v, got) == Approx(best).margin(1e-12));
  }
}

TEST_CASE("tail k-means baseline", "[hill]") {
  auto data = DataMatrix::from_columns({testutil::pareto_quantiles(100, 1.0), testutil::pareto_quantiles(100, 0.25)});
  CHECK(tail_kmeans(data, 2, 10) == TailPartition({{0}, {1}}, 2));
  CHECK(tail_kmeans(data, 1, 10) == TailPartition({{0, 1}}, 2));
  auto m = testutil::pareto_matrix(300, {1.0, 0.5, 0.25}, 8);
  auto dup = DataMatrix::from_columns({std::vector<double>(m.column(0).begin(), m.column(0).end()),
                                       std::vector<double>(m.column(1).begin(), m.column(1).end()),
                                       std::vector<double>(m.column(0).begin(), m.column(0).end()),
                                       std::vector<double>(m.column(2).begin(), m.column(2).end())});
  for (std::size_t g = 1; g <= 3; ++g) {
    auto labels = tail_kmeans(dup, g, 20).labels();
    CHECK(labels[0] == labels[2]);
  }
}

TEST_CASE("group index aggregation", "[hill]") {
  std::vector<double> two{1.0, 0.8};
  auto a = aggregate_group_indices(two, TailPartition({{0, 1}}, 2));
  CHECK(a.group_gammas[0] == Approx(0.9));
  CHECK(a.column_gammas == std::vector<double>{a.group_gammas[0], a.group_gammas[0]});
  auto s = aggregate_group_indices(two, TailPartition({{0}, {1}}, 2));
  CHECK(s.column_gammas == two);
  std::vector<double> three{1.2, 0.8, 0.3};
  auto b = aggregate_group_indices(three, TailPartition({{0, 1}, {2}}, 3));
  CHECK(b.group_gammas[0] == Approx(1.0));
  CHECK(b.group_gammas[1] == Approx(0.3));
  CHECK(b.column_gammas[1] == Approx(1.0));
  CHECK_THROWS_AS(aggregate_group_indices(three, TailPartition({{0, 1}}, 2)), InvalidArgument);
}
