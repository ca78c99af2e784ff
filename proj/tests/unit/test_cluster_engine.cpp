#include <algorithm>
#include <functional>

#include "catch_amalgamated.hpp"
#include "helpers.hpp"
#include "tailclust/cluster_engine.hpp"
#include "tailclust/error.hpp"

using namespace tailclust;
using Catch::Approx;

namespace {

double nth_largest(std::vector<double> v, std::size_t rank) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v[rank - 1];
}

// Straightforward re-implementation with full sorts; throws std::out_of_range
// when the active set runs out before g groups exist.
std::vector<ColumnSet> reference_known_g(const DataMatrix& x, std::size_t k, std::size_t k_star, double beta,
                                         std::size_t g) {
  const std::size_t n = x.rows(), p = x.cols();
  std::vector<std::vector<double>> y(p);
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> col(x.column(j).begin(), x.column(j).end());
    const double den = nth_largest(col, k_star + 1);
    for (double v : col) y[j].push_back(v / den);
  }
  const auto rank = static_cast<std::size_t>(std::floor(beta * static_cast<double>(k)));
  ColumnSet active(p);
  for (std::size_t j = 0; j < p; ++j) active[j] = j;
  std::vector<ColumnSet> groups;
  for (std::size_t l = 1; l < g; ++l) {
    if (active.empty()) throw std::out_of_range("exhausted");
    std::vector<double> pool;
    for (std::size_t j : active) pool.insert(pool.end(), y[j].begin(), y[j].end());
    const double u = nth_largest(pool, k * active.size());
    ColumnSet grp, rest;
    for (std::size_t j : active) (nth_largest(y[j], rank + 1) >= u ? grp : rest).push_back(j);
    groups.push_back(grp);
    active = rest;
  }
  if (active.empty()) throw std::out_of_range("exhausted");
  groups.push_back(active);
  (void)n;
  return groups;
}

}  // namespace

TEST_CASE("extraction on the hand example", "[cluster_engine]") {
  auto sc = self_scale(testutil::hand_example(), 4);
  const ColumnSet both{0, 1};
  auto ex = extract_heaviest_group(sc, both, 2, 0.5);
  CHECK(ex.threshold == Approx(1.9 / 1.2));
  REQUIRE(ex.statistics.size() == 2);
  CHECK(ex.statistics[0] == 2.5);
  CHECK(ex.statistics[1] == Approx(1.5));
  CHECK(ex.group == ColumnSet{0});
}

TEST_CASE("extraction degenerate cases", "[cluster_engine]") {
  auto sc = self_scale(testutil::hand_example(), 4);
  const ColumnSet second{1};
  CHECK(extract_heaviest_group(sc, second, 3, 0.7).group == second);
  auto twin = DataMatrix::from_columns({{1, 2, 3, 4, 5, 100}, {1, 2, 3, 4, 5, 100}});
  auto sc2 = self_scale(twin, 4);
  const ColumnSet both{0, 1};
  CHECK(extract_heaviest_group(sc2, both, 2, 0.5).group == both);
  const ColumnSet none;
  CHECK_THROWS_AS(extract_heaviest_group(sc, none, 2, 0.5), InvalidArgument);
}

TEST_CASE("known g on the hand example", "[cluster_engine]") {
  auto r = cluster_known_g(testutil::hand_example(), ClusterParams{2, 4, 0.5, 2});
  CHECK(r.partition == TailPartition({{0}, {1}}, 2));
  CHECK(r.trace.iterations.size() == 1);
  CHECK(r.trace.iterations[0].threshold == Approx(1.9 / 1.2));
}

TEST_CASE("unknown g on the hand example resolves the tie inclusively", "[cluster_engine]") {
  auto r = cluster_unknown_g(testutil::hand_example(), ClusterParams{2, 4, 0.5, std::nullopt});
  CHECK(r.partition == TailPartition({{0}, {1}}, 2));
  REQUIRE(r.trace.iterations.size() == 2);
  CHECK(r.trace.iterations[1].threshold == Approx(1.5));
  CHECK(r.trace.iterations[1].statistics[0] == Approx(1.5));
  CHECK(r.trace.iterations[1].extracted == ColumnSet{1});
}

TEST_CASE("g equal to one returns everything", "[cluster_engine]") {
  auto data = testutil::pareto_matrix(300, {1, 0.5, 0.25, 0.5}, 3);
  auto r = cluster_known_g(data, ClusterParams{5, 100, 0.6, 1});
  CHECK(r.partition == TailPartition({{0, 1, 2, 3}}, 4));
  CHECK(r.trace.iterations.empty());
}

TEST_CASE("single column with unknown g", "[cluster_engine]") {
  auto data = testutil::pareto_matrix(50, {1}, 4);
  auto r = cluster_unknown_g(data, ClusterParams{3, 20, 0.7, std::nullopt});
  CHECK(r.partition == TailPartition({{0}}, 1));
  CHECK(r.trace.iterations.size() == 1);
}

TEST_CASE("g equal to p matches a brute-force reference", "[cluster_engine]") {
  int exhausted = 0, agreed = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto data = testutil::pareto_matrix(200, {1.0, 0.6, 0.3}, seed);
    const ClusterParams params{6, 60, 0.5, 3};
    std::optional<std::vector<ColumnSet>> ref;
    try {
      ref = reference_known_g(data, 6, 60, 0.5, 3);
    } catch (const std::out_of_range&) {
    }
    if (ref) {
      auto r = cluster_known_g(data, params);
      CHECK(r.partition.groups() == *ref);
      ++agreed;
    } else {
      CHECK_THROWS_AS(cluster_known_g(data, params), ActiveSetExhausted);
      ++exhausted;
    }
  }
  CHECK(agreed > 0);
}

TEST_CASE("known g agrees with the reference on random designs", "[cluster_engine]") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto data = testutil::pareto_matrix(400, {1.0, 1.0, 0.5, 0.5, 0.25, 0.25}, 100 + seed);
    for (std::size_t g = 1; g <= 3; ++g) {
      const ClusterParams params{8, 300, 0.6, g};
      try {
        auto ref = reference_known_g(data, 8, 300, 0.6, g);
        CHECK(cluster_known_g(data, params).partition.groups() == ref);
      } catch (const std::out_of_range&) {
        CHECK_THROWS_AS(cluster_known_g(data, params), ActiveSetExhausted);
      }
    }
  }
}

TEST_CASE("identical-law columns mostly land in the first group", "[cluster_engine]") {
  // Pilot (100 reps): a single group occurs in roughly 1 rep in 9 at these
  // defaults, but the first group holds most columns on average.
  double share = 0.0;
  int single = 0;
  const int reps = 100;
  for (int rep = 0; rep < reps; ++rep) {
    auto data = testutil::pareto_matrix(2000, std::vector<double>(10, 1.0), 500 + rep);
    auto params = default_params(10, 2000);
    auto r = cluster_unknown_g(data, params);
    share += static_cast<double>(r.partition.group(0).size()) / 10.0;
    single += r.partition.size() == 1;
  }
  share /= reps;
  CHECK(share >= 0.75);
  CHECK(single >= 1);
}

TEST_CASE("cluster dispatches on known g", "[cluster_engine]") {
  auto data = testutil::hand_example();
  CHECK(cluster(data, ClusterParams{2, 4, 0.5, 2}).partition == cluster_known_g(data, ClusterParams{2, 4, 0.5, 2}).partition);
  CHECK_THROWS_AS(cluster_known_g(data, ClusterParams{2, 4, 0.5, std::nullopt}), InvalidArgument);
}

TEST_CASE("trace serialises with labels", "[cluster_engine]") {
  auto r = cluster_unknown_g(testutil::hand_example(), ClusterParams{2, 4, 0.5, std::nullopt});
  auto j = to_json(r.trace, {"a", "b"});
  REQUIRE(j.size() == 2);
  CHECK(j[0]["extracted"] == nlohmann::json::array({"a"}));
  CHECK(j[1]["active"] == nlohmann::json::array({"b"}));
}

TEST_CASE("clustering invariants on simulated data", "[cluster_engine]") {
  CounterStream s(31, 0);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto data = testutil::pareto_matrix(500, {1.0, 0.5, 1.0, 0.25, 0.5, 0.25, 1.0}, 900 + seed);
    const std::size_t p = data.cols();
    const auto params = default_params(p, 500);
    const auto base = cluster_unknown_g(data, params);

    SECTION("active set shrinks every iteration") {
      std::size_t prev = p + 1;
      for (const auto& it : base.trace.iterations) {
        CHECK(it.active.size() < prev);
        CHECK_FALSE(it.extracted.empty());
        prev = it.active.size();
      }
    }
    SECTION("column permutation permutes the groups") {
      std::vector<std::size_t> order(p);
      for (std::size_t j = 0; j < p; ++j) order[j] = j;
      for (std::size_t j = p - 1; j > 0; --j) std::swap(order[j], order[s.next_u64() % (j + 1)]);
      const auto permuted = cluster_unknown_g(data.permuted_columns(order), params);
      REQUIRE(permuted.partition.size() == base.partition.size());
      // Column j of the permuted matrix is column order[j] of the original.
      for (std::size_t l = 0; l < base.partition.size(); ++l) {
        ColumnSet mapped;
        for (std::size_t j : permuted.partition.group(l)) mapped.push_back(order[j]);
        std::sort(mapped.begin(), mapped.end());
        CHECK(mapped == base.partition.group(l));
      }
    }
    SECTION("row order does not matter") {
      std::vector<std::size_t> rows(data.rows());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = rows.size() - 1 - i;
      CHECK(cluster_unknown_g(data.permuted_rows(rows), params).partition == base.partition);
    }
  }
}
