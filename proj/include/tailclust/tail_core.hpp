#pragma once

// Domain types shared by every module: the observation matrix, partitions,
// clustering parameters, ground truth, plus the default-parameter rule and
// the evaluation metrics.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace tailclust {

/// Sorted set of 0-based column indices.
using ColumnSet = std::vector<std::size_t>;

/// n x p matrix of finite reals, stored column-major. Columns are variables,
/// rows are i.i.d. observations.
class DataMatrix {
 public:
  /// `column_major` must hold n*p finite values. `labels` is empty or has p
  /// distinct entries.
  DataMatrix(std::size_t n, std::size_t p, std::vector<double> column_major,
             std::vector<std::string> labels = {});

  static DataMatrix from_columns(const std::vector<std::vector<double>>& columns,
                                 std::vector<std::string> labels = {});

  std::size_t rows() const noexcept { return n_; }
  std::size_t cols() const noexcept { return p_; }

  std::span<const double> column(std::size_t j) const {
    return {values_.data() + j * n_, n_};
  }
  double operator()(std::size_t i, std::size_t j) const { return values_[j * n_ + i]; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool has_labels() const noexcept { return !labels_.empty(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  /// Explicit label, or "V<j+1>" when the matrix is unlabeled.
  std::string label(std::size_t j) const;
  std::vector<std::string> all_labels() const;

  /// Copy with column j multiplied by scales[j].
  DataMatrix scaled_columns(std::span<const double> scales) const;
  /// Copy whose column j is source column order[j].
  DataMatrix permuted_columns(std::span<const std::size_t> order) const;
  /// Copy whose row i is source row order[i].
  DataMatrix permuted_rows(std::span<const std::size_t> order) const;

  friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

 private:
  std::size_t n_;
  std::size_t p_;
  std::vector<double> values_;
  std::vector<std::string> labels_;
};

/// Ordered list of disjoint, non-empty groups covering {0..p-1}. Group 0 was
/// extracted first (heaviest tail).
class TailPartition {
 public:
  TailPartition(std::vector<ColumnSet> groups, std::size_t p);

  std::size_t size() const noexcept { return groups_.size(); }
  std::size_t dimension() const noexcept { return p_; }
  const std::vector<ColumnSet>& groups() const noexcept { return groups_; }
  const ColumnSet& group(std::size_t l) const { return groups_[l]; }

  /// 1-based group label per column (the c_j-hat of each variable).
  std::vector<std::size_t> labels() const;

  friend bool operator==(const TailPartition&, const TailPartition&) = default;

 private:
  std::vector<ColumnSet> groups_;
  std::size_t p_;
};

/// {"groups": [[1-based indices...], ...]}
nlohmann::json to_json(const TailPartition& partition);
/// {"groups": [[labels...], ...]}
nlohmann::json to_json(const TailPartition& partition, const std::vector<std::string>& labels);
/// Inverse of the index form of to_json.
TailPartition partition_from_json(const nlohmann::json& doc, std::size_t p);

struct ClusterParams {
  std::size_t k = 0;
  std::size_t k_star = 0;
  double beta = 0.0;
  std::optional<std::size_t> known_g;

  /// floor(beta * k), the rank offset of the per-column statistic.
  std::size_t beta_rank() const;

  /// Throws InvalidArgument naming the first violated constraint:
  /// 0 < beta < 1, floor(beta*k) >= 1, k < k_star <= n-1, 1 <= known_g <= p.
  void validate(std::size_t n, std::size_t p) const;

  friend bool operator==(const ClusterParams&, const ClusterParams&) = default;
};

/// k = floor(3 (ln p)^1.05) (at least 1), k* = floor(n0^0.98),
/// beta = min(2 (k/k*) p + 0.5, 0.9).
ClusterParams default_params(std::size_t p, std::size_t n0);

/// Minimum over columns of the count of strictly positive observations.
std::size_t positive_count_min(const DataMatrix& data);

struct GroundTruth {
  /// 1-based group label c_j per column.
  std::vector<std::size_t> group_of;
  /// gamma^(l), strictly decreasing.
  std::vector<double> gammas;

  std::size_t dimension() const noexcept { return group_of.size(); }
  double gamma_of_column(std::size_t j) const { return gammas[group_of[j] - 1]; }
  std::vector<double> column_gammas() const;
  void validate() const;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// p = g*q columns; c_j = ceil(j/q); gamma^(l) = (1-delta)^(l-1).
GroundTruth truth_from_design(std::size_t g, std::size_t q, double delta);

/// Fraction of columns whose estimated group position equals the true label.
/// No relabeling: group order carries meaning.
double accuracy(const GroundTruth& truth, const TailPartition& estimate);

/// Mean squared deviation between two equally long vectors.
double mse(std::span<const double> truth, std::span<const double> estimate);

}  // namespace tailclust
