#include "tailclust/tail_core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "tailclust/error.hpp"

namespace tailclust {

DataMatrix::DataMatrix(std::size_t n, std::size_t p, std::vector<double> column_major,
                       std::vector<std::string> labels)
    : n_(n), p_(p), values_(std::move(column_major)), labels_(std::move(labels)) {
  if (n_ < 2) throw InvalidArgument("DataMatrix needs at least 2 rows, got " + std::to_string(n_));
  if (p_ < 1) throw InvalidArgument("DataMatrix needs at least 1 column");
  if (values_.size() != n_ * p_) {
    throw InvalidArgument("DataMatrix storage holds " + std::to_string(values_.size()) +
                          " values, expected " + std::to_string(n_ * p_));
  }
  for (std::size_t idx = 0; idx < values_.size(); ++idx) {
    if (!std::isfinite(values_[idx])) {
      throw InvalidArgument("DataMatrix entry (row " + std::to_string(idx % n_ + 1) + ", column " +
                            std::to_string(idx / n_ + 1) + ") is not finite");
    }
  }
  if (!labels_.empty()) {
    if (labels_.size() != p_) {
      throw InvalidArgument("DataMatrix has " + std::to_string(p_) + " columns but " +
                            std::to_string(labels_.size()) + " labels");
    }
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw InvalidArgument("DataMatrix column labels are not distinct");
  }
}

DataMatrix DataMatrix::from_columns(const std::vector<std::vector<double>>& columns,
                                    std::vector<std::string> labels) {
  if (columns.empty()) throw InvalidArgument("DataMatrix needs at least 1 column");
  const std::size_t n = columns.front().size();
  std::vector<double> values;
  values.reserve(n * columns.size());
  for (const auto& c : columns) {
    if (c.size() != n) throw InvalidArgument("DataMatrix columns have unequal lengths");
    values.insert(values.end(), c.begin(), c.end());
  }
  return DataMatrix(n, columns.size(), std::move(values), std::move(labels));
}

std::string DataMatrix::label(std::size_t j) const {
  return labels_.empty() ? "V" + std::to_string(j + 1) : labels_[j];
}

std::vector<std::string> DataMatrix::all_labels() const {
  std::vector<std::string> out(p_);
  for (std::size_t j = 0; j < p_; ++j) out[j] = label(j);
  return out;
}

DataMatrix DataMatrix::scaled_columns(std::span<const double> scales) const {
  if (scales.size() != p_) throw InvalidArgument("scale vector length differs from column count");
  std::vector<double> v = values_;
  for (std::size_t j = 0; j < p_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) v[j * n_ + i] *= scales[j];
  }
  return DataMatrix(n_, p_, std::move(v), labels_);
}

DataMatrix DataMatrix::permuted_columns(std::span<const std::size_t> order) const {
  if (order.size() != p_) throw InvalidArgument("column permutation has wrong length");
  std::vector<double> v;
  v.reserve(values_.size());
  std::vector<std::string> labels;
  for (std::size_t j : order) {
    auto c = column(j);
    v.insert(v.end(), c.begin(), c.end());
    if (!labels_.empty()) labels.push_back(labels_[j]);
  }
  return DataMatrix(n_, p_, std::move(v), std::move(labels));
}

DataMatrix DataMatrix::permuted_rows(std::span<const std::size_t> order) const {
  if (order.size() != n_) throw InvalidArgument("row permutation has wrong length");
  std::vector<double> v(values_.size());
  for (std::size_t j = 0; j < p_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) v[j * n_ + i] = values_[j * n_ + order[i]];
  }
  return DataMatrix(n_, p_, std::move(v), labels_);
}

TailPartition::TailPartition(std::vector<ColumnSet> groups, std::size_t p)
    : groups_(std::move(groups)), p_(p) {
  std::vector<char> seen(p_, 0);
  std::size_t covered = 0;
  for (std::size_t l = 0; l < groups_.size(); ++l) {
    auto& g = groups_[l];
    if (g.empty()) throw InvalidArgument("partition group " + std::to_string(l + 1) + " is empty");
    std::sort(g.begin(), g.end());
    for (std::size_t j : g) {
      if (j >= p_) throw InvalidArgument("partition index " + std::to_string(j + 1) + " exceeds p");
      if (seen[j]) throw InvalidArgument("column " + std::to_string(j + 1) + " appears in two groups");
      seen[j] = 1;
      ++covered;
    }
  }
  if (covered != p_) throw InvalidArgument("partition does not cover every column");
}

std::vector<std::size_t> TailPartition::labels() const {
  std::vector<std::size_t> out(p_, 0);
  for (std::size_t l = 0; l < groups_.size(); ++l) {
    for (std::size_t j : groups_[l]) out[j] = l + 1;
  }
  return out;
}

nlohmann::json to_json(const TailPartition& partition) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : partition.groups()) {
    nlohmann::json one = nlohmann::json::array();
    for (std::size_t j : g) one.push_back(j + 1);
    groups.push_back(std::move(one));
  }
  return {{"groups", std::move(groups)}};
}

nlohmann::json to_json(const TailPartition& partition, const std::vector<std::string>& labels) {
  if (labels.size() != partition.dimension()) throw InvalidArgument("label count differs from p");
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : partition.groups()) {
    nlohmann::json one = nlohmann::json::array();
    for (std::size_t j : g) one.push_back(labels[j]);
    groups.push_back(std::move(one));
  }
  return {{"groups", std::move(groups)}};
}

TailPartition partition_from_json(const nlohmann::json& doc, std::size_t p) {
  if (!doc.is_object() || !doc.contains("groups") || !doc["groups"].is_array()) {
    throw ParseError("partition JSON needs a \"groups\" array");
  }
  std::vector<ColumnSet> groups;
  for (const auto& g : doc["groups"]) {
    ColumnSet one;
    for (const auto& idx : g) {
      if (!idx.is_number_unsigned() || idx.get<std::size_t>() == 0) {
        throw ParseError("partition indices must be 1-based positive integers");
      }
      one.push_back(idx.get<std::size_t>() - 1);
    }
    groups.push_back(std::move(one));
  }
  return TailPartition(std::move(groups), p);
}

std::size_t ClusterParams::beta_rank() const {
  return static_cast<std::size_t>(std::floor(beta * static_cast<double>(k)));
}

void ClusterParams::validate(std::size_t n, std::size_t p) const {
  auto fail = [](const std::string& what) { throw InvalidArgument("invalid cluster parameters: " + what); };
  if (!(beta > 0.0 && beta < 1.0)) fail("beta must lie in (0,1), got " + std::to_string(beta));
  if (k < 1) fail("k must be positive");
  if (beta_rank() < 1) {
    fail("floor(beta*k) must be at least 1 (beta=" + std::to_string(beta) + ", k=" + std::to_string(k) + ")");
  }
  if (!(k < k_star)) fail("k must be smaller than k_star (k=" + std::to_string(k) + ", k_star=" + std::to_string(k_star) + ")");
  if (n != 0 && k_star > n - 1) {
    fail("k_star must not exceed n-1 (k_star=" + std::to_string(k_star) + ", n=" + std::to_string(n) + ")");
  }
  if (known_g) {
    if (*known_g < 1) fail("known g must be positive");
    if (p != 0 && *known_g > p) fail("known g exceeds p (g=" + std::to_string(*known_g) + ", p=" + std::to_string(p) + ")");
  }
}

ClusterParams default_params(std::size_t p, std::size_t n0) {
  if (p < 2) throw InvalidArgument("default parameters need p >= 2, got " + std::to_string(p));
  if (n0 < 4) throw InvalidArgument("default parameters need n0 >= 4, got " + std::to_string(n0));
  ClusterParams params;
  const double log_p = std::log(static_cast<double>(p));
  params.k = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(3.0 * std::pow(log_p, 1.05))));
  params.k_star = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n0), 0.98)));
  params.beta = std::min(2.0 * (static_cast<double>(params.k) / static_cast<double>(params.k_star)) *
                                 static_cast<double>(p) + 0.5,
                         0.9);
  // k_star = floor(n0^0.98) < n0 <= n, so validating without n is sufficient.
  params.validate(0, p);
  return params;
}

std::size_t positive_count_min(const DataMatrix& data) {
  std::size_t best = data.rows();
  for (std::size_t j = 0; j < data.cols(); ++j) {
    auto c = data.column(j);
    best = std::min<std::size_t>(best, std::count_if(c.begin(), c.end(), [](double x) { return x > 0.0; }));
  }
  return best;
}

std::vector<double> GroundTruth::column_gammas() const {
  std::vector<double> out(group_of.size());
  for (std::size_t j = 0; j < group_of.size(); ++j) out[j] = gamma_of_column(j);
  return out;
}

void GroundTruth::validate() const {
  if (gammas.empty()) throw InvalidArgument("ground truth has no groups");
  for (std::size_t l = 0; l < gammas.size(); ++l) {
    if (!(gammas[l] > 0.0)) throw InvalidArgument("ground-truth gammas must be positive");
    if (l > 0 && !(gammas[l] < gammas[l - 1])) throw InvalidArgument("ground-truth gammas must strictly decrease");
  }
  std::vector<char> used(gammas.size(), 0);
  for (std::size_t c : group_of) {
    if (c < 1 || c > gammas.size()) throw InvalidArgument("ground-truth label out of range");
    used[c - 1] = 1;
  }
  if (std::find(used.begin(), used.end(), 0) != used.end()) {
    throw InvalidArgument("every ground-truth group needs at least one column");
  }
}

GroundTruth truth_from_design(std::size_t g, std::size_t q, double delta) {
  if (g < 1 || q < 1) throw InvalidArgument("design needs g >= 1 and q >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
  GroundTruth truth;
  truth.gammas.resize(g);
  for (std::size_t l = 0; l < g; ++l) truth.gammas[l] = std::pow(1.0 - delta, static_cast<double>(l));
  truth.group_of.resize(g * q);
  for (std::size_t j = 0; j < g * q; ++j) truth.group_of[j] = j / q + 1;
  truth.validate();
  return truth;
}

double accuracy(const GroundTruth& truth, const TailPartition& estimate) {
  if (truth.dimension() != estimate.dimension()) {
    throw InvalidArgument("accuracy: truth has p=" + std::to_string(truth.dimension()) +
                          " but estimate has p=" + std::to_string(estimate.dimension()));
  }
  const auto est = estimate.labels();
  std::size_t hits = 0;
  for (std::size_t j = 0; j < est.size(); ++j) hits += (est[j] == truth.group_of[j]);
  return static_cast<double>(hits) / static_cast<double>(est.size());
}

double mse(std::span<const double> truth, std::span<const double> estimate) {
  if (truth.size() != estimate.size()) {
    throw InvalidArgument("mse: lengths differ (" + std::to_string(truth.size()) + " vs " +
                          std::to_string(estimate.size()) + ")");
  }
  if (truth.empty()) throw InvalidArgument("mse: empty input");
  double acc = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    const double d = estimate[j] - truth[j];
    acc += d * d;
  }
  return acc / static_cast<double>(truth.size());
}

}  // namespace tailclust
