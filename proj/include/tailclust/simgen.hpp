#pragma once

// Simulation models: independent absolute Student-t / Frechet columns, and
// multivariate-Cauchy copulas pushed through the same marginals.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "tailclust/rng.hpp"
#include "tailclust/tail_core.hpp"

namespace tailclust::sim {

enum class Model { A, B, C, D, A_F, B_F, EXACT_PARETO };

std::string to_string(Model m);
/// Accepts "A", "B", "C", "D", "A-F"/"A_F", "B-F"/"B_F", "EXACT_PARETO"/"exact-pareto".
Model parse_model(std::string_view name);
/// EXACT_PARETO is an oracle model, not one of the published designs.
bool is_published_design(Model m) noexcept;
/// Models whose columns are coupled through a multivariate Cauchy draw.
bool uses_copula(Model m) noexcept;

struct SimModelSpec {
  Model model = Model::A;
  std::size_t g = 1;
  std::size_t q = 1;
  double delta = 0.5;
  std::size_t n = 2000;
  std::uint64_t seed = 0;

  std::size_t p() const noexcept { return g * q; }
  void validate() const;
  friend bool operator==(const SimModelSpec&, const SimModelSpec&) = default;
};

nlohmann::json to_json(const SimModelSpec& spec);
SimModelSpec spec_from_json(const nlohmann::json& doc);

struct ScaleMatrix {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd chol;  // lower triangular, chol * chol^T = sigma
};

/// B and B_F: 0.5^|i-j|; C: 1 on the diagonal, 0.5 elsewhere; D: (-0.5)^|i-j|.
ScaleMatrix build_scale_matrix(Model model, std::size_t p);

/// Rows Z/|W| with Z = L * (p standard normals) and W an independent standard
/// normal, i.e. multivariate t with one degree of freedom. `next_normal` is
/// consumed row by row: p values for Z, then W. Returns an n x p column-major grid.
Eigen::MatrixXd sample_mv_cauchy(const ScaleMatrix& scale, std::size_t n,
                                 const std::function<double()>& next_normal);
Eigen::MatrixXd sample_mv_cauchy(const ScaleMatrix& scale, std::size_t n, CounterStream& stream);

struct Sample {
  DataMatrix data;
  GroundTruth truth;
};

/// Pure function of `spec` (seed included). Independent-column models draw
/// column j from stream (seed, j+1); copula models draw all rows from stream
/// (seed, 0). Optional `scale_override` replaces the model's scale matrix.
Sample generate(const SimModelSpec& spec, const std::optional<ScaleMatrix>& scale_override = std::nullopt);

}  // namespace tailclust::sim
