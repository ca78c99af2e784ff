#pragma once

// Replication engine for the simulation study: generates data per design and
// replication, runs the requested clustering methods, and aggregates
// accuracy and MSE per (design, parameter point, method) cell.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tailclust/simgen.hpp"
#include "tailclust/tail_core.hpp"

namespace tailclust::bench {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kSoftwareVersion = "tailclust 0.1.0";

enum class Method {
  ProposedKnownG,
  ProposedUnknownG,
  TailKMeans,
  /// No clustering: per-column Hill estimates as-is. Accuracy is undefined.
  RawHill,
};

std::string to_string(Method m);
/// proposed_known_g | proposed_unknown_g | tail_kmeans | raw_hill
Method parse_method(std::string_view name);

struct MethodOutcome {
  Method method = Method::ProposedKnownG;
  bool ok = false;
  std::optional<TailPartition> partition;
  std::optional<double> accuracy;
  std::optional<double> mse;
  std::string error;
  double seconds = 0.0;
};

/// One dataset from `spec`, every method in `methods` applied to it. The known-g
/// method uses spec.g; tail k-means uses params.k; MSE uses Hill at k_hill.
/// Method failures are captured in the outcome, never thrown.
std::vector<MethodOutcome> run_replication(const sim::SimModelSpec& spec, const ClusterParams& params,
                                           const std::vector<Method>& methods, std::size_t k_hill);

struct SweepConfig {
  /// Template; its seed is the master seed and g/q/delta are used when the
  /// corresponding axis is empty.
  sim::SimModelSpec model;
  std::vector<std::size_t> g_values;
  std::vector<std::size_t> q_values;
  std::vector<double> delta_values;
  /// Empty axis = default rule value (n0 = n).
  std::vector<std::size_t> k_values;
  std::vector<std::size_t> k_star_values;
  std::vector<double> beta_values;
  /// false: Cartesian product of the k / k_star / beta axes. true: vary one
  /// axis at a time, the other two at their defaults.
  bool one_at_a_time = false;
  std::size_t reps = 100;
  std::vector<Method> methods{Method::ProposedUnknownG, Method::TailKMeans};
  /// Defaults to the clustering k of each point.
  std::optional<std::size_t> k_hill;
  /// 0 = hardware concurrency. Results do not depend on this.
  std::size_t threads = 0;

  /// Throws InvalidArgument with a field path (e.g. "sweep.q[1]").
  void validate() const;
};

nlohmann::json to_json(const SweepConfig& config);
/// Throws ParseError / InvalidArgument naming the offending field path.
SweepConfig sweep_config_from_json(const nlohmann::json& doc);

struct RepRecord {
  std::uint64_t seed = 0;
  bool ok = false;
  std::optional<double> accuracy;
  std::optional<double> mse;
  std::size_t groups = 0;
  std::string error;
  friend bool operator==(const RepRecord&, const RepRecord&) = default;
};

struct Cell {
  sim::Model model = sim::Model::A;
  std::size_t g = 0;
  std::size_t q = 0;
  double delta = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t k_star = 0;
  double beta = 0.0;
  std::size_t k_hill = 0;
  /// Which parameter axis this point varies ("none" for Cartesian sweeps).
  std::string varied = "none";
  Method method = Method::ProposedUnknownG;
  std::size_t reps = 0;
  std::size_t failures = 0;
  std::optional<double> mean_accuracy;
  std::optional<double> mean_mse;
  std::vector<RepRecord> raws;
  double wall_time_s = 0.0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct BenchReport {
  int schema_version = kReportSchemaVersion;
  std::string software_version = kSoftwareVersion;
  std::uint64_t master_seed = 0;
  std::size_t reps = 0;
  /// Human-readable description of how defaults were derived.
  std::string parameter_rule;
  std::vector<Cell> cells;
  friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

BenchReport run_sweep(const SweepConfig& config);

enum class Format { Json, Csv };
inline constexpr const char* kCsvHeader =
    "model,g,q,delta,n,k,k_star,beta,method,reps,failures,mean_accuracy,mean_mse";

std::string emit_report(const BenchReport& report, Format format);
BenchReport parse_report(std::string_view json_text);

/// Arithmetic mean of the successful reps' values, or nullopt if none.
std::optional<double> mean_of(const std::vector<RepRecord>& raws, std::optional<double> RepRecord::*field);

}  // namespace tailclust::bench
