#pragma once

// Command-line layer: price ingestion, clustering, Hill estimation,
// simulation and benchmarking. Every command is callable in-process; the
// `tailclust` executable only forwards argv to run().

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tailclust/bench_harness.hpp"
#include "tailclust/simgen.hpp"
#include "tailclust/tail_core.hpp"

namespace tailclust::cli {

inline constexpr int kOutputSchemaVersion = 1;
/// Directory used for default output paths when no explicit path is given.
inline constexpr const char* kOutputDirEnv = "TAILCLUST_OUTPUT_DIR";

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,       // malformed command line or input file
  kExitValidation = 3,  // well-formed input violating a constraint
  kExitRuntime = 4,     // failure while computing
};

/// Dated price series; missing entries are nullopt.
struct PriceTable {
  std::vector<std::string> dates;
  std::vector<std::string> names;
  std::vector<std::vector<std::optional<double>>> series;  // [column][row]

  /// Dates strictly increasing (ISO-8601 strings compare lexically), >= 2 rows.
  void validate() const;
};

/// First named column (or `date_column` when given) holds dates; every other column
/// with a non-empty header is a series. "", NA, ND, NaN and null mark missing.
PriceTable read_price_csv(std::istream& in, const std::optional<std::string>& date_column = std::nullopt);

struct ReturnsResult {
  DataMatrix returns;
  std::size_t complete_rows = 0;
  std::size_t dropped_rows = 0;
};

struct ReturnColumns {
  std::vector<std::vector<double>> columns;
  std::size_t complete_rows = 0;
  std::size_t dropped_rows = 0;
};

/// Loss returns per series, before any shape requirement of DataMatrix.
ReturnColumns loss_return_columns(const PriceTable& prices);

/// Loss returns -log(P_t / P_{t-1}) on consecutive complete rows; any row with
/// a missing price is dropped first.
ReturnsResult loss_returns(const PriceTable& prices);
DataMatrix returns(const PriceTable& prices);

struct ClusterOptions {
  /// nullopt = number of groups inferred.
  std::optional<std::size_t> known_g;
  std::optional<std::size_t> k;
  std::optional<std::size_t> k_star;
  std::optional<double> beta;
  /// Hill k for per-column estimates; defaults to the clustering k.
  std::optional<std::size_t> k_hill;
  double ci_level = 0.95;
};

/// Effective parameters: defaults from n0 = min_j #{X_ij > 0}, each overridden
/// value replaced individually. `rule` describes what fired.
ClusterParams resolve_params(const DataMatrix& data, const ClusterOptions& options, std::string* rule = nullptr);

nlohmann::json cmd_cluster(const DataMatrix& data, const ClusterOptions& options);

struct HillOptions {
  /// Defaults to floor(3 (ln p)^1.05), or 1 less than n when that is too large.
  std::optional<std::size_t> k;
  double ci_level = 0.95;
};

nlohmann::json cmd_hill(const DataMatrix& data, const HillOptions& options);
/// label,gamma_hat,k,ci_low,ci_high
std::string hill_csv(const nlohmann::json& hill_report);

/// Writes the CSV to `csv_path` and the spec+truth sidecar next to it (.json).
/// Returns the sidecar document.
nlohmann::json cmd_simulate(const sim::SimModelSpec& spec, const std::filesystem::path& csv_path);

/// Named sweep designs: minimal, fig1, fig2, fig3, fig5.
bench::SweepConfig preset(const std::string& name);

/// Runs the sweep, writes <prefix>.json and <prefix>.csv, prints a summary to `out`.
bench::BenchReport cmd_bench(const bench::SweepConfig& config, const std::filesystem::path& prefix, std::ostream& out);

/// Resolves `name` against $TAILCLUST_OUTPUT_DIR (or the working directory).
std::filesystem::path default_output_path(const std::string& name);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tailclust::cli
