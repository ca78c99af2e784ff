#include "tailclust/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tailclust/cluster_engine.hpp"
#include "tailclust/csv_io.hpp"
#include "tailclust/error.hpp"
#include "tailclust/hill_baseline.hpp"

namespace tailclust::cli {

namespace {

bool is_missing_token(const std::string& s) {
  std::string up = s;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  return up.empty() || up == "NA" || up == "ND" || up == "NAN" || up == "NULL" || up == "N/A";
}

std::size_t formula_k(std::size_t p) {
  if (p < 2) return 1;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(3.0 * std::pow(std::log(static_cast<double>(p)), 1.05))));
}

nlohmann::json hill_entry(const std::string& label, const HillEstimate& h) {
  return {{"label", label},
          {"gamma_hat", h.gamma_hat},
          {"k", h.k_used},
          {"ci_low", h.ci_low ? nlohmann::json(*h.ci_low) : nlohmann::json(nullptr)},
          {"ci_high", h.ci_high ? nlohmann::json(*h.ci_high) : nlohmann::json(nullptr)}};
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open input file '" + path + "'");
  return in;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

void PriceTable::validate() const {
  if (dates.size() < 2) throw InvalidArgument("price table needs at least 2 rows");
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i - 1] < dates[i])) {
      throw InvalidArgument("dates must be strictly increasing ('" + dates[i - 1] + "' then '" + dates[i] + "')");
    }
  }
  if (names.empty()) throw InvalidArgument("price table has no series");
  if (series.size() != names.size()) throw InvalidArgument("price table names and series differ in count");
  for (const auto& s : series) {
    if (s.size() != dates.size()) throw InvalidArgument("price series length differs from date count");
  }
}

PriceTable read_price_csv(std::istream& in, const std::optional<std::string>& date_column) {
  const CsvTable table = read_csv(in);
  std::size_t date_idx = 0;
  while (date_idx < table.header.size() && table.header[date_idx].empty()) ++date_idx;
  if (date_idx == table.header.size()) throw ParseError("price table has no named columns", 1);
  if (date_column) {
    auto it = std::find(table.header.begin(), table.header.end(), *date_column);
    if (it == table.header.end()) throw ParseError("date column '" + *date_column + "' not found", 1);
    date_idx = static_cast<std::size_t>(it - table.header.begin());
  }
  std::vector<std::size_t> value_cols;
  PriceTable prices;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j == date_idx || table.header[j].empty()) continue;
    value_cols.push_back(j);
    prices.names.push_back(table.header[j]);
  }
  prices.series.assign(value_cols.size(), {});
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    prices.dates.push_back(row[date_idx]);
    for (std::size_t c = 0; c < value_cols.size(); ++c) {
      const std::string& cell = row[value_cols[c]];
      if (is_missing_token(cell)) {
        prices.series[c].push_back(std::nullopt);
        continue;
      }
      double v = 0.0;
      if (!parse_double(cell, v)) throw ParseError("not a price: '" + cell + "'", i + 2, value_cols[c] + 1);
      prices.series[c].push_back(v);
    }
  }
  try {
    prices.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
  return prices;
}

ReturnColumns loss_return_columns(const PriceTable& prices) {
  prices.validate();
  const std::size_t rows = prices.dates.size();
  const std::size_t p = prices.names.size();
  std::vector<std::size_t> complete;
  for (std::size_t i = 0; i < rows; ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < p && ok; ++j) {
      const auto& v = prices.series[j][i];
      if (!v) {
        ok = false;
      } else if (!(*v > 0.0)) {
        throw InvalidArgument("nonpositive price " + format_double(*v) + " for " + prices.names[j] + " on " +
                              prices.dates[i]);
      }
    }
    if (ok) complete.push_back(i);
  }
  if (complete.size() < 2) {
    throw InvalidArgument("need at least 2 complete price rows, found " + std::to_string(complete.size()));
  }
  ReturnColumns out;
  out.complete_rows = complete.size();
  out.dropped_rows = rows - complete.size();
  out.columns.assign(p, std::vector<double>(complete.size() - 1));
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t t = 0; t + 1 < complete.size(); ++t) {
      out.columns[j][t] = -std::log(*prices.series[j][complete[t + 1]] / *prices.series[j][complete[t]]);
    }
  }
  return out;
}

ReturnsResult loss_returns(const PriceTable& prices) {
  ReturnColumns cols = loss_return_columns(prices);
  if (cols.complete_rows < 3) {
    throw InvalidArgument("need at least 3 complete price rows to form 2 returns, found " +
                          std::to_string(cols.complete_rows));
  }
  return {DataMatrix::from_columns(cols.columns, prices.names), cols.complete_rows, cols.dropped_rows};
}

DataMatrix returns(const PriceTable& prices) { return loss_returns(prices).returns; }

ClusterParams resolve_params(const DataMatrix& data, const ClusterOptions& options, std::string* rule) {
  const std::size_t n0 = positive_count_min(data);
  ClusterParams params;
  std::string how;
  if (options.k && options.k_star && options.beta) {
    params = ClusterParams{*options.k, *options.k_star, *options.beta, std::nullopt};
    how = "all parameters supplied";
  } else {
    params = default_params(data.cols(), n0);
    how = "defaults from p=" + std::to_string(data.cols()) + ", n0=" + std::to_string(n0) +
          " (min positive count per column)";
    if (options.k) params.k = *options.k;
    if (options.k_star) params.k_star = *options.k_star;
    if (options.beta) params.beta = *options.beta;
    if (options.k || options.k_star || options.beta) how += ", with overrides";
  }
  params.known_g = options.known_g;
  params.validate(data.rows(), data.cols());
  if (rule) *rule = how;
  return params;
}

nlohmann::json cmd_cluster(const DataMatrix& data, const ClusterOptions& options) {
  std::string rule;
  const ClusterParams params = resolve_params(data, options, &rule);
  const ClusterResult result = cluster(data, params);
  const auto labels = data.all_labels();
  const std::size_t k_hill = options.k_hill.value_or(params.k);

  nlohmann::json hill_rows = nlohmann::json::array();
  std::vector<double> raw(data.cols());
  for (std::size_t j = 0; j < data.cols(); ++j) {
    HillEstimate h;
    try {
      h = hill_ci(hill(data.column(j), k_hill), options.ci_level);
    } catch (const NonpositiveOrderStat& e) {
      throw Error("column " + labels[j] + ": " + e.what());
    }
    raw[j] = h.gamma_hat;
    hill_rows.push_back(hill_entry(labels[j], h));
  }
  const GroupIndexEstimate agg = aggregate_group_indices(raw, result.partition);

  nlohmann::json groups = nlohmann::json::array();
  for (std::size_t l = 0; l < result.partition.size(); ++l) {
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t j : result.partition.group(l)) members.push_back(labels[j]);
    groups.push_back({{"group", l + 1}, {"members", members}, {"gamma", agg.group_gammas[l]}});
  }
  nlohmann::json column_gammas = nlohmann::json::object();
  for (std::size_t j = 0; j < labels.size(); ++j) column_gammas[labels[j]] = agg.column_gammas[j];

  return {{"schema_version", kOutputSchemaVersion},
          {"command", "cluster"},
          {"mode", params.known_g ? "known-g" : "auto-g"},
          {"n", data.rows()},
          {"p", data.cols()},
          {"n0", positive_count_min(data)},
          {"params",
           {{"k", params.k},
            {"k_star", params.k_star},
            {"beta", params.beta},
            {"known_g", params.known_g ? nlohmann::json(*params.known_g) : nlohmann::json(nullptr)},
            {"rule", rule}}},
          {"partition", to_json(result.partition, labels)},
          {"partition_indices", to_json(result.partition)},
          {"groups", groups},
          {"column_gammas", column_gammas},
          {"hill", {{"k", k_hill}, {"ci_level", options.ci_level}, {"band_method", kHillBandMethod}, {"estimates", hill_rows}}},
          {"trace", to_json(result.trace, labels)}};
}

nlohmann::json cmd_hill(const DataMatrix& data, const HillOptions& options) {
  const std::size_t k = options.k.value_or(std::min(formula_k(data.cols()), data.rows() - 1));
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t j = 0; j < data.cols(); ++j) {
    try {
      rows.push_back(hill_entry(data.label(j), hill_ci(hill(data.column(j), k), options.ci_level)));
    } catch (const NonpositiveOrderStat& e) {
      throw Error("column " + data.label(j) + ": " + e.what());
    }
  }
  return {{"schema_version", kOutputSchemaVersion},
          {"command", "hill"},
          {"n", data.rows()},
          {"p", data.cols()},
          {"k", k},
          {"ci_level", options.ci_level},
          {"band_method", kHillBandMethod},
          {"estimates", rows}};
}

std::string hill_csv(const nlohmann::json& report) {
  std::ostringstream os;
  os << "label,gamma_hat,k,ci_low,ci_high\n";
  auto num = [](const nlohmann::json& v) { return v.is_null() ? std::string() : format_double(v.get<double>()); };
  for (const auto& e : report.at("estimates")) {
    os << e.at("label").get<std::string>() << ',' << num(e.at("gamma_hat")) << ',' << e.at("k").get<std::size_t>()
       << ',' << num(e.at("ci_low")) << ',' << num(e.at("ci_high")) << '\n';
  }
  return os.str();
}

nlohmann::json cmd_simulate(const sim::SimModelSpec& spec, const std::filesystem::path& csv_path) {
  const sim::Sample sample = sim::generate(spec);
  std::ostringstream csv;
  write_data_csv(csv, sample.data);
  write_text(csv_path, csv.str());

  nlohmann::json sidecar = {{"schema_version", kOutputSchemaVersion},
                            {"command", "simulate"},
                            {"spec", to_json(spec)},
                            {"p", spec.p()},
                            {"column_labels", sample.data.all_labels()},
                            {"truth", {{"gammas", sample.truth.gammas}, {"labels", sample.truth.group_of}}},
                            {"csv", csv_path.filename().string()}};
  if (!sim::is_published_design(spec.model)) {
    sidecar["note"] = "EXACT_PARETO is an oracle model (U^-gamma columns), not one of the published designs";
  }
  auto side_path = csv_path;
  side_path.replace_extension(".json");
  write_text(side_path, sidecar.dump(2) + "\n");
  return sidecar;
}

bench::SweepConfig preset(const std::string& name) {
  using bench::Method;
  bench::SweepConfig c;
  c.model.model = sim::Model::A;
  c.model.n = 2000;
  c.model.delta = 0.5;
  c.model.seed = 20240501;
  c.reps = 100;
  c.methods = {Method::ProposedKnownG, Method::ProposedUnknownG, Method::TailKMeans};
  if (name == "minimal") {
    c.model.g = 2;
    c.model.q = 2;
    c.model.n = 200;
    c.reps = 1;
    c.methods = {Method::ProposedKnownG, Method::ProposedUnknownG, Method::TailKMeans, Method::RawHill};
  } else if (name == "fig1") {
    c.g_values = {3, 4, 5};
    c.q_values = {5, 10, 15, 20, 25, 30};
  } else if (name == "fig2") {
    c.g_values = {3, 4, 5};
    c.q_values = {15};
    c.delta_values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  } else if (name == "fig3") {
    c.g_values = {3, 4, 5};
    c.q_values = {15};
    c.one_at_a_time = true;
    c.k_values = {3, 5, 7, 9, 12, 15, 20, 30, 40, 60};
    c.beta_values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    c.k_star_values = {200, 500, 1000, 1500, 1717, 1900};
  } else if (name == "fig5") {
    c.g_values = {3, 4, 5};
    c.q_values = {5, 10, 15, 20, 25, 30};
    c.methods = {Method::ProposedKnownG, Method::ProposedUnknownG, Method::TailKMeans, Method::RawHill};
  } else {
    throw InvalidArgument("unknown preset '" + name + "' (expected minimal, fig1, fig2, fig3 or fig5)");
  }
  return c;
}

bench::BenchReport cmd_bench(const bench::SweepConfig& config, const std::filesystem::path& prefix, std::ostream& out) {
  const bench::BenchReport report = bench::run_sweep(config);
  auto json_path = prefix;
  json_path += ".json";
  auto csv_path = prefix;
  csv_path += ".csv";
  write_text(json_path, bench::emit_report(report, bench::Format::Json) + "\n");
  write_text(csv_path, bench::emit_report(report, bench::Format::Csv));

  out << std::left << std::setw(13) << "model" << std::setw(4) << "g" << std::setw(4) << "q" << std::setw(7) << "delta"
      << std::setw(5) << "k" << std::setw(7) << "k_star" << std::setw(8) << "beta" << std::setw(20) << "method"
      << std::setw(6) << "fail" << std::setw(10) << "accuracy" << "mse\n";
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << *v;
    return s.str();
  };
  for (const auto& c : report.cells) {
    std::ostringstream beta;
    beta << std::fixed << std::setprecision(4) << c.beta;
    out << std::left << std::setw(13) << sim::to_string(c.model) << std::setw(4) << c.g << std::setw(4) << c.q
        << std::setw(7) << c.delta << std::setw(5) << c.k << std::setw(7) << c.k_star << std::setw(8) << beta.str()
        << std::setw(20) << bench::to_string(c.method) << std::setw(6) << c.failures << std::setw(10)
        << fmt(c.mean_accuracy) << fmt(c.mean_mse) << '\n';
  }
  out << "wrote " << json_path.string() << " and " << csv_path.string() << '\n';
  return report;
}

std::filesystem::path default_output_path(const std::string& name) {
  const char* dir = std::getenv(kOutputDirEnv);
  if (dir && *dir) return std::filesystem::path(dir) / name;
  return std::filesystem::path(name);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"tailclust: cluster heavy-tailed variables by extreme value index"};
  app.require_subcommand(1);

  // returns
  auto* ret = app.add_subcommand("returns", "convert a dated price CSV into loss returns");
  std::string ret_in, ret_out;
  std::optional<std::string> ret_date_col;
  ret->add_option("prices", ret_in, "price CSV (first column = dates)")->required();
  ret->add_option("-o,--out", ret_out, "output CSV (default: stdout)");
  ret->add_option("--date-col", ret_date_col, "name of the date column");

  // cluster
  auto* clu = app.add_subcommand("cluster", "cluster the columns of a data CSV");
  std::string clu_in, clu_out;
  std::optional<std::size_t> clu_g, clu_k, clu_kstar, clu_khill;
  std::optional<double> clu_beta;
  double clu_ci = 0.95;
  bool clu_auto = false, clu_prices = false;
  std::optional<std::string> clu_date_col;
  clu->add_option("input", clu_in, "data CSV (header = column labels)")->required();
  auto* g_opt = clu->add_option("--known-g", clu_g, "number of groups, if known");
  auto* auto_opt = clu->add_flag("--auto-g", clu_auto, "infer the number of groups (default)");
  g_opt->excludes(auto_opt);
  clu->add_option("--k", clu_k, "clustering k");
  clu->add_option("--k-star", clu_kstar, "scaling rank k*");
  clu->add_option("--beta", clu_beta, "beta in (0,1)");
  clu->add_option("--k-hill", clu_khill, "k for the reported Hill estimates (default: k)");
  clu->add_option("--ci", clu_ci, "confidence level of the Hill bands");
  clu->add_flag("--prices", clu_prices, "input is a dated price table; cluster its loss returns");
  clu->add_option("--date-col", clu_date_col, "date column name for --prices");
  clu->add_option("-o,--out", clu_out, "output JSON (default: stdout)");

  // hill
  auto* hil = app.add_subcommand("hill", "per-column Hill estimates with confidence bands");
  std::string hil_in, hil_out, hil_format = "json";
  std::optional<std::size_t> hil_k;
  double hil_ci = 0.95;
  hil->add_option("input", hil_in, "data CSV")->required();
  hil->add_option("--k", hil_k, "number of upper order statistics");
  hil->add_option("--ci", hil_ci, "confidence level");
  hil->add_option("--format", hil_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  hil->add_option("-o,--out", hil_out, "output file (default: stdout)");

  // simulate
  auto* simc = app.add_subcommand("simulate", "generate a dataset from a simulation model");
  std::string sim_model = "A", sim_out;
  sim::SimModelSpec spec;
  simc->add_option("--model", sim_model, "A, B, C, D, A-F, B-F or EXACT_PARETO");
  simc->add_option("--g", spec.g, "number of groups")->required();
  simc->add_option("--q", spec.q, "columns per group")->required();
  simc->add_option("--delta", spec.delta, "relative index gap in (0,1)")->required();
  simc->add_option("--n", spec.n, "rows")->required();
  simc->add_option("--seed", spec.seed, "random seed")->required();
  simc->add_option("-o,--out", sim_out, "output CSV; sidecar JSON uses the same stem");

  // bench
  auto* ben = app.add_subcommand("bench", "run a replication sweep");
  std::optional<std::string> ben_preset, ben_config, ben_model;
  std::optional<std::size_t> ben_reps, ben_threads, ben_n, ben_khill;
  std::optional<std::uint64_t> ben_seed;
  std::string ben_prefix;
  auto* preset_opt = ben->add_option("--preset", ben_preset, "minimal, fig1, fig2, fig3 or fig5");
  auto* config_opt = ben->add_option("--config", ben_config, "sweep configuration JSON");
  preset_opt->excludes(config_opt);
  ben->add_option("--model", ben_model, "override the simulation model");
  ben->add_option("--reps", ben_reps, "replications per design");
  ben->add_option("--seed", ben_seed, "master seed");
  ben->add_option("--threads", ben_threads, "worker threads (0 = all cores)");
  ben->add_option("--n", ben_n, "rows per dataset");
  ben->add_option("--k-hill", ben_khill, "k for the MSE Hill estimates");
  ben->add_option("--out-prefix", ben_prefix, "output path prefix for .json/.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (ret->parsed()) {
      auto in = open_input(ret_in);
      const ReturnsResult r = loss_returns(read_price_csv(in, ret_date_col));
      std::ostringstream csv;
      write_data_csv(csv, r.returns);
      if (ret_out.empty()) out << csv.str();
      else write_text(ret_out, csv.str());
      err << "returns: " << r.returns.rows() << " rows from " << r.complete_rows << " complete price rows ("
          << r.dropped_rows << " incomplete rows dropped)\n";
    } else if (clu->parsed()) {
      auto in = open_input(clu_in);
      const DataMatrix data = clu_prices ? returns(read_price_csv(in, clu_date_col)) : read_data_csv(in);
      ClusterOptions opts;
      opts.known_g = clu_g;
      opts.k = clu_k;
      opts.k_star = clu_kstar;
      opts.beta = clu_beta;
      opts.k_hill = clu_khill;
      opts.ci_level = clu_ci;
      const auto doc = cmd_cluster(data, opts).dump(2) + "\n";
      if (clu_out.empty()) out << doc;
      else write_text(clu_out, doc);
    } else if (hil->parsed()) {
      auto in = open_input(hil_in);
      const auto report = cmd_hill(read_data_csv(in), HillOptions{hil_k, hil_ci});
      const std::string text = hil_format == "csv" ? hill_csv(report) : report.dump(2) + "\n";
      if (hil_out.empty()) out << text;
      else write_text(hil_out, text);
    } else if (simc->parsed()) {
      spec.model = sim::parse_model(sim_model);
      spec.validate();
      const std::filesystem::path path =
          sim_out.empty() ? default_output_path("sim_" + sim::to_string(spec.model) + "_seed" + std::to_string(spec.seed) + ".csv")
                          : std::filesystem::path(sim_out);
      cmd_simulate(spec, path);
      out << "wrote " << path.string() << '\n';
    } else if (ben->parsed()) {
      bench::SweepConfig config;
      std::string stem = "bench";
      if (ben_config) {
        auto in = open_input(*ben_config);
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
          throw ParseError(std::string("config: ") + e.what());
        }
        config = bench::sweep_config_from_json(doc);
      } else {
        config = preset(ben_preset.value_or("minimal"));
        stem += "_" + ben_preset.value_or("minimal");
      }
      if (ben_model) config.model.model = sim::parse_model(*ben_model);
      if (ben_reps) config.reps = *ben_reps;
      if (ben_seed) config.model.seed = *ben_seed;
      if (ben_threads) config.threads = *ben_threads;
      if (ben_n) config.model.n = *ben_n;
      if (ben_khill) config.k_hill = *ben_khill;
      const std::filesystem::path prefix = ben_prefix.empty() ? default_output_path(stem) : std::filesystem::path(ben_prefix);
      cmd_bench(config, prefix, out);
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const InvalidArgument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace tailclust::cli
