#include "tailclust/bench_harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <map>
#include <sstream>
#include <thread>

#include "tailclust/cluster_engine.hpp"
#include "tailclust/csv_io.hpp"
#include "tailclust/error.hpp"
#include "tailclust/hill_baseline.hpp"

namespace tailclust::bench {

namespace {

using Clock = std::chrono::steady_clock;

struct Design {
  std::size_t g;
  std::size_t q;
  double delta;
};

struct ParamPoint {
  ClusterParams params;
  std::string varied;
};

// Data seeds are keyed by the design values, not by sweep position, so a
// design draws the same datasets whatever else is in the sweep.
std::uint64_t design_key(const sim::SimModelSpec& base, const Design& d) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(base.model) + 1);
  h = mix64(h ^ base.n);
  h = mix64(h ^ d.g);
  h = mix64(h ^ (d.q << 20));
  h = mix64(h ^ std::bit_cast<std::uint64_t>(d.delta));
  return h;
}

std::vector<Design> designs_of(const SweepConfig& c) {
  const std::vector<std::size_t> gs = c.g_values.empty() ? std::vector<std::size_t>{c.model.g} : c.g_values;
  const std::vector<std::size_t> qs = c.q_values.empty() ? std::vector<std::size_t>{c.model.q} : c.q_values;
  const std::vector<double> ds = c.delta_values.empty() ? std::vector<double>{c.model.delta} : c.delta_values;
  std::vector<Design> out;
  for (std::size_t g : gs)
    for (std::size_t q : qs)
      for (double d : ds) out.push_back({g, q, d});
  return out;
}

std::vector<ParamPoint> points_of(const SweepConfig& c, const Design& d) {
  const ClusterParams defaults = default_params(d.g * d.q, c.model.n);
  std::vector<ParamPoint> out;
  if (c.one_at_a_time) {
    for (std::size_t k : c.k_values) {
      ClusterParams p = defaults;
      p.k = k;
      out.push_back({p, "k"});
    }
    for (double b : c.beta_values) {
      ClusterParams p = defaults;
      p.beta = b;
      out.push_back({p, "beta"});
    }
    for (std::size_t ks : c.k_star_values) {
      ClusterParams p = defaults;
      p.k_star = ks;
      out.push_back({p, "k_star"});
    }
    if (out.empty()) out.push_back({defaults, "none"});
    return out;
  }
  const auto ks = c.k_values.empty() ? std::vector<std::size_t>{defaults.k} : c.k_values;
  const auto kss = c.k_star_values.empty() ? std::vector<std::size_t>{defaults.k_star} : c.k_star_values;
  const auto bs = c.beta_values.empty() ? std::vector<double>{defaults.beta} : c.beta_values;
  for (std::size_t k : ks)
    for (std::size_t kstar : kss)
      for (double b : bs) out.push_back({ClusterParams{k, kstar, b, std::nullopt}, "none"});
  return out;
}

template <class T>
nlohmann::json opt(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> opt_double(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::ProposedKnownG: return "proposed_known_g";
    case Method::ProposedUnknownG: return "proposed_unknown_g";
    case Method::TailKMeans: return "tail_kmeans";
    case Method::RawHill: return "raw_hill";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "proposed_known_g") return Method::ProposedKnownG;
  if (name == "proposed_unknown_g") return Method::ProposedUnknownG;
  if (name == "tail_kmeans") return Method::TailKMeans;
  if (name == "raw_hill") return Method::RawHill;
  throw InvalidArgument("unknown method '" + std::string(name) +
                        "' (expected proposed_known_g, proposed_unknown_g, tail_kmeans or raw_hill)");
}

namespace {

// Runs the methods on an already generated sample. raw_hill is the per-column
// Hill vector at k_hill.
std::vector<MethodOutcome> run_methods(const sim::Sample& sample, std::size_t g, const ClusterParams& params,
                                       const std::vector<Method>& methods, const std::vector<double>& raw_hill) {
  const auto truth_gammas = sample.truth.column_gammas();
  std::vector<MethodOutcome> out;
  out.reserve(methods.size());
  for (Method m : methods) {
    MethodOutcome o;
    o.method = m;
    const auto start = Clock::now();
    try {
      if (m == Method::RawHill) {
        o.mse = mse(truth_gammas, raw_hill);
      } else {
        std::optional<TailPartition> part;
        if (m == Method::TailKMeans) {
          part = tail_kmeans(sample.data, g, params.k);
        } else {
          ClusterParams pp = params;
          pp.known_g = (m == Method::ProposedKnownG) ? std::optional<std::size_t>(g) : std::nullopt;
          part = cluster(sample.data, pp).partition;
        }
        o.accuracy = accuracy(sample.truth, *part);
        o.mse = mse(truth_gammas, aggregate_group_indices(raw_hill, *part).column_gammas);
        o.partition = std::move(part);
      }
      o.ok = true;
    } catch (const std::exception& e) {
      o.ok = false;
      o.error = e.what();
    }
    o.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace

std::vector<MethodOutcome> run_replication(const sim::SimModelSpec& spec, const ClusterParams& params,
                                           const std::vector<Method>& methods, std::size_t k_hill) {
  const sim::Sample sample = sim::generate(spec);
  std::vector<double> raw;
  try {
    raw = hill_all(sample.data, k_hill);
  } catch (const std::exception& e) {
    std::vector<MethodOutcome> failed;
    for (Method m : methods) {
      MethodOutcome o;
      o.method = m;
      o.error = e.what();
      failed.push_back(std::move(o));
    }
    return failed;
  }
  return run_methods(sample, spec.g, params, methods, raw);
}

void SweepConfig::validate() const {
  auto fail = [](const std::string& path, const std::string& what) {
    throw InvalidArgument(path + ": " + what);
  };
  if (reps < 1) fail("reps", "must be at least 1");
  if (model.n < 5) fail("model.n", "must be at least 5");
  if (methods.empty()) fail("methods", "at least one method is required");
  for (std::size_t i = 0; i < g_values.size(); ++i)
    if (g_values[i] < 1) fail("sweep.g[" + std::to_string(i) + "]", "must be positive");
  for (std::size_t i = 0; i < q_values.size(); ++i)
    if (q_values[i] < 1) fail("sweep.q[" + std::to_string(i) + "]", "must be positive");
  for (std::size_t i = 0; i < delta_values.size(); ++i)
    if (!(delta_values[i] > 0.0 && delta_values[i] < 1.0))
      fail("sweep.delta[" + std::to_string(i) + "]", "must lie in (0,1)");
  if (g_values.empty() && model.g < 1) fail("model.g", "must be positive");
  if (q_values.empty() && model.q < 1) fail("model.q", "must be positive");
  if (delta_values.empty() && !(model.delta > 0.0 && model.delta < 1.0)) fail("model.delta", "must lie in (0,1)");
  if (k_hill && (*k_hill < 1 || *k_hill >= model.n)) fail("k_hill", "must lie in [1, n-1]");

  for (const Design& d : designs_of(*this)) {
    const std::size_t p = d.g * d.q;
    const std::string where = "design (g=" + std::to_string(d.g) + ", q=" + std::to_string(d.q) + ")";
    if (p < 2) fail(where, "needs p = g*q >= 2 for the default parameter rule");
    const auto pts = points_of(*this, d);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      try {
        pts[i].params.validate(model.n, p);
      } catch (const InvalidArgument& e) {
        fail("sweep point " + std::to_string(i) + " of " + where, e.what());
      }
      const std::size_t kh = k_hill.value_or(pts[i].params.k);
      if (kh >= model.n) fail("k_hill", "must be below n");
    }
  }
}

BenchReport run_sweep(const SweepConfig& config) {
  config.validate();
  const auto designs = designs_of(config);

  struct Slot {
    std::vector<std::vector<MethodOutcome>> by_point;  // [point][method]
    std::uint64_t seed = 0;
  };
  std::vector<std::vector<ParamPoint>> points(designs.size());
  for (std::size_t d = 0; d < designs.size(); ++d) points[d] = points_of(config, designs[d]);

  // One task per (design, rep); results land in fixed slots, so aggregation
  // order never depends on scheduling.
  const std::size_t tasks = designs.size() * config.reps;
  std::vector<Slot> slots(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next.fetch_add(1); t < tasks; t = next.fetch_add(1)) {
      const std::size_t d = t / config.reps;
      const std::size_t rep = t % config.reps;
      const Design& design = designs[d];
      sim::SimModelSpec spec = config.model;
      spec.g = design.g;
      spec.q = design.q;
      spec.delta = design.delta;
      spec.seed = derive_seed(config.model.seed, design_key(config.model, design), rep);
      Slot& slot = slots[t];
      slot.seed = spec.seed;
      std::map<std::size_t, std::vector<double>> hill_cache;
      std::optional<sim::Sample> sample;
      std::string gen_error;
      try {
        sample = sim::generate(spec);
      } catch (const std::exception& e) {
        gen_error = e.what();
      }
      for (const ParamPoint& pt : points[d]) {
        const std::size_t kh = config.k_hill.value_or(pt.params.k);
        std::string err = gen_error;
        if (sample && err.empty() && !hill_cache.contains(kh)) {
          try {
            hill_cache[kh] = hill_all(sample->data, kh);
          } catch (const std::exception& e) {
            err = e.what();
          }
        }
        if (!err.empty()) {
          std::vector<MethodOutcome> failed;
          for (Method m : config.methods) {
            MethodOutcome o;
            o.method = m;
            o.error = err;
            failed.push_back(std::move(o));
          }
          slot.by_point.push_back(std::move(failed));
          continue;
        }
        slot.by_point.push_back(run_methods(*sample, design.g, pt.params, config.methods, hill_cache.at(kh)));
      }
    }
  };
  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(1, tasks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  BenchReport report;
  report.master_seed = config.model.seed;
  report.reps = config.reps;
  report.parameter_rule =
      "defaults: k = floor(3 ln(p)^1.05), k_star = floor(n0^0.98), beta = min(2 (k/k_star) p + 0.5, 0.9), "
      "with n0 = n (simulated data are positive); overridden axes replace single values";
  for (std::size_t d = 0; d < designs.size(); ++d) {
    for (std::size_t pi = 0; pi < points[d].size(); ++pi) {
      const ParamPoint& pt = points[d][pi];
      for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
        Cell cell;
        cell.model = config.model.model;
        cell.g = designs[d].g;
        cell.q = designs[d].q;
        cell.delta = designs[d].delta;
        cell.n = config.model.n;
        cell.k = pt.params.k;
        cell.k_star = pt.params.k_star;
        cell.beta = pt.params.beta;
        cell.k_hill = config.k_hill.value_or(pt.params.k);
        cell.varied = pt.varied;
        cell.method = config.methods[mi];
        cell.reps = config.reps;
        for (std::size_t rep = 0; rep < config.reps; ++rep) {
          const Slot& slot = slots[d * config.reps + rep];
          const MethodOutcome& o = slot.by_point[pi][mi];
          RepRecord r;
          r.seed = slot.seed;
          r.ok = o.ok;
          r.accuracy = o.accuracy;
          r.mse = o.mse;
          r.groups = o.partition ? o.partition->size() : 0;
          r.error = o.error;
          cell.failures += o.ok ? 0 : 1;
          cell.wall_time_s += o.seconds;
          cell.raws.push_back(std::move(r));
        }
        cell.mean_accuracy = mean_of(cell.raws, &RepRecord::accuracy);
        cell.mean_mse = mean_of(cell.raws, &RepRecord::mse);
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

std::optional<double> mean_of(const std::vector<RepRecord>& raws, std::optional<double> RepRecord::*field) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : raws) {
    if (r.ok && (r.*field)) {
      sum += *(r.*field);
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

nlohmann::json to_json(const SweepConfig& c) {
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  return {{"model", to_json(c.model)},
          {"sweep",
           {{"g", c.g_values},
            {"q", c.q_values},
            {"delta", c.delta_values},
            {"k", c.k_values},
            {"k_star", c.k_star_values},
            {"beta", c.beta_values},
            {"one_at_a_time", c.one_at_a_time}}},
          {"reps", c.reps},
          {"methods", methods},
          {"k_hill", opt(c.k_hill)},
          {"threads", c.threads}};
}

SweepConfig sweep_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("config: expected a JSON object");
  SweepConfig c;
  auto at = [](const nlohmann::json& obj, const char* key) -> const nlohmann::json* {
    return obj.contains(key) ? &obj.at(key) : nullptr;
  };
  auto read_uint = [](const nlohmann::json& j, const std::string& path) {
    if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
      throw ParseError(path + ": expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
  };
  auto read_real = [](const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path + ": expected a number");
    return j.get<double>();
  };
  auto reject_unknown = [](const nlohmann::json& obj, std::initializer_list<const char*> known, const std::string& prefix) {
    for (const auto& item : obj.items()) {
      bool found = false;
      for (const char* k : known) found = found || item.key() == k;
      if (!found) throw ParseError(prefix + item.key() + ": unknown field");
    }
  };
  reject_unknown(doc, {"model", "sweep", "reps", "methods", "k_hill", "threads"}, "");
  if (const auto* m = at(doc, "model")) {
    if (!m->is_object()) throw ParseError("model: expected an object");
    reject_unknown(*m, {"model", "published_design", "g", "q", "delta", "n", "seed"}, "model.");
    if (m->contains("model")) {
      if (!(*m)["model"].is_string()) throw ParseError("model.model: expected a string");
      c.model.model = sim::parse_model((*m)["model"].get<std::string>());
    }
    if (m->contains("g")) c.model.g = read_uint((*m)["g"], "model.g");
    if (m->contains("q")) c.model.q = read_uint((*m)["q"], "model.q");
    if (m->contains("delta")) c.model.delta = read_real((*m)["delta"], "model.delta");
    if (m->contains("n")) c.model.n = read_uint((*m)["n"], "model.n");
    if (m->contains("seed")) c.model.seed = read_uint((*m)["seed"], "model.seed");
  }
  if (const auto* s = at(doc, "sweep")) {
    if (!s->is_object()) throw ParseError("sweep: expected an object");
    reject_unknown(*s, {"g", "q", "delta", "k", "k_star", "beta", "one_at_a_time"}, "sweep.");
    auto uints = [&](const char* key, std::vector<std::size_t>& dst) {
      if (!s->contains(key)) return;
      const auto& arr = (*s)[key];
      if (!arr.is_array()) throw ParseError(std::string("sweep.") + key + ": expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i)
        dst.push_back(read_uint(arr[i], std::string("sweep.") + key + "[" + std::to_string(i) + "]"));
    };
    auto reals = [&](const char* key, std::vector<double>& dst) {
      if (!s->contains(key)) return;
      const auto& arr = (*s)[key];
      if (!arr.is_array()) throw ParseError(std::string("sweep.") + key + ": expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i)
        dst.push_back(read_real(arr[i], std::string("sweep.") + key + "[" + std::to_string(i) + "]"));
    };
    uints("g", c.g_values);
    uints("q", c.q_values);
    reals("delta", c.delta_values);
    uints("k", c.k_values);
    uints("k_star", c.k_star_values);
    reals("beta", c.beta_values);
    if (s->contains("one_at_a_time")) {
      if (!(*s)["one_at_a_time"].is_boolean()) throw ParseError("sweep.one_at_a_time: expected a boolean");
      c.one_at_a_time = (*s)["one_at_a_time"].get<bool>();
    }
  }
  if (doc.contains("reps")) c.reps = read_uint(doc["reps"], "reps");
  if (doc.contains("methods")) {
    const auto& arr = doc["methods"];
    if (!arr.is_array()) throw ParseError("methods: expected an array");
    c.methods.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) throw ParseError("methods[" + std::to_string(i) + "]: expected a string");
      try {
        c.methods.push_back(parse_method(arr[i].get<std::string>()));
      } catch (const InvalidArgument& e) {
        throw InvalidArgument("methods[" + std::to_string(i) + "]: " + e.what());
      }
    }
  }
  if (doc.contains("k_hill") && !doc["k_hill"].is_null()) c.k_hill = read_uint(doc["k_hill"], "k_hill");
  if (doc.contains("threads")) c.threads = read_uint(doc["threads"], "threads");
  c.validate();
  return c;
}

std::string emit_report(const BenchReport& report, Format format) {
  if (format == Format::Csv) {
    std::ostringstream os;
    os << kCsvHeader << '\n';
    auto num = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const Cell& c : report.cells) {
      os << sim::to_string(c.model) << ',' << c.g << ',' << c.q << ',' << format_double(c.delta) << ',' << c.n
         << ',' << c.k << ',' << c.k_star << ',' << format_double(c.beta) << ',' << to_string(c.method) << ','
         << c.reps << ',' << c.failures << ',' << num(c.mean_accuracy) << ',' << num(c.mean_mse) << '\n';
    }
    return os.str();
  }
  nlohmann::json cells = nlohmann::json::array();
  for (const Cell& c : report.cells) {
    nlohmann::json raws = nlohmann::json::array();
    for (const RepRecord& r : c.raws) {
      raws.push_back({{"seed", r.seed},
                      {"ok", r.ok},
                      {"accuracy", opt(r.accuracy)},
                      {"mse", opt(r.mse)},
                      {"groups", r.groups},
                      {"error", r.error}});
    }
    cells.push_back({{"model", sim::to_string(c.model)},
                     {"g", c.g},
                     {"q", c.q},
                     {"delta", c.delta},
                     {"n", c.n},
                     {"k", c.k},
                     {"k_star", c.k_star},
                     {"beta", c.beta},
                     {"k_hill", c.k_hill},
                     {"varied", c.varied},
                     {"method", to_string(c.method)},
                     {"reps", c.reps},
                     {"failures", c.failures},
                     {"mean_accuracy", opt(c.mean_accuracy)},
                     {"mean_mse", opt(c.mean_mse)},
                     {"wall_time_s", c.wall_time_s},
                     {"raws", std::move(raws)}});
  }
  nlohmann::json doc = {{"schema_version", report.schema_version},
                        {"software_version", report.software_version},
                        {"master_seed", report.master_seed},
                        {"reps", report.reps},
                        {"parameter_rule", report.parameter_rule},
                        {"cells", std::move(cells)}};
  return doc.dump(2);
}

BenchReport parse_report(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
  BenchReport r;
  try {
    r.schema_version = doc.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      throw ParseError("report schema_version " + std::to_string(r.schema_version) + " is not supported");
    }
    r.software_version = doc.at("software_version").get<std::string>();
    r.master_seed = doc.at("master_seed").get<std::uint64_t>();
    r.reps = doc.at("reps").get<std::size_t>();
    r.parameter_rule = doc.at("parameter_rule").get<std::string>();
    for (const auto& jc : doc.at("cells")) {
      Cell c;
      c.model = sim::parse_model(jc.at("model").get<std::string>());
      c.g = jc.at("g").get<std::size_t>();
      c.q = jc.at("q").get<std::size_t>();
      c.delta = jc.at("delta").get<double>();
      c.n = jc.at("n").get<std::size_t>();
      c.k = jc.at("k").get<std::size_t>();
      c.k_star = jc.at("k_star").get<std::size_t>();
      c.beta = jc.at("beta").get<double>();
      c.k_hill = jc.at("k_hill").get<std::size_t>();
      c.varied = jc.at("varied").get<std::string>();
      c.method = parse_method(jc.at("method").get<std::string>());
      c.reps = jc.at("reps").get<std::size_t>();
      c.failures = jc.at("failures").get<std::size_t>();
      c.mean_accuracy = opt_double(jc.at("mean_accuracy"));
      c.mean_mse = opt_double(jc.at("mean_mse"));
      c.wall_time_s = jc.at("wall_time_s").get<double>();
      for (const auto& jr : jc.at("raws")) {
        RepRecord rr;
        rr.seed = jr.at("seed").get<std::uint64_t>();
        rr.ok = jr.at("ok").get<bool>();
        rr.accuracy = opt_double(jr.at("accuracy"));
        rr.mse = opt_double(jr.at("mse"));
        rr.groups = jr.at("groups").get<std::size_t>();
        rr.error = jr.at("error").get<std::string>();
        c.raws.push_back(std::move(rr));
      }
      r.cells.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
  return r;
}

}  // namespace tailclust::bench
