#include "glide/bench.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "glide/error.hpp"
#include "glide/eval.hpp"
#include "glide/parallel.hpp"
#include "glide/rng.hpp"

namespace glide {

DataModel parse_data_model(std::string_view text) {
  if (text == "cat") return DataModel::Categorical;
  if (text == "lg") return DataModel::LinearGaussian;
  if (text == "nlng") return DataModel::NonlinearNonGaussian;
  throw Error(ErrorKind::InvalidArgument, "unknown data model '" + std::string(text) + "' (cat, lg, nlng)");
}

std::string_view to_string(DataModel model) {
  switch (model) {
    case DataModel::Categorical: return "cat";
    case DataModel::LinearGaussian: return "lg";
    case DataModel::NonlinearNonGaussian: return "nlng";
  }
  return "cat";
}

Dataset simulate_for_discovery(const Dag& dag, DataModel model, std::size_t n, int bins, std::uint64_t seed,
                               const SimulationOptions& options) {
  switch (model) {
    case DataModel::Categorical:
      return simulate_categorical(dag, n, options.min_cats, options.max_cats, seed);
    case DataModel::LinearGaussian:
      return discretize(
          simulate_linear_gaussian(dag, n, options.weight_low, options.weight_high, options.noise_sd, seed), bins);
    case DataModel::NonlinearNonGaussian:
      return discretize(simulate_nonlinear(dag, n, seed), bins);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown data model");
}

namespace {

std::vector<std::uint64_t> parse_seeds(const Json& j) {
  std::vector<std::uint64_t> seeds;
  if (j.is_number_unsigned()) {
    for (std::uint64_t s = 0; s < j.get<std::uint64_t>(); ++s) seeds.push_back(s);
  } else if (j.is_array()) {
    for (const auto& s : j) {
      if (!s.is_number_unsigned()) throw Error(ErrorKind::InvalidArgument, "seeds must be non-negative integers");
      seeds.push_back(s.get<std::uint64_t>());
    }
  } else {
    throw Error(ErrorKind::InvalidArgument, "seeds must be a count or a list");
  }
  if (seeds.empty()) throw Error(ErrorKind::InvalidArgument, "a cell needs at least one seed");
  return seeds;
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::InvalidArgument, std::string("suite field '") + key + "' has the wrong type");
  }
}

template <typename Field>
Interval summarize(const std::vector<RunRecord>& runs, Field field) {
  std::vector<double> values;
  for (const auto& r : runs) {
    if (r.ok) values.push_back(static_cast<double>(r.*field));
  }
  return t_interval(values);
}

Json interval_json(const Interval& iv) {
  auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  return Json{{"mean", num(iv.mean)}, {"ci_low", num(iv.low)}, {"ci_high", num(iv.high)}};
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

}  // namespace

BenchSuite parse_suite(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "suite must be a JSON object");
  BenchSuite suite;
  suite.workers = get_or<unsigned>(j, "workers", 1);
  GlideConfig base;
  if (j.contains("glide")) apply_config(base, j.at("glide"));
  const std::vector<std::uint64_t> default_seeds = j.contains("seeds") ? parse_seeds(j.at("seeds")) : parse_seeds(Json(10));
  if (!j.contains("cells") || !j.at("cells").is_array() || j.at("cells").empty()) {
    throw Error(ErrorKind::InvalidArgument, "suite needs a non-empty 'cells' array");
  }
  for (const auto& c : j.at("cells")) {
    BenchCell cell;
    cell.kind = parse_graph_kind(get_or<std::string>(c, "kind", "er"));
    cell.d = get_or<int>(c, "d", 10);
    cell.e = get_or<std::size_t>(c, "e", static_cast<std::size_t>(cell.d));
    cell.model = parse_data_model(get_or<std::string>(c, "model", "cat"));
    cell.n = get_or<std::size_t>(c, "n", 10000);
    cell.seeds = c.contains("seeds") ? parse_seeds(c.at("seeds")) : default_seeds;
    cell.config = base;
    if (c.contains("glide")) apply_config(cell.config, c.at("glide"));
    cell.config.threads = 1;
    cell.simulation.min_cats = get_or<int>(c, "min_cats", 2);
    cell.simulation.max_cats = get_or<int>(c, "max_cats", 5);
    std::ostringstream name;
    name << to_string(cell.kind) << "-d" << cell.d << "-e" << cell.e << "-" << to_string(cell.model) << "-n" << cell.n;
    cell.name = get_or<std::string>(c, "name", name.str());
    suite.cells.push_back(std::move(cell));
  }
  return suite;
}

Interval t_interval(const std::vector<double>& values, double level) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Interval out{nan, nan, nan};
  const std::size_t n = values.size();
  if (n == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(n);
  if (n < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double half = boost::math::quantile(dist, 0.5 + level / 2.0) * sd / std::sqrt(static_cast<double>(n));
  out.low = out.mean - half;
  out.high = out.mean + half;
  return out;
}

RunRecord run_bench_once(const BenchCell& cell, std::uint64_t seed) {
  RunRecord rec;
  rec.seed = seed;
  try {
    const Dag truth = gen_random_dag(cell.kind, cell.d, cell.e, derive_seed(seed, "graph"));
    const Dataset ds =
        simulate_for_discovery(truth, cell.model, cell.n, cell.config.bins, derive_seed(seed, "data"), cell.simulation);
    GlideConfig cfg = cell.config;
    cfg.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    const GlideResult result = discover(ds, cfg);
    rec.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const MetricReport m = compare(result.graph, truth);
    rec.shd = m.shd;
    rec.spurious_rate = m.spurious_rate;
    rec.tpr = m.tpr;
    rec.predicted_edges = result.graph.edge_count();
    rec.ok = true;
  } catch (const std::exception& ex) {
    rec.error = ex.what();
  }
  return rec;
}

std::vector<CellSummary> run_bench(const BenchSuite& suite, const std::function<void(const std::string&)>& progress) {
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  std::vector<CellSummary> out(suite.cells.size());
  for (std::size_t c = 0; c < suite.cells.size(); ++c) {
    out[c].cell = suite.cells[c];
    out[c].runs.resize(suite.cells[c].seeds.size());
    for (std::size_t s = 0; s < suite.cells[c].seeds.size(); ++s) jobs.emplace_back(c, s);
  }
  std::mutex progress_mutex;
  parallel_for(jobs.size(), suite.workers, [&](std::size_t k) {
    const auto [c, s] = jobs[k];
    const BenchCell& cell = suite.cells[c];
    out[c].runs[s] = run_bench_once(cell, cell.seeds[s]);
    if (progress) {
      const RunRecord& r = out[c].runs[s];
      std::ostringstream line;
      line << cell.name << " seed " << r.seed << ": ";
      if (r.ok) {
        line << "shd " << r.shd << ", spurious " << r.spurious_rate << ", " << r.runtime << " s";
      } else {
        line << "failed (" << r.error << ")";
      }
      std::lock_guard lock(progress_mutex);
      progress(line.str());
    }
  });
  for (auto& summary : out) {
    for (const auto& r : summary.runs) summary.failures += r.ok ? 0 : 1;
    summary.shd = summarize(summary.runs, &RunRecord::shd);
    summary.spurious_rate = summarize(summary.runs, &RunRecord::spurious_rate);
    summary.tpr = summarize(summary.runs, &RunRecord::tpr);
    summary.runtime = summarize(summary.runs, &RunRecord::runtime);
  }
  return out;
}

std::string bench_csv(const std::vector<CellSummary>& cells, bool include_runtime) {
  std::ostringstream out;
  out << "cell,kind,d,e,model,n,runs,failures,shd_mean,shd_ci_low,shd_ci_high,spurious_mean,spurious_ci_low,"
         "spurious_ci_high,tpr_mean,tpr_ci_low,tpr_ci_high";
  if (include_runtime) out << ",runtime_mean,runtime_ci_low,runtime_ci_high";
  out << "\n";
  for (const auto& s : cells) {
    const auto& c = s.cell;
    out << c.name << ',' << to_string(c.kind) << ',' << c.d << ',' << c.e << ',' << to_string(c.model) << ','
        << c.n << ',' << s.runs.size() << ',' << s.failures;
    for (const Interval* iv : {&s.shd, &s.spurious_rate, &s.tpr}) {
      out << ',' << csv_number(iv->mean) << ',' << csv_number(iv->low) << ',' << csv_number(iv->high);
    }
    if (include_runtime) {
      out << ',' << csv_number(s.runtime.mean) << ',' << csv_number(s.runtime.low) << ','
          << csv_number(s.runtime.high);
    }
    out << "\n";
  }
  return out.str();
}

Json bench_json(const std::vector<CellSummary>& cells, bool include_runtime) {
  Json rows = Json::array();
  for (const auto& s : cells) {
    const auto& c = s.cell;
    Json runs = Json::array();
    for (const auto& r : s.runs) {
      Json run{{"seed", r.seed}, {"ok", r.ok}};
      if (r.ok) {
        run["shd"] = r.shd;
        run["spurious_rate"] = r.spurious_rate;
        run["tpr"] = r.tpr;
        run["predicted_edges"] = r.predicted_edges;
        if (include_runtime) run["runtime"] = r.runtime;
      } else {
        run["error"] = r.error;
      }
      runs.push_back(std::move(run));
    }
    Json row{{"cell", c.name},
             {"kind", std::string(to_string(c.kind))},
             {"d", c.d},
             {"e", c.e},
             {"model", std::string(to_string(c.model))},
             {"n", c.n},
             {"config", to_json(c.config)},
             {"failures", s.failures},
             {"shd", interval_json(s.shd)},
             {"spurious_rate", interval_json(s.spurious_rate)},
             {"tpr", interval_json(s.tpr)}};
    if (include_runtime) row["runtime"] = interval_json(s.runtime);
    row["runs"] = std::move(runs);
    rows.push_back(std::move(row));
  }
  return Json{{"version", kVersion}, {"confidence", 0.95}, {"cells", rows}};
}

}  // namespace glide
