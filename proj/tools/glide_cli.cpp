// glide command line: gen-graph, gen-data, discover, eval, bench.
//
// Exit codes: 0 success, 1 run failure, 2 input error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "glide/bench.hpp"
#include "glide/error.hpp"
#include "glide/eval.hpp"
#include "glide/invariance.hpp"
#include "glide/report.hpp"
#include "glide/rng.hpp"

namespace {

using glide::Json;

constexpr int kRunFailure = 1;
constexpr int kInputError = 2;

int exit_code_for(glide::ErrorKind kind) {
  using glide::ErrorKind;
  switch (kind) {
    case ErrorKind::EnvironmentTooSmall:
    case ErrorKind::CandidateExplosion:
    case ErrorKind::DegenerateCategory:
    case ErrorKind::NodeOutOfRange:
      return kRunFailure;
    default:
      return kInputError;
  }
}

Json diagnostic(int code, std::string_view kind, std::string_view message) {
  return Json{{"status", "error"}, {"exit_code", code}, {"error", kind}, {"message", message}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw glide::Error(glide::ErrorKind::IoError, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw glide::Error(glide::ErrorKind::ParseError, path + ": " + ex.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Optional GlideConfig overrides; unset flags leave config-file values alone.
struct ConfigFlags {
  std::optional<int> m;
  std::optional<double> gamma;
  std::optional<double> epsilon;
  std::optional<double> alpha;
  std::optional<int> bins;
  std::optional<double> laplace;
  std::optional<std::size_t> pool;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> min_rows;
  std::optional<int> cap_k;
  std::optional<std::size_t> max_candidates;
  std::optional<std::string> budget;
  std::optional<std::size_t> min_support;
  std::optional<int> refine_max_size;
  std::optional<unsigned> threads;
  std::optional<std::string> mode;
  std::string config_path;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON file with GlideConfig fields (flags take precedence)");
    app->add_option("--m", m, "number of environments");
    app->add_option("--gamma", gamma, "inverse downsampling floor, in (0, 1)");
    app->add_option("--epsilon", epsilon, "invariance threshold");
    app->add_option("--alpha", alpha, "significance level of the independence tests");
    app->add_option("--bins", bins, "equal-width bins for continuous data");
    app->add_option("--laplace", laplace, "additive smoothing of conditional tables");
    app->add_option("--pool", pool, "Dirichlet prior samples before clustering");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--min-rows", min_rows, "smallest acceptable environment");
    app->add_option("--cap-k", cap_k, "largest separating set tried in spouse removal");
    app->add_option("--max-candidates", max_candidates, "candidate parent sets allowed per variable");
    app->add_option("--budget", budget, "prior budget: joint, per-variable or one-at-a-time");
    app->add_option("--min-support", min_support, "rows needed for a stratum to enter a test");
    app->add_option("--refine-max-size", refine_max_size, "largest clique whose subsets are all scored");
    app->add_option("--threads", threads, "worker threads (0 = hardware)");
    app->add_option("--mode", mode, "data mode: cat or cont");
  }

  // Defaults, then the config file, then flags.
  glide::GlideConfig resolve(std::string& resolved_mode) const {
    glide::GlideConfig cfg;
    resolved_mode = "cat";
    if (!config_path.empty()) {
      const Json j = read_json_file(config_path);
      glide::apply_config(cfg, j);
      if (j.contains("mode")) resolved_mode = j.at("mode").get<std::string>();
    }
    if (m) cfg.m = *m;
    if (gamma) cfg.gamma_o = *gamma;
    if (epsilon) cfg.epsilon = *epsilon;
    if (alpha) cfg.ci_alpha = *alpha;
    if (bins) cfg.bins = *bins;
    if (laplace) cfg.laplace_alpha = *laplace;
    if (pool) cfg.pool = *pool;
    if (seed) cfg.seed = *seed;
    if (min_rows) cfg.min_rows = *min_rows;
    if (cap_k) cfg.cap_k = *cap_k;
    if (max_candidates) cfg.max_candidates = *max_candidates;
    if (budget) cfg.budget = glide::parse_prior_budget(*budget);
    if (min_support) cfg.min_support = *min_support;
    if (refine_max_size) cfg.refine_max_size = *refine_max_size;
    if (threads) cfg.threads = *threads;
    if (mode) resolved_mode = *mode;
    if (resolved_mode != "cat" && resolved_mode != "cont") {
      throw glide::Error(glide::ErrorKind::InvalidArgument, "mode must be cat or cont");
    }
    cfg.validate();
    return cfg;
  }
};

// ---------------------------------------------------------------------------

struct GenGraphArgs {
  std::string kind = "er";
  int d = 10;
  std::size_t e = 10;
  std::uint64_t seed = 0;
  std::string out;
  double attach_power = 1.0;
  int bipartite_top = -1;
};

int cmd_gen_graph(const GenGraphArgs& a) {
  const std::string started = glide::utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  glide::GeneratorOptions options;
  options.attach_power = a.attach_power;
  options.bipartite_top = a.bipartite_top;
  const glide::Dag dag = glide::gen_random_dag(glide::parse_graph_kind(a.kind), a.d, a.e, a.seed, options);
  glide::save_edge_list(a.out, dag);

  glide::RunManifest manifest;
  manifest.command = "gen-graph";
  manifest.seed = a.seed;
  manifest.config = Json{{"kind", std::string(glide::to_string(glide::parse_graph_kind(a.kind)))},
                         {"d", a.d},
                         {"e", a.e},
                         {"attach_power", a.attach_power},
                         {"bipartite_top", a.bipartite_top}};
  manifest.outputs = {a.out};
  manifest.started = started;
  manifest.finished = glide::utc_now();
  manifest.timings["total"] = seconds_since(t0);
  glide::write_manifest(a.out, manifest);
  std::cout << "wrote " << a.out << " (" << dag.size() << " nodes, " << dag.edge_count() << " edges)\n";
  return 0;
}

struct GenDataArgs {
  std::string graph;
  std::string model = "cat";
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  std::string out;
  glide::SimulationOptions sim;
  bool with_cpts = false;
};

int cmd_gen_data(const GenDataArgs& a) {
  const std::string started = glide::utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  const glide::Dag dag = glide::load_edge_list(a.graph);
  const glide::DataModel model = glide::parse_data_model(a.model);
  if (a.n < 1) throw glide::Error(glide::ErrorKind::InvalidArgument, "n must be >= 1");

  Json meta{{"model", std::string(glide::to_string(model))},
            {"seed", a.seed},
            {"n", a.n},
            {"graph", a.graph},
            {"variables", dag.names()}};
  std::ostringstream csv;
  switch (model) {
    case glide::DataModel::Categorical: {
      // Same sub-streams as simulate_categorical, so the metadata matches.
      const auto cat = glide::random_categorical_model(dag, a.sim.min_cats, a.sim.max_cats,
                                                       glide::derive_seed(a.seed, "cpts"));
      const glide::Dataset ds = glide::sample_categorical(cat, a.n, glide::derive_seed(a.seed, "rows"));
      glide::write_csv(csv, ds);
      meta["min_cats"] = a.sim.min_cats;
      meta["max_cats"] = a.sim.max_cats;
      meta["cardinalities"] = cat.cardinalities;
      if (a.with_cpts) meta["cpts"] = cat.cpts;
      break;
    }
    case glide::DataModel::LinearGaussian: {
      const auto weights = glide::draw_linear_weights(dag, a.sim.weight_low, a.sim.weight_high,
                                                      glide::derive_seed(a.seed, "weights"));
      glide::write_csv(csv, glide::simulate_linear_gaussian(dag, a.n, weights, a.sim.noise_sd,
                                                            glide::derive_seed(a.seed, "noise")));
      Json edges = Json::array();
      for (std::size_t k = 0; k < dag.edges().size(); ++k) {
        const auto& [p, c] = dag.edges()[k];
        edges.push_back(Json{{"parent", dag.name(p)}, {"child", dag.name(c)}, {"weight", weights.weights[k]}});
      }
      meta["noise_sd"] = a.sim.noise_sd;
      meta["weights"] = edges;
      break;
    }
    case glide::DataModel::NonlinearNonGaussian:
      glide::write_csv(csv, glide::simulate_nonlinear(dag, a.n, a.seed));
      break;
  }
  glide::write_text(a.out, csv.str());
  const std::string meta_path = a.out + ".json";
  glide::write_text(meta_path, meta.dump(2) + "\n");

  glide::RunManifest manifest;
  manifest.command = "gen-data";
  manifest.seed = a.seed;
  manifest.config = Json{{"model", a.model}, {"n", a.n}, {"min_cats", a.sim.min_cats}, {"max_cats", a.sim.max_cats},
                         {"weight_low", a.sim.weight_low}, {"weight_high", a.sim.weight_high},
                         {"noise_sd", a.sim.noise_sd}, {"with_cpts", a.with_cpts}};
  manifest.inputs = {a.graph};
  manifest.outputs = {a.out, meta_path};
  manifest.started = started;
  manifest.finished = glide::utc_now();
  manifest.timings["total"] = seconds_since(t0);
  glide::write_manifest(a.out, manifest);
  glide::write_manifest(meta_path, manifest);
  std::cout << "wrote " << a.out << " (" << a.n << " rows, " << dag.size() << " columns)\n";
  return 0;
}

struct DiscoverArgs {
  std::string data;
  std::string out;
  std::string report;
  std::string truth;
  bool oracle = false;
  ConfigFlags flags;
};

int cmd_discover(const DiscoverArgs& a) {
  const std::string started = glide::utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  std::string mode;
  const glide::GlideConfig cfg = a.flags.resolve(mode);
  const std::string report_path = a.report.empty() ? a.out + ".report.json" : a.report;
  if (a.oracle && a.truth.empty()) {
    throw glide::Error(glide::ErrorKind::InvalidArgument, "--oracle needs --truth");
  }

  const glide::Dataset ds = mode == "cat" ? glide::load_csv_categorical(a.data)
                                          : glide::discretize(glide::load_csv_continuous(a.data), cfg.bins);
  std::optional<glide::Dag> truth;
  if (!a.truth.empty()) {
    truth = glide::load_edge_list(a.truth);
    if (truth->names() != ds.names()) {
      throw glide::Error(glide::ErrorKind::NodeSetMismatch, "truth graph and data have different variables");
    }
  }

  glide::GlideResult result;
  try {
    if (a.oracle) {
      const auto src = glide::IndepSource::oracle(*truth);
      result = glide::discover(ds, src, cfg);
    } else {
      result = glide::discover(ds, cfg);
    }
  } catch (const glide::Error& ex) {
    // Pipeline failures are run failures regardless of kind.
    const Json diag = diagnostic(kRunFailure, glide::to_string(ex.kind()), ex.what());
    glide::write_text(report_path, diag.dump(2) + "\n");
    std::cerr << diag.dump() << "\n";
    return kRunFailure;
  }

  Json report;
  if (truth) glide::annotate_with_truth(result.report, *truth);
  report = glide::to_json(result.report, ds.names());
  report["mode"] = mode;
  if (truth) report["metrics"] = glide::to_json(glide::compare(result.graph, *truth), ds.names());
  glide::save_edge_list(a.out, result.graph);
  glide::write_text(report_path, report.dump(2) + "\n");

  glide::RunManifest manifest;
  manifest.command = "discover";
  manifest.seed = cfg.seed;
  manifest.config = glide::to_json(cfg);
  manifest.config["mode"] = mode;
  manifest.config["oracle"] = a.oracle;
  manifest.inputs = {a.data};
  if (truth) manifest.inputs.push_back(a.truth);
  manifest.outputs = {a.out, report_path};
  manifest.started = started;
  manifest.finished = glide::utc_now();
  manifest.timings = result.report.timings;
  manifest.timings["wall"] = seconds_since(t0);
  manifest.diagnostics["independence_tests"] = glide::to_json(result.report.indep);
  glide::write_manifest(a.out, manifest);
  glide::write_manifest(report_path, manifest);

  std::cout << "wrote " << a.out << " (" << result.graph.edge_count() << " edges) and " << report_path << "\n";
  for (const auto& w : result.report.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

struct EvalArgs {
  std::string pred;
  std::string truth;
  bool json = false;
  std::string out;
};

int cmd_eval(const EvalArgs& a) {
  const std::string started = glide::utc_now();
  const glide::Dag pred = glide::load_edge_list(a.pred);
  const glide::Dag truth = glide::load_edge_list(a.truth);
  const glide::MetricReport m = glide::compare(pred, truth);
  const Json j = glide::to_json(m, truth.names());
  std::string text;
  if (a.json) {
    text = j.dump(2) + "\n";
  } else {
    std::ostringstream s;
    s << "shd " << m.shd << " (missing " << m.missing.size() << ", extra " << m.extra.size() << ", reversed "
      << m.reversed.size() << ")\nspurious_rate " << m.spurious_rate << "\ntpr " << m.tpr << "\n";
    text = s.str();
  }
  std::cout << text;
  if (!a.out.empty()) {
    glide::write_text(a.out, text);
    glide::RunManifest manifest;
    manifest.command = "eval";
    manifest.config = Json{{"json", a.json}};
    manifest.inputs = {a.pred, a.truth};
    manifest.outputs = {a.out};
    manifest.started = started;
    manifest.finished = glide::utc_now();
    glide::write_manifest(a.out, manifest);
  }
  return 0;
}

struct BenchArgs {
  std::string suite;
  std::string out;
  std::optional<unsigned> workers;
  bool omit_runtime = false;
  bool quiet = false;
};

int cmd_bench(const BenchArgs& a) {
  const std::string started = glide::utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  const Json suite_json = read_json_file(a.suite);
  glide::BenchSuite suite = glide::parse_suite(suite_json);
  if (a.workers) suite.workers = *a.workers;
  auto progress = [&](const std::string& line) {
    if (!a.quiet) std::cerr << line << "\n";
  };
  const auto cells = glide::run_bench(suite, progress);
  const std::string json_path = a.out + ".json";
  glide::write_text(a.out, glide::bench_csv(cells, !a.omit_runtime));
  glide::write_text(json_path, glide::bench_json(cells, !a.omit_runtime).dump(2) + "\n");

  glide::RunManifest manifest;
  manifest.command = "bench";
  manifest.config = suite_json;
  manifest.config["workers"] = suite.workers;
  manifest.config["omit_runtime"] = a.omit_runtime;
  manifest.inputs = {a.suite};
  manifest.outputs = {a.out, json_path};
  manifest.started = started;
  manifest.finished = glide::utc_now();
  manifest.timings["total"] = seconds_since(t0);
  glide::write_manifest(a.out, manifest);
  glide::write_manifest(json_path, manifest);

  std::cout << glide::bench_csv(cells, !a.omit_runtime);
  std::size_t failures = 0;
  for (const auto& c : cells) failures += c.failures;
  return failures == 0 ? 0 : kRunFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glide: causal discovery by effect-cause invariance"};
  app.require_subcommand(1);
  app.set_version_flag("--version", glide::kVersion);

  GenGraphArgs gg;
  auto* gen_graph = app.add_subcommand("gen-graph", "generate a random DAG as an edge list");
  gen_graph->add_option("--kind", gg.kind, "erdos_renyi (er), scale_free (sf) or bipartite (bp)");
  gen_graph->add_option("--d", gg.d, "number of nodes")->required();
  gen_graph->add_option("--e", gg.e, "number of edges")->required();
  gen_graph->add_option("--seed", gg.seed, "seed");
  gen_graph->add_option("--out", gg.out, "output edge list")->required();
  gen_graph->add_option("--attach-power", gg.attach_power, "scale-free attachment exponent");
  gen_graph->add_option("--bipartite-top", gg.bipartite_top, "size of the parent layer (bipartite)");

  GenDataArgs gd;
  auto* gen_data = app.add_subcommand("gen-data", "sample a dataset from a graph");
  gen_data->add_option("--graph", gd.graph, "edge list")->required();
  gen_data->add_option("--model", gd.model, "cat, lg or nlng");
  gen_data->add_option("--n", gd.n, "rows")->required();
  gen_data->add_option("--seed", gd.seed, "seed");
  gen_data->add_option("--out", gd.out, "output CSV")->required();
  gen_data->add_option("--min-cats", gd.sim.min_cats, "fewest categories per variable (cat)");
  gen_data->add_option("--max-cats", gd.sim.max_cats, "most categories per variable (cat)");
  gen_data->add_option("--weight-low", gd.sim.weight_low, "smallest edge weight magnitude (lg)");
  gen_data->add_option("--weight-high", gd.sim.weight_high, "largest edge weight magnitude (lg)");
  gen_data->add_option("--noise-sd", gd.sim.noise_sd, "Gaussian noise scale (lg)");
  gen_data->add_flag("--with-cpts", gd.with_cpts, "include conditional tables in the sidecar (cat)");

  DiscoverArgs dc;
  auto* disc = app.add_subcommand("discover", "recover a DAG from a CSV dataset");
  disc->add_option("--data", dc.data, "input CSV")->required();
  disc->add_option("--out", dc.out, "output edge list")->required();
  disc->add_option("--report", dc.report, "JSON report (default <out>.report.json)");
  disc->add_option("--truth", dc.truth, "true graph: adds metrics and assumption flags to the report");
  disc->add_flag("--oracle", dc.oracle, "answer independence queries by d-separation in --truth");
  dc.flags.attach(disc);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "compare a predicted graph with the truth");
  eval->add_option("--pred", ev.pred, "predicted edge list")->required();
  eval->add_option("--truth", ev.truth, "true edge list")->required();
  eval->add_flag("--json", ev.json, "print JSON");
  eval->add_option("--out", ev.out, "also write the result here");

  BenchArgs bn;
  auto* bench = app.add_subcommand("bench", "run a benchmark suite");
  bench->add_option("--suite", bn.suite, "suite JSON")->required();
  bench->add_option("--out", bn.out, "output CSV table (JSON written to <out>.json)")->required();
  bench->add_option("--workers", bn.workers, "parallel runs (overrides the suite)");
  bench->add_flag("--omit-runtime", bn.omit_runtime, "drop the runtime columns (byte-reproducible tables)");
  bench->add_flag("--quiet", bn.quiet, "no per-run progress");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*gen_graph) return cmd_gen_graph(gg);
    if (*gen_data) return cmd_gen_data(gd);
    if (*disc) return cmd_discover(dc);
    if (*eval) return cmd_eval(ev);
    if (*bench) return cmd_bench(bn);
  } catch (const glide::Error& ex) {
    const int code = exit_code_for(ex.kind());
    std::cerr << diagnostic(code, glide::to_string(ex.kind()), ex.what()).dump() << "\n";
    return code;
  } catch (const std::exception& ex) {
    std::cerr << diagnostic(kRunFailure, "Internal", ex.what()).dump() << "\n";
    return kRunFailure;
  }
  return kInputError;
}
