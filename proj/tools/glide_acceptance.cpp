// Acceptance run: one PASS / FAIL / SKIP line per criterion.
//
//   glide_acceptance [--only name[,name...]] [--strict]
//
// Exit status is 0 once every selected criterion has been evaluated; with
// --strict it is 1 when any of them failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "glide/augment.hpp"
#include "glide/basis.hpp"
#include "glide/bench.hpp"
#include "glide/dataset.hpp"
#include "glide/error.hpp"
#include "glide/eval.hpp"
#include "glide/graph.hpp"
#include "glide/indep.hpp"
#include "glide/invariance.hpp"
#include "glide/parents.hpp"
#include "glide/report.hpp"

namespace glide {
namespace {

using Clock = std::chrono::steady_clock;
using Vec = std::vector<double>;

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status = Status::Fail;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int precision = 4) {
  std::ostringstream out;
  out << std::setprecision(precision) << v;
  return out.str();
}

Vec random_simplex(std::mt19937_64& rng, std::size_t r, double floor) {
  std::gamma_distribution<double> g(1.0, 1.0);
  Vec v(r);
  double total = 0.0;
  for (double& x : v) total += (x = floor + g(rng));
  for (double& x : v) x /= total;
  return v;
}

// 200 ER DAGs with d <= 10, e <= 12, categorical data at n = 1e5 and the
// d-separation oracle. A node qualifies when Pa ∩ Sp = Sp ∩ B = ∅ with B the
// basis the run actually used. The rate restricted to graphs whose basis is
// exactly the source set is reported alongside.
Outcome oracle_exactness() {
  const auto t0 = Clock::now();
  std::size_t qualifying = 0, exact = 0, errors = 0;
  std::size_t source_qualifying = 0, source_exact = 0;
  std::vector<std::string> misses;
  for (std::uint64_t g = 0; g < 200; ++g) {
    std::mt19937_64 rng(g);
    const int d = 3 + static_cast<int>(rng() % 8);
    const std::size_t e_max = std::min<std::size_t>(12, static_cast<std::size_t>(d * (d - 1) / 2));
    const std::size_t e = rng() % (e_max + 1);
    const Dag dag = gen_random_dag(GraphKind::ErdosRenyi, d, e, g);
    const Dataset ds = simulate_categorical(dag, 100000, 2, 5, g);
    GlideConfig cfg;
    cfg.seed = g;
    cfg.min_rows = 10;
    GlideResult result;
    try {
      result = discover(ds, IndepSource::oracle(dag), cfg);
    } catch (const Error&) {
      ++errors;
      continue;
    }
    annotate_with_truth(result.report, dag);
    NodeSet basis = result.report.basis;
    std::sort(basis.begin(), basis.end());
    const bool basis_is_sources = basis == sources(dag);
    for (NodeId x = 0; x < d; ++x) {
      const NodeReport& node = result.report.nodes[x];
      if (!node.assumptions_hold.value_or(false)) continue;
      const bool hit = node.parents == dag.parents(x);
      ++qualifying;
      source_qualifying += basis_is_sources ? 1 : 0;
      source_exact += basis_is_sources && hit ? 1 : 0;
      if (hit) {
        ++exact;
      } else if (misses.size() < 3) {
        misses.push_back("g" + std::to_string(g) + "/X" + std::to_string(x));
      }
    }
  }
  const double elapsed = seconds_since(t0);
  const double rate = qualifying == 0 ? 0.0 : static_cast<double>(exact) / static_cast<double>(qualifying);
  std::string detail = std::to_string(exact) + "/" + std::to_string(qualifying) + " qualifying nodes exact (" +
                       fmt(100.0 * rate) + "%, target 100%), run errors " + std::to_string(errors) + ", " +
                       fmt(elapsed) + " s (limit 300 s); on graphs whose basis is the source set " +
                       std::to_string(source_exact) + "/" + std::to_string(source_qualifying);
  if (!misses.empty()) {
    detail += ", e.g.";
    for (const auto& m : misses) detail += " " + m;
  }
  const bool ok = qualifying > 0 && exact == qualifying && errors == 0 && elapsed < 300.0;
  return {ok ? Status::Pass : Status::Fail, detail};
}

Outcome basis_correctness() {
  std::size_t agree = 0;
  for (std::uint64_t g = 0; g < 500; ++g) {
    std::mt19937_64 rng(1000 + g);
    const int d = 2 + static_cast<int>(rng() % 11);
    const std::size_t e = rng() % (static_cast<std::size_t>(d * (d - 1) / 2) + 1);
    const Dag dag = gen_random_dag(GraphKind::ErdosRenyi, d, e, rng());
    const auto phi = dependence_matrix(IndepSource::oracle(dag), d);
    agree += find_basis(phi).members.size() == sources(dag).size() ? 1 : 0;
  }
  return {agree == 500 ? Status::Pass : Status::Fail,
          std::to_string(agree) + "/500 graphs with |basis| == |sources|"};
}

// 100 (marginal, prior) pairs on exactly 1e5 rows.
Outcome downsampling_law() {
  constexpr std::size_t kRows = 100000;
  std::mt19937_64 rng(7);
  std::size_t ok = 0;
  double worst_ratio = 0.0;  // max over pairs of max_b |emp - prior| * |D_i|
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 2 + rng() % 5;
    const Vec p = random_simplex(rng, r, 0.2);
    std::vector<Code> col;
    std::size_t total = 0;
    for (std::size_t b = 0; b < r; ++b) {
      const std::size_t count = b + 1 < r ? static_cast<std::size_t>(p[b] * kRows) : kRows - total;
      total += count;
      col.insert(col.end(), count, static_cast<Code>(b));
    }
    std::shuffle(col.begin(), col.end(), rng);
    const Dataset ds({"x"}, {col}, {static_cast<int>(r)});
    const Vec marginal = empirical_marginal(DataView(ds), 0);
    const double gamma_o = 0.2 + 0.7 * std::uniform_real_distribution<double>()(rng);
    const Prior prior = sample_priors(marginal, gamma_o, 1, rng(), 0)[0];
    const Downsample out = downsample_once(DataView(ds), prior, rng());
    const double n_i = static_cast<double>(out.rows.size());
    const Vec got = empirical_marginal(DataView(ds, out.rows), 0);
    double max_abs = 0.0;
    for (std::size_t b = 0; b < r; ++b) max_abs = std::max(max_abs, std::abs(got[b] - prior.probs[b]));
    worst_ratio = std::max(worst_ratio, max_abs * n_i);
    // Each category loses less than one row to the floor.
    const double shortfall = static_cast<double>(kRows) * out.gamma - n_i;
    const bool size_ok = shortfall >= -1e-6 && shortfall < static_cast<double>(r);
    ok += max_abs <= 2.0 / n_i && size_ok && !out.clamped ? 1 : 0;
  }
  return {ok == 100 ? Status::Pass : Status::Fail,
          std::to_string(ok) + "/100 pairs, worst max-abs error " + fmt(worst_ratio) + "/|D_i| (bound 2/|D_i|)"};
}

Outcome convex_hull_law() {
  std::mt19937_64 rng(11);
  std::size_t violations = 0, boundary_checked = 0;
  double worst = 1.0;
  for (double gamma_o : {0.3, 0.5, 0.8}) {
    const Vec p = random_simplex(rng, 4, 0.1);
    for (const Prior& prior : sample_priors(p, gamma_o, 10000, rng(), 0)) {
      const double g = gamma_of(p, prior.probs);
      worst = std::min(worst, g - gamma_o);
      violations += g >= gamma_o - 1e-9 ? 0 : 1;
    }
    const BoundaryPriors boundary = boundary_priors(p, gamma_o, 0);
    for (std::size_t k = 0; k < boundary.priors.size(); ++k) {
      const bool clamped =
          std::find(boundary.clamped.begin(), boundary.clamped.end(), static_cast<int>(k)) != boundary.clamped.end();
      const double g = gamma_of(p, boundary.priors[k].probs);
      ++boundary_checked;
      if (clamped ? g < gamma_o - 1e-9 : std::abs(g - gamma_o) > 1e-9) ++violations;
    }
  }
  return {violations == 0 ? Status::Pass : Status::Fail,
          "30000 hull samples and " + std::to_string(boundary_checked) + " boundary priors, " +
              std::to_string(violations) + " violations, min gamma - gamma_o = " + fmt(worst)};
}

// Tree enumeration as used by plausible_parent_sets, without the reference
// fallback, against Bron-Kerbosch.
Outcome clique_equivalence() {
  std::mt19937_64 rng(13);
  std::size_t agree = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 15);
    const double density = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    std::vector<NodeId> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    BiGraph h(ids);
    std::bernoulli_distribution coin(density);
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (coin(rng)) h.add_edge(u, v);
      }
    }
    auto tree = tree_maximal_cliques(h);
    auto reference = bron_kerbosch_reference(h);
    std::sort(tree.begin(), tree.end());
    std::sort(reference.begin(), reference.end());
    agree += tree == reference ? 1 : 0;
  }
  return {agree == 500 ? Status::Pass : Status::Fail, std::to_string(agree) + "/500 graphs identical"};
}

// Binary A -> X with P(A=1) = 0.4, P(X=1|A=0) = 0.15, P(X=1|A=1) = 0.8.
Outcome invariance_direction() {
  const auto t0 = Clock::now();
  CategoricalModel model;
  model.dag = Dag::from_indices(2, {{0, 1}});
  model.cardinalities = {2, 2};
  model.cpts = {{{0.6, 0.4}}, {{0.85, 0.15}, {0.2, 0.8}}};
  int good = 0;
  double worst_ratio = std::numeric_limits<double>::infinity();
  double worst_causal = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset ds = sample_categorical(model, 100000, seed);
    Basis basis;
    basis.members = {0};
    basis.dependence_sets = {{}};
    EnvironmentOptions opts;
    opts.m = 30;
    opts.gamma_o = 0.5;
    const EnvironmentSet envs = make_environments(ds, basis, opts, seed);
    const GlideConfig cfg;
    const double causal = invariance_score(envs, 1, {0}, cfg).variance;
    const double anti = invariance_score(envs, 0, {1}, cfg).variance;
    worst_causal = std::max(worst_causal, causal);
    worst_ratio = std::min(worst_ratio, anti / causal);
    good += causal < 1e-3 && anti / causal >= 5.0 ? 1 : 0;
  }
  const double elapsed = seconds_since(t0);
  return {good >= 9 && elapsed < 30.0 ? Status::Pass : Status::Fail,
          std::to_string(good) + "/10 seeds (need 9), max var(X|A) " + fmt(worst_causal) + ", min ratio " +
              fmt(worst_ratio) + ", " + fmt(elapsed) + " s (limit 30 s)"};
}

Outcome desk_benchmark() {
  const auto t0 = Clock::now();
  BenchSuite suite;
  BenchCell cell;
  cell.name = "desk";
  cell.d = 100;
  cell.e = 100;
  cell.n = 10000;
  cell.config.m = 30;
  cell.config.gamma_o = 0.6;
  for (std::uint64_t s = 0; s < 10; ++s) cell.seeds.push_back(s);
  suite.cells = {cell};
  const auto summary = run_bench(suite).front();
  const double elapsed = seconds_since(t0);
  const bool ok = summary.failures == 0 && summary.shd.mean <= 200.0 && summary.spurious_rate.mean <= 0.12 &&
                  elapsed <= 900.0;
  return {ok ? Status::Pass : Status::Fail,
          "mean SHD " + fmt(summary.shd.mean) + " (limit 200), mean spurious " +
              fmt(100.0 * summary.spurious_rate.mean) + "% (limit 12%), failures " +
              std::to_string(summary.failures) + ", " + fmt(elapsed) + " s (limit 900 s)"};
}

Outcome sachs() {
  const char* csv = std::getenv("GLIDE_SACHS_CSV");
  const char* truth_path = std::getenv("GLIDE_SACHS_TRUTH");
  if (csv == nullptr || truth_path == nullptr) {
    return {Status::Skip, "GLIDE_SACHS_CSV and GLIDE_SACHS_TRUTH not set; no data to run on"};
  }
  try {
    const Dataset ds = load_csv_categorical(csv);
    const Dag truth = load_edge_list(truth_path);
    const auto t0 = Clock::now();
    const GlideResult result = discover(ds, GlideConfig{});
    const double elapsed = seconds_since(t0);
    const MetricReport m = compare(result.graph, truth);
    const bool ok = m.shd <= 12 && m.spurious_rate <= 0.10 && elapsed <= 60.0;
    return {ok ? Status::Pass : Status::Fail, "SHD " + std::to_string(m.shd) + " (limit 12), spurious " +
                                                  fmt(100.0 * m.spurious_rate) + "% (limit 10%), " + fmt(elapsed) +
                                                  " s (limit 60 s)"};
  } catch (const Error& e) {
    return {Status::Fail, std::string("could not run: ") + e.what()};
  }
}

Outcome scalability() {
  const Dag dag = gen_random_dag(GraphKind::ErdosRenyi, 500, 500, 1);
  const Dataset ds = simulate_categorical(dag, 10000, 2, 5, 1);
  const auto t0 = Clock::now();
  GlideResult result;
  try {
    result = discover(ds, GlideConfig{});
  } catch (const Error& e) {
    return {Status::Fail, std::string("run failed: ") + e.what()};
  }
  const double elapsed = seconds_since(t0);
  annotate_with_truth(result.report, dag);
  const Json report = Json::parse(to_json(result.report, ds.names()).dump());
  bool well_formed = report["nodes"].size() == 500 && report["edges"].size() == result.graph.edge_count();
  for (const char* key : {"config", "basis", "environments", "nodes", "edges", "warnings"}) {
    well_formed = well_formed && report.contains(key);
  }
  const MetricReport m = compare(result.graph, dag);
  return {well_formed && elapsed < 7200.0 ? Status::Pass : Status::Fail,
          std::string(well_formed ? "well-formed" : "malformed") + " report, " +
              std::to_string(result.graph.edge_count()) + " edges, SHD " + std::to_string(m.shd) + ", " +
              fmt(elapsed) + " s (limit 7200 s)"};
}

struct Criterion {
  const char* name;
  Outcome (*run)();
};

constexpr Criterion kCriteria[] = {
    {"oracle-exactness", oracle_exactness},
    {"basis-correctness", basis_correctness},
    {"downsampling-law", downsampling_law},
    {"convex-hull-law", convex_hull_law},
    {"clique-equivalence", clique_equivalence},
    {"invariance-direction", invariance_direction},
    {"desk-benchmark", desk_benchmark},
    {"sachs", sachs},
    {"scalability", scalability},
};

}  // namespace
}  // namespace glide

int main(int argc, char** argv) {
  using namespace glide;
  std::set<std::string> only;
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--strict") {
      strict = true;
    } else if (arg == "--only" && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      for (std::string name; std::getline(list, name, ',');) only.insert(name);
    } else {
      std::cerr << "usage: glide_acceptance [--only name[,name...]] [--strict]\n";
      return 2;
    }
  }
  for (const auto& name : only) {
    const bool known = std::any_of(std::begin(kCriteria), std::end(kCriteria),
                                   [&](const Criterion& c) { return name == c.name; });
    if (!known) {
      std::cerr << "unknown criterion: " << name << "\n";
      return 2;
    }
  }

  int failed = 0;
  for (const Criterion& c : kCriteria) {
    if (!only.empty() && !only.count(c.name)) continue;
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {Status::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = out.status == Status::Pass ? "PASS" : out.status == Status::Fail ? "FAIL" : "SKIP";
    failed += out.status == Status::Fail ? 1 : 0;
    std::cout << tag << "  " << c.name << ": " << out.detail << std::endl;
  }
  return strict && failed > 0 ? 1 : 0;
}
