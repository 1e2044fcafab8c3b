#include "glide/invariance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "glide/error.hpp"
#include "glide/parallel.hpp"
#include "glide/rng.hpp"

namespace glide {

void GlideConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
  if (m < 2) fail("m must be >= 2");
  if (!(gamma_o > 0.0 && gamma_o < 1.0)) fail("gamma must lie in (0, 1)");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (!(ci_alpha > 0.0 && ci_alpha < 1.0)) fail("alpha must lie in (0, 1)");
  if (bins < 2) fail("bins must be >= 2");
  if (laplace_alpha < 0.0) fail("laplace must be >= 0");
  if (pool < static_cast<std::size_t>(m)) fail("pool must be >= m");
  if (cap_k < 0) fail("cap_k must be >= 0");
  if (max_candidates < 1) fail("max_candidates must be >= 1");
  if (refine_max_size < 0 || refine_max_size > 20) fail("refine_max_size must lie in [0, 20]");
}

InvarianceScore invariance_score(const EnvironmentSet& envs, NodeId x, const NodeSet& z,
                                 const GlideConfig& cfg, bool keep_tables) {
  if (envs.base == nullptr) throw Error(ErrorKind::InvalidArgument, "environment set has no dataset");
  if (std::find(z.begin(), z.end(), x) != z.end()) {
    throw Error(ErrorKind::InvalidArgument, "target variable inside candidate set");
  }
  const int m = envs.m();
  if (m < 2) throw Error(ErrorKind::InvalidArgument, "need at least two environments");
  const Dataset& ds = *envs.base;
  const int cx = ds.cardinality(x);
  const auto colx = ds.column(x);
  const ConfigIndex configs = factorize(DataView(ds), z);
  const std::size_t nc = configs.count;

  std::vector<std::vector<double>> counts(m, std::vector<double>(nc * cx, 0.0));
  std::vector<std::vector<double>> support(m, std::vector<double>(nc, 0.0));
  for (int i = 0; i < m; ++i) {
    for (RowIndex r : envs.environments[i].rows) {
      const auto c = configs.ids[r];
      counts[i][c * cx + colx[r]] += 1.0;
      support[i][c] += 1.0;
    }
  }

  InvarianceScore out;
  out.candidate = z;
  std::vector<std::size_t> aligned;
  std::size_t present = 0;
  for (std::size_t c = 0; c < nc; ++c) {
    bool everywhere = true, anywhere = false;
    for (int i = 0; i < m; ++i) {
      everywhere = everywhere && support[i][c] > 0.0;
      anywhere = anywhere || support[i][c] > 0.0;
    }
    present += anywhere;
    if (everywhere) aligned.push_back(c);
  }
  out.aligned_configs = aligned.size();
  out.coverage = present == 0 ? 0.0 : static_cast<double>(aligned.size()) / static_cast<double>(present);
  if (aligned.empty()) return out;

  std::vector<double> weight(aligned.size(), 0.0);
  double total = 0.0;
  for (std::size_t a = 0; a < aligned.size(); ++a) {
    for (int i = 0; i < m; ++i) weight[a] += support[i][aligned[a]];
    total += weight[a];
  }
  for (double& w : weight) w /= total;

  const double alpha = cfg.laplace_alpha;
  // tables[i][a * cx + k] = P_i(X = k | z_a)
  std::vector<std::vector<double>> tables(m, std::vector<double>(aligned.size() * cx));
  std::vector<double> mean(aligned.size() * cx, 0.0);
  for (int i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < aligned.size(); ++a) {
      const std::size_t c = aligned[a];
      const double denom = support[i][c] + alpha * cx;
      for (int k = 0; k < cx; ++k) {
        const double p = (counts[i][c * cx + k] + alpha) / denom;
        tables[i][a * cx + k] = p;
        mean[a * cx + k] += p / m;
      }
    }
  }
  double variance = 0.0;
  for (int i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < aligned.size(); ++a) {
      double cell = 0.0;
      for (int k = 0; k < cx; ++k) {
        const double diff = tables[i][a * cx + k] - mean[a * cx + k];
        cell += diff * diff;
      }
      variance += weight[a] * cell;
    }
  }
  out.variance = variance / m;

  if (keep_tables) {
    out.per_env_tables.assign(m, {});
    for (int i = 0; i < m; ++i) {
      for (std::size_t a = 0; a < aligned.size(); ++a) {
        out.per_env_tables[i].emplace_back(tables[i].begin() + static_cast<std::ptrdiff_t>(a * cx),
                                           tables[i].begin() + static_cast<std::ptrdiff_t>((a + 1) * cx));
      }
    }
  }
  return out;
}

namespace {

bool better(const InvarianceScore& a, const InvarianceScore& b) {
  if (a.variance != b.variance) return a.variance < b.variance;
  if (a.candidate.size() != b.candidate.size()) return a.candidate.size() < b.candidate.size();
  return a.candidate < b.candidate;
}

std::vector<NodeSet> proper_subsets(const NodeSet& set) {
  std::vector<NodeSet> out;
  const std::size_t n = set.size();
  for (std::uint64_t mask = 0; mask + 1 < (std::uint64_t{1} << n); ++mask) {
    NodeSet s;
    for (std::size_t b = 0; b < n; ++b) {
      if (mask >> b & 1U) s.push_back(set[b]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

ParentSelection select_parents(const EnvironmentSet& envs, NodeId x, const std::vector<NodeSet>& candidates,
                               const GlideConfig& cfg) {
  if (candidates.empty()) throw Error(ErrorKind::InvalidArgument, "no candidate parent sets");
  ParentSelection out;
  std::set<NodeSet> seen;
  auto score = [&](const NodeSet& z) {
    if (!seen.insert(z).second) return;
    out.scores.push_back(invariance_score(envs, x, z, cfg));
  };
  for (const auto& z : candidates) score(z);

  auto best_of = [&] {
    return std::min_element(out.scores.begin(), out.scores.end(), better);
  };
  const NodeSet clique = best_of()->candidate;
  if (static_cast<int>(clique.size()) <= cfg.refine_max_size) {
    for (const auto& s : proper_subsets(clique)) score(s);
  } else {
    // Backward elimination for cliques too large to enumerate.
    NodeSet current = clique;
    double current_var = best_of()->variance;
    bool improved = true;
    while (improved && !current.empty()) {
      improved = false;
      for (std::size_t k = 0; k < current.size(); ++k) {
        NodeSet smaller = current;
        smaller.erase(smaller.begin() + static_cast<std::ptrdiff_t>(k));
        score(smaller);
        const auto it = std::find_if(out.scores.begin(), out.scores.end(),
                                     [&](const InvarianceScore& s) { return s.candidate == smaller; });
        if (it->variance <= current_var) {
          current = smaller;
          current_var = it->variance;
          improved = true;
          break;
        }
      }
    }
  }

  std::sort(out.scores.begin(), out.scores.end(), better);
  const auto& winner = out.scores.front();
  if (winner.variance == kNoSupport) {
    out.no_support = true;
    out.below_confidence = true;
    return out;
  }
  out.parents = winner.candidate;
  out.variance = winner.variance;
  if (out.scores.size() > 1) out.runner_up = out.scores[1].variance;
  out.margin = out.runner_up - out.variance;
  out.below_confidence = !(out.variance < cfg.epsilon);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Edges of one directed cycle, or empty when acyclic.
std::vector<Edge> find_cycle(int d, const std::vector<Edge>& edges) {
  std::vector<std::vector<NodeId>> out(d);
  for (const auto& [p, c] : edges) out[p].push_back(c);
  std::vector<int> state(d, 0);  // 0 new, 1 on stack, 2 done
  std::vector<NodeId> parent(d, -1);
  for (NodeId start = 0; start < d; ++start) {
    if (state[start]) continue;
    std::vector<std::pair<NodeId, std::size_t>> stack{{start, 0}};
    state[start] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < out[v].size()) {
        const NodeId w = out[v][next++];
        if (state[w] == 1) {
          std::vector<Edge> cycle{{v, w}};
          for (NodeId u = v; u != w; u = parent[u]) cycle.emplace_back(parent[u], u);
          return cycle;
        }
        if (state[w] == 0) {
          state[w] = 1;
          parent[w] = v;
          stack.emplace_back(w, 0);
        }
      } else {
        state[v] = 2;
        stack.pop_back();
      }
    }
  }
  return {};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<Edge> repair_cycles(int d, std::vector<Edge>& edges, const std::vector<double>& margin) {
  std::vector<Edge> removed;
  for (auto cycle = find_cycle(d, edges); !cycle.empty(); cycle = find_cycle(d, edges)) {
    const auto weakest = std::min_element(cycle.begin(), cycle.end(), [&](const Edge& a, const Edge& b) {
      if (margin[a.second] != margin[b.second]) return margin[a.second] < margin[b.second];
      return a < b;
    });
    removed.push_back(*weakest);
    edges.erase(std::find(edges.begin(), edges.end(), *weakest));
  }
  return removed;
}

GlideResult discover(const Dataset& ds, const GlideConfig& cfg) {
  cfg.validate();
  const IndepSource src = IndepSource::data(ds, cfg.ci_alpha, cfg.min_support);
  return discover(ds, src, cfg);
}

GlideResult discover(const Dataset& ds, const IndepSource& src, const GlideConfig& cfg) {
  cfg.validate();
  const int d = ds.vars();
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "dataset has no variables");
  if (src.vars() != d) throw Error(ErrorKind::InvalidArgument, "independence source covers a different variable set");
  if (ds.rows() == 0) throw Error(ErrorKind::EmptyDataset, "dataset has no rows");

  GlideReport report;
  report.config = cfg;
  report.oracle = src.is_oracle();
  report.rows = ds.rows();
  report.nodes.resize(d);
  for (int v = 0; v < d; ++v) report.nodes[v].name = ds.names()[v];
  const auto t_total = std::chrono::steady_clock::now();

  auto t0 = std::chrono::steady_clock::now();
  const DependenceMatrix phi = dependence_matrix(src, d, cfg.threads);
  const Basis basis = find_basis(phi);
  report.basis = basis.members;
  for (NodeId b : basis.members) report.nodes[b].in_basis = true;
  report.timings["basis"] = seconds_since(t0);

  if (d == 1) {
    report.timings["total"] = seconds_since(t_total);
    report.indep = src.stats();
    return GlideResult{Dag(ds.names(), {}), std::move(report)};
  }

  t0 = std::chrono::steady_clock::now();
  EnvironmentOptions env_options;
  env_options.m = cfg.m;
  env_options.gamma_o = cfg.gamma_o;
  env_options.pool = cfg.pool;
  env_options.min_rows = cfg.min_rows;
  env_options.budget = cfg.budget;
  env_options.threads = cfg.threads;
  const EnvironmentSet envs = make_environments(ds, basis, env_options, derive_seed(cfg.seed, "environments"));
  report.variable_gamma = envs.variable_gamma;
  for (const auto& env : envs.environments) {
    report.environments.push_back(EnvironmentSummary{
        env.rows.size(), env.priors, env.step_gamma,
        static_cast<double>(env.rows.size()) / static_cast<double>(ds.rows())});
  }
  report.warnings.insert(report.warnings.end(), envs.warnings.begin(), envs.warnings.end());
  report.timings["environments"] = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  BlanketMap blankets = all_markov_blankets(src, d, cfg.threads);
  SpouseOptions spouse_options;
  spouse_options.cap_k = cfg.cap_k;
  remove_all_spouses(src, blankets, spouse_options, cfg.threads);
  report.warnings.insert(report.warnings.end(), blankets.warnings.begin(), blankets.warnings.end());
  report.timings["blankets"] = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  PlausibleOptions plausible_options;
  plausible_options.max_candidates = cfg.max_candidates;
  plausible_options.threads = cfg.threads;
  const PlausibleSets plausible = plausible_parent_sets(blankets, d, plausible_options);
  report.warnings.insert(report.warnings.end(), plausible.warnings.begin(), plausible.warnings.end());
  report.timings["candidates"] = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  std::vector<ParentSelection> selections(d);
  parallel_for(static_cast<std::size_t>(d), cfg.threads, [&](std::size_t xi) {
    if (report.nodes[xi].in_basis) return;
    selections[xi] = select_parents(envs, static_cast<NodeId>(xi), plausible.candidates[xi], cfg);
  });
  report.timings["selection"] = seconds_since(t0);

  std::vector<Edge> edges;
  std::vector<double> margin(d, kNoSupport);
  for (NodeId x = 0; x < d; ++x) {
    NodeReport& node = report.nodes[x];
    node.blanket = blankets.blanket[x];
    node.core = blankets.core[x];
    node.spouses = blankets.spouses[x];
    node.candidates = plausible.candidates[x];
    node.degeneracy = plausible.degeneracy[x];
    if (node.in_basis) continue;
    const ParentSelection& sel = selections[x];
    node.parents = sel.parents;
    node.variance = sel.variance;
    node.runner_up = sel.runner_up;
    node.margin = sel.margin;
    node.below_confidence = sel.below_confidence;
    node.no_support = sel.no_support;
    margin[x] = sel.margin;
    for (NodeId p : sel.parents) edges.emplace_back(p, x);
  }
  report.removed_edges = repair_cycles(d, edges, margin);
  report.repairs = report.removed_edges.size();
  for (const auto& [p, c] : report.removed_edges) {
    auto& parents = report.nodes[c].parents;
    parents.erase(std::find(parents.begin(), parents.end(), p));
    report.warnings.push_back("cycle repair removed " + ds.names()[p] + " -> " + ds.names()[c]);
  }
  std::sort(edges.begin(), edges.end());
  report.edges = edges;
  report.indep = src.stats();
  report.timings["total"] = seconds_since(t_total);
  return GlideResult{Dag(ds.names(), std::move(edges)), std::move(report)};
}

bool invariance_assumptions_hold(const Dag& truth, NodeId x, const NodeSet& basis) {
  const NodeSet& pa = truth.parents(x);
  const NodeSet sp = truth.spouses(x);
  NodeSet src = basis;
  std::sort(src.begin(), src.end());
  NodeSet common;
  std::set_intersection(pa.begin(), pa.end(), sp.begin(), sp.end(), std::back_inserter(common));
  if (!common.empty()) return false;
  std::set_intersection(sp.begin(), sp.end(), src.begin(), src.end(), std::back_inserter(common));
  return common.empty();
}

bool invariance_assumptions_hold(const Dag& truth, NodeId x) {
  return invariance_assumptions_hold(truth, x, sources(truth));
}

void annotate_with_truth(GlideReport& report, const Dag& truth) {
  if (static_cast<int>(report.nodes.size()) != truth.size()) {
    throw Error(ErrorKind::NodeSetMismatch, "report and graph differ in size");
  }
  for (NodeId x = 0; x < truth.size(); ++x) report.nodes[x].assumptions_hold = invariance_assumptions_hold(truth, x, report.basis);
}

}  // namespace glide
