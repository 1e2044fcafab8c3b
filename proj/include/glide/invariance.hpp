#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glide/augment.hpp"
#include "glide/basis.hpp"
#include "glide/blanket.hpp"
#include "glide/dataset.hpp"
#include "glide/indep.hpp"
#include "glide/parents.hpp"

namespace glide {

struct GlideConfig {
  int m = 30;
  double gamma_o = 0.5;
  double epsilon = 1e-3;
  double ci_alpha = 0.05;
  int bins = 4;
  double laplace_alpha = 1.0;
  std::size_t pool = 10000;
  std::uint64_t seed = 0;
  std::size_t min_rows = 100;
  int cap_k = 4;
  std::size_t max_candidates = 10000;
  PriorBudget budget = PriorBudget::Joint;
  std::size_t min_support = 5;   // CI-test stratum support
  int refine_max_size = 12;      // exhaustive subset refinement up to this clique size
  unsigned threads = 1;

  /// Throws InvalidArgument when a field is outside its documented range.
  void validate() const;
};

constexpr double kNoSupport = std::numeric_limits<double>::infinity();

struct InvarianceScore {
  NodeSet candidate;
  /// (1/m) sum_i ||P_i(X|Z) - mean||^2 with cells weighted by pooled
  /// configuration frequency; kNoSupport when no configuration is shared by
  /// every environment.
  double variance = kNoSupport;
  double coverage = 0.0;
  std::size_t aligned_configs = 0;
  /// Per environment, per aligned configuration, the smoothed P_i(X | z).
  std::vector<std::vector<std::vector<double>>> per_env_tables;
};

InvarianceScore invariance_score(const EnvironmentSet& envs, NodeId x, const NodeSet& z,
                                 const GlideConfig& cfg, bool keep_tables = false);

struct ParentSelection {
  NodeSet parents;
  double variance = kNoSupport;
  double runner_up = kNoSupport;
  /// runner_up - variance; infinite when only one candidate was scorable.
  double margin = kNoSupport;
  bool below_confidence = false;  // best variance not under epsilon
  bool no_support = false;        // nothing was scorable
  std::vector<InvarianceScore> scores;
};

/// Scores every candidate, then every subset of the best-scoring one, and
/// returns the minimum-variance set (ties: smaller, then lexicographic).
ParentSelection select_parents(const EnvironmentSet& envs, NodeId x, const std::vector<NodeSet>& candidates,
                               const GlideConfig& cfg);

struct NodeReport {
  std::string name;
  bool in_basis = false;
  NodeSet blanket;
  NodeSet core;
  NodeSet spouses;
  std::vector<NodeSet> candidates;
  int degeneracy = 0;
  NodeSet parents;
  double variance = 0.0;
  double runner_up = kNoSupport;
  double margin = kNoSupport;
  bool below_confidence = false;
  bool no_support = false;
  /// Set by annotate_with_truth: whether the node meets Pa ∩ Sp = Sp ∩ B = ∅.
  std::optional<bool> assumptions_hold;
};

struct EnvironmentSummary {
  std::size_t rows = 0;
  std::vector<Prior> priors;
  std::vector<double> step_gamma;
  double achieved_gamma = 0.0;  // rows / |D|
};

struct GlideReport {
  GlideConfig config;
  bool oracle = false;
  std::size_t rows = 0;
  NodeSet basis;
  double variable_gamma = 1.0;
  std::vector<EnvironmentSummary> environments;
  std::vector<NodeReport> nodes;
  std::vector<Edge> edges;
  std::vector<Edge> removed_edges;  // cycle repairs
  std::size_t repairs = 0;
  IndepStats indep;
  std::map<std::string, double> timings;  // seconds per phase
  std::vector<std::string> warnings;
};

struct GlideResult {
  Dag graph;
  GlideReport report;
};

/// Full pipeline with the statistical independence backend.
GlideResult discover(const Dataset& ds, const GlideConfig& cfg);
/// Full pipeline with a caller-supplied independence source (e.g. the
/// d-separation oracle of the generating graph).
GlideResult discover(const Dataset& ds, const IndepSource& src, const GlideConfig& cfg);

/// Pa[x] ∩ Sp[x] = ∅ and Sp[x] ∩ basis = ∅ in the true graph.
bool invariance_assumptions_hold(const Dag& truth, NodeId x, const NodeSet& basis);
/// Same, with the true sources standing in for the basis.
bool invariance_assumptions_hold(const Dag& truth, NodeId x);

/// Fills NodeReport::assumptions_hold from the true graph and the report's basis.
void annotate_with_truth(GlideReport& report, const Dag& truth);

/// Removes, per directed cycle, the edge into the child with the smallest
/// selection margin until the edge set is acyclic. Returns removed edges.
std::vector<Edge> repair_cycles(int d, std::vector<Edge>& edges, const std::vector<double>& margin);

}  // namespace glide
