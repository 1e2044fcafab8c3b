#pragma once

#include <string>
#include <vector>

#include "glide/blanket.hpp"
#include "glide/graph.hpp"

namespace glide {

/// G'(x): vertices are the core of x, edges join mutual blanket members.
BiGraph build_bigraph(NodeId x, const NodeSet& core, const BlanketMap& blankets);

/// Maximal cliques of g (as sorted variable-id sets) via the virtual-root
/// search tree: each tree node branches on its search set in increasing order
/// of in-search degree, leaves record their root path, and a branch whose
/// path ∪ search is covered by an earlier leaf is not expanded. Leaves that
/// are strictly contained in another leaf are dropped at the end. Throws
/// CandidateExplosion once more than max_leaves leaves are recorded.
std::vector<NodeSet> tree_maximal_cliques(const BiGraph& g, std::size_t max_leaves = 10000);

/// Classical Bron-Kerbosch with Tomita pivoting; all maximal cliques as sorted
/// variable-id sets, in lexicographic order.
std::vector<NodeSet> bron_kerbosch_reference(const BiGraph& g);

struct PlausibleSets {
  /// Per variable: maximal cliques of G'(x) plus the empty set, sorted by
  /// size descending then lexicographically.
  std::vector<std::vector<NodeSet>> candidates;
  std::vector<int> degeneracy;  // of G'(x)
  std::vector<std::string> warnings;
};

struct PlausibleOptions {
  std::size_t max_candidates = 10000;
  /// Cross-check every tree enumeration against Bron-Kerbosch; on mismatch
  /// the reference result is used and a warning recorded.
  bool verify = true;
  unsigned threads = 1;
};

PlausibleSets plausible_parent_sets(const BlanketMap& blankets, int d, const PlausibleOptions& options = {});

/// Size descending, then lexicographic.
void sort_candidates(std::vector<NodeSet>& sets);

}  // namespace glide
