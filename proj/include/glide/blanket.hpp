#pragma once

#include <string>
#include <vector>

#include "glide/indep.hpp"

namespace glide {

struct BlanketMap {
  std::vector<NodeSet> blanket;  // M(X), symmetric after all_markov_blankets
  std::vector<NodeSet> core;     // M*(X) = M(X) minus detected spouses
  std::vector<NodeSet> spouses;  // detected spouses per variable
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(blanket.size()); }
  bool in_blanket(NodeId of, NodeId member) const;
};

/// Grow-shrink Markov blanket of x. Both phases scan candidates in ascending
/// index order.
NodeSet grow_shrink_mb(const IndepSource& src, NodeId x, int d);

/// Blankets of every variable, then AND-symmetrized: y stays in M(x) only if
/// x is in M(y). Core and spouse fields are left empty.
BlanketMap all_markov_blankets(const IndepSource& src, int d, unsigned threads = 1);

struct SpouseOptions {
  int cap_k = 4;              // largest separating-set size tried
  std::size_t max_blanket = 25;
  int fallback_cap_k = 2;     // used for blankets above max_blanket
};

/// Drops y from the blanket when some S ⊆ blanket \ {y} with |S| <= cap
/// separates x and y; subsets are tried in increasing size.
NodeSet remove_spouses(const IndepSource& src, NodeId x, const NodeSet& blanket,
                       const SpouseOptions& options = {}, std::string* warning = nullptr);

/// Fills core and spouses for every variable of `map`.
void remove_all_spouses(const IndepSource& src, BlanketMap& map, const SpouseOptions& options = {},
                        unsigned threads = 1);

}  // namespace glide
