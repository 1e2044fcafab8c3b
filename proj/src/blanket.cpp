#include "glide/blanket.hpp"

#include <algorithm>
#include <functional>

#include "glide/error.hpp"
#include "glide/parallel.hpp"

namespace glide {

bool BlanketMap::in_blanket(NodeId of, NodeId member) const {
  const auto& b = blanket.at(of);
  return std::binary_search(b.begin(), b.end(), member);
}

NodeSet grow_shrink_mb(const IndepSource& src, NodeId x, int d) {
  if (x < 0 || x >= d) throw Error(ErrorKind::NodeOutOfRange, "blanket target");
  NodeSet current;
  std::vector<char> member(d, 0);

  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId y = 0; y < d; ++y) {
      if (y == x || member[y]) continue;
      if (!src.cond_independent(x, y, current)) {
        current.insert(std::upper_bound(current.begin(), current.end(), y), y);
        member[y] = 1;
        changed = true;
      }
    }
  }

  changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < current.size();) {
      NodeSet rest = current;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
      if (src.cond_independent(x, current[k], rest)) {
        current = std::move(rest);
        changed = true;
      } else {
        ++k;
      }
    }
  }
  return current;
}

BlanketMap all_markov_blankets(const IndepSource& src, int d, unsigned threads) {
  std::vector<NodeSet> raw(d);
  parallel_for(static_cast<std::size_t>(d), threads,
               [&](std::size_t x) { raw[x] = grow_shrink_mb(src, static_cast<NodeId>(x), d); });
  BlanketMap out;
  out.blanket.resize(d);
  out.core.resize(d);
  out.spouses.resize(d);
  for (NodeId x = 0; x < d; ++x) {
    for (NodeId y : raw[x]) {
      if (std::binary_search(raw[y].begin(), raw[y].end(), x)) out.blanket[x].push_back(y);
    }
  }
  return out;
}

namespace {

// Calls visit(subset) for every size-`size` subset of pool in lexicographic
// order; stops early when visit returns true.
bool any_subset(const NodeSet& pool, int size, const std::function<bool(const NodeSet&)>& visit) {
  const int n = static_cast<int>(pool.size());
  if (size > n) return false;
  std::vector<int> idx(size);
  for (int i = 0; i < size; ++i) idx[i] = i;
  NodeSet subset(size);
  while (true) {
    for (int i = 0; i < size; ++i) subset[i] = pool[idx[i]];
    if (visit(subset)) return true;
    int i = size - 1;
    while (i >= 0 && idx[i] == n - size + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

NodeSet remove_spouses(const IndepSource& src, NodeId x, const NodeSet& blanket,
                       const SpouseOptions& options, std::string* warning) {
  int cap = options.cap_k;
  if (blanket.size() > options.max_blanket) {
    cap = std::min(cap, options.fallback_cap_k);
    if (warning) {
      *warning = "BlanketTooLarge: blanket of variable " + std::to_string(x) + " has " +
                 std::to_string(blanket.size()) + " members; separating sets capped at " + std::to_string(cap);
    }
  }
  NodeSet core;
  for (NodeId y : blanket) {
    NodeSet others;
    for (NodeId v : blanket) {
      if (v != y) others.push_back(v);
    }
    bool separable = false;
    for (int size = 0; size <= std::min<int>(cap, static_cast<int>(others.size())) && !separable; ++size) {
      separable = any_subset(others, size, [&](const NodeSet& s) { return src.cond_independent(x, y, s); });
    }
    if (!separable) core.push_back(y);
  }
  return core;
}

void remove_all_spouses(const IndepSource& src, BlanketMap& map, const SpouseOptions& options,
                        unsigned threads) {
  const int d = map.size();
  map.core.assign(d, {});
  map.spouses.assign(d, {});
  std::vector<std::string> warnings(d);
  parallel_for(static_cast<std::size_t>(d), threads, [&](std::size_t x) {
    map.core[x] = remove_spouses(src, static_cast<NodeId>(x), map.blanket[x], options, &warnings[x]);
    std::set_difference(map.blanket[x].begin(), map.blanket[x].end(), map.core[x].begin(), map.core[x].end(),
                        std::back_inserter(map.spouses[x]));
  });
  for (auto& w : warnings) {
    if (!w.empty()) map.warnings.push_back(std::move(w));
  }
}

}  // namespace glide
