#include "glide/parents.hpp"

#include <algorithm>
#include <functional>

#include "glide/error.hpp"
#include "glide/parallel.hpp"

namespace glide {

BiGraph build_bigraph(NodeId x, const NodeSet& core, const BlanketMap& blankets) {
  (void)x;
  BiGraph g(core);
  for (int u = 0; u < g.size(); ++u) {
    for (int v = u + 1; v < g.size(); ++v) {
      if (blankets.in_blanket(core[u], core[v]) && blankets.in_blanket(core[v], core[u])) g.add_edge(u, v);
    }
  }
  return g;
}

namespace {

bool is_subset(const std::vector<int>& small, const std::vector<int>& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

std::vector<NodeSet> to_variables(const BiGraph& g, const std::vector<std::vector<int>>& local) {
  std::vector<NodeSet> out;
  out.reserve(local.size());
  for (const auto& set : local) {
    NodeSet vars;
    for (int v : set) vars.push_back(g.node_ids()[v]);
    std::sort(vars.begin(), vars.end());
    out.push_back(std::move(vars));
  }
  return out;
}

class SearchTree {
 public:
  SearchTree(const BiGraph& g, std::size_t max_leaves) : g_(g), max_leaves_(max_leaves) {}

  std::vector<std::vector<int>> run() {
    std::vector<int> all(g_.size());
    for (int v = 0; v < g_.size(); ++v) all[v] = v;
    expand({}, all);
    return std::move(leaves_);
  }

 private:
  void expand(const std::vector<int>& path, const std::vector<int>& search) {
    std::vector<int> reach;
    std::set_union(path.begin(), path.end(), search.begin(), search.end(), std::back_inserter(reach));
    for (const auto& leaf : leaves_) {
      if (is_subset(reach, leaf)) return;
    }
    if (search.empty()) {
      leaves_.push_back(path);
      if (leaves_.size() > max_leaves_) {
        throw Error(ErrorKind::CandidateExplosion,
                    "more than " + std::to_string(max_leaves_) + " plausible parent sets; graph degeneracy " +
                        std::to_string(degeneracy(g_).p));
      }
      return;
    }
    // Visit order: increasing in-search degree, then index.
    std::vector<std::pair<int, int>> order;
    order.reserve(search.size());
    for (int v : search) {
      int deg = 0;
      for (int w : search) deg += g_.adjacent(v, w);
      order.emplace_back(deg, v);
    }
    std::sort(order.begin(), order.end());
    std::vector<int> visited;
    for (const auto& [deg, v] : order) {
      std::vector<int> next;
      for (int w : search) {
        if (g_.adjacent(v, w) && !std::binary_search(visited.begin(), visited.end(), w)) next.push_back(w);
      }
      std::vector<int> child_path = path;
      child_path.insert(std::upper_bound(child_path.begin(), child_path.end(), v), v);
      expand(child_path, next);
      visited.insert(std::upper_bound(visited.begin(), visited.end(), v), v);
    }
  }

  const BiGraph& g_;
  std::size_t max_leaves_;
  std::vector<std::vector<int>> leaves_;
};

}  // namespace

std::vector<NodeSet> tree_maximal_cliques(const BiGraph& g, std::size_t max_leaves) {
  auto leaves = SearchTree(g, max_leaves).run();
  std::vector<std::vector<int>> maximal;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < leaves.size() && !dominated; ++j) {
      if (i == j) continue;
      const bool strict = leaves[j].size() > leaves[i].size() && is_subset(leaves[i], leaves[j]);
      const bool duplicate_later = j < i && leaves[j] == leaves[i];
      dominated = strict || duplicate_later;
    }
    if (!dominated) maximal.push_back(leaves[i]);
  }
  auto out = to_variables(g, maximal);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeSet> bron_kerbosch_reference(const BiGraph& g) {
  std::vector<std::vector<int>> cliques;
  std::function<void(std::vector<int>&, std::vector<int>, std::vector<int>)> recurse =
      [&](std::vector<int>& r, std::vector<int> p, std::vector<int> x) {
        if (p.empty() && x.empty()) {
          auto c = r;
          std::sort(c.begin(), c.end());
          cliques.push_back(std::move(c));
          return;
        }
        // Pivot maximizing |P ∩ N(u)| over P ∪ X.
        int pivot = -1, best = -1;
        for (const auto* set : {&p, &x}) {
          for (int u : *set) {
            int count = 0;
            for (int v : p) count += g.adjacent(u, v);
            if (count > best) {
              best = count;
              pivot = u;
            }
          }
        }
        std::vector<int> branch;
        for (int v : p) {
          if (!g.adjacent(pivot, v)) branch.push_back(v);
        }
        for (int v : branch) {
          std::vector<int> np, nx;
          for (int w : p) {
            if (g.adjacent(v, w)) np.push_back(w);
          }
          for (int w : x) {
            if (g.adjacent(v, w)) nx.push_back(w);
          }
          r.push_back(v);
          recurse(r, std::move(np), std::move(nx));
          r.pop_back();
          p.erase(std::find(p.begin(), p.end(), v));
          x.push_back(v);
        }
      };
  std::vector<int> r, p(g.size()), x;
  for (int v = 0; v < g.size(); ++v) p[v] = v;
  recurse(r, p, x);
  auto out = to_variables(g, cliques);
  std::sort(out.begin(), out.end());
  return out;
}

void sort_candidates(std::vector<NodeSet>& sets) {
  std::sort(sets.begin(), sets.end(), [](const NodeSet& a, const NodeSet& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
}

PlausibleSets plausible_parent_sets(const BlanketMap& blankets, int d, const PlausibleOptions& options) {
  if (blankets.size() != d || static_cast<int>(blankets.core.size()) != d) {
    throw Error(ErrorKind::InvalidArgument, "blanket map does not cover every variable");
  }
  PlausibleSets out;
  out.candidates.resize(d);
  out.degeneracy.resize(d);
  std::vector<std::string> warnings(d);
  parallel_for(static_cast<std::size_t>(d), options.threads, [&](std::size_t xi) {
    const NodeId x = static_cast<NodeId>(xi);
    const BiGraph g = build_bigraph(x, blankets.core[x], blankets);
    out.degeneracy[x] = degeneracy(g).p;
    std::vector<NodeSet> sets = tree_maximal_cliques(g, options.max_candidates);
    if (options.verify) {
      auto reference = bron_kerbosch_reference(g);
      if (reference != sets) {
        warnings[x] = "tree enumeration diverged from Bron-Kerbosch for variable " + std::to_string(x) +
                      "; using the reference cliques";
        sets = std::move(reference);
      }
    }
    if (std::find(sets.begin(), sets.end(), NodeSet{}) == sets.end()) sets.emplace_back();
    sort_candidates(sets);
    out.candidates[x] = std::move(sets);
  });
  for (auto& w : warnings) {
    if (!w.empty()) out.warnings.push_back(std::move(w));
  }
  return out;
}

}  // namespace glide
