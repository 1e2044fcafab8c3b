#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "glide/dataset.hpp"
#include "glide/graph.hpp"

namespace glide::testing {

inline Dag named(std::vector<std::string> names, std::vector<std::pair<std::string, std::string>> edges) {
  return dag_from_edges(names, edges);
}

// A=0, B=1, C=2
inline Dag chain3() { return Dag::from_indices(3, {{0, 1}, {1, 2}}); }
inline Dag collider3() { return Dag::from_indices(3, {{0, 2}, {1, 2}}); }
inline Dag fork3() { return Dag::from_indices(3, {{1, 0}, {1, 2}}); }

/// Binary two-node model A -> X with a strong, fixed conditional.
inline CategoricalModel chain_model() {
  CategoricalModel model;
  model.dag = Dag::from_indices(2, {{0, 1}});
  model.cardinalities = {2, 2};
  model.cpts = {{{0.6, 0.4}}, {{0.85, 0.15}, {0.2, 0.8}}};
  return model;
}

/// A -> X <- B, all binary, X clearly depends on both parents.
inline CategoricalModel collider_model() {
  CategoricalModel model;
  model.dag = Dag::from_indices(3, {{0, 2}, {1, 2}});
  model.cardinalities = {2, 2, 2};
  model.cpts = {{{0.5, 0.5}},
                {{0.4, 0.6}},
                {{0.9, 0.1}, {0.55, 0.45}, {0.35, 0.65}, {0.05, 0.95}}};
  return model;
}

/// Random categorical model whose every edge is strong: changing a single
/// parent's value moves the child's distribution by at least `min_tv` in total
/// variation. Rows are redrawn (Dirichlet(1)) until the condition holds or the
/// attempt budget runs out.
inline CategoricalModel faithful_model(const Dag& dag, int min_cats, int max_cats, std::uint64_t seed,
                                       double min_tv = 0.3) {
  CategoricalModel model = random_categorical_model(dag, min_cats, max_cats, seed);
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  std::gamma_distribution<double> unit_gamma(1.0, 1.0);
  auto separated = [&](NodeId v) {
    const auto& pa = dag.parents(v);
    const auto& rows = model.cpts[v];
    for (std::size_t c = 0; c < rows.size(); ++c) {
      std::size_t stride = 1;
      for (int k = static_cast<int>(pa.size()) - 1; k >= 0; --k) {
        const int card = model.cardinalities[pa[k]];
        const int digit = static_cast<int>((c / stride) % card);
        for (int alt = digit + 1; alt < card; ++alt) {
          const auto& other = rows[c + (alt - digit) * stride];
          double tv = 0.0;
          for (std::size_t b = 0; b < other.size(); ++b) tv += std::abs(rows[c][b] - other[b]) / 2;
          if (tv < min_tv) return false;
        }
        stride *= card;
      }
    }
    return true;
  };
  for (NodeId v = 0; v < dag.size(); ++v) {
    for (int attempt = 0; attempt < 5000 && !separated(v); ++attempt) {
      for (auto& row : model.cpts[v]) {
        double total = 0.0;
        for (double& q : row) total += (q = unit_gamma(rng));
        for (double& q : row) q /= total;
      }
    }
  }
  return model;
}

inline NodeSet sorted(NodeSet s) {
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace glide::testing
