#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "glide/blanket.hpp"
#include "glide/error.hpp"
#include "glide/parents.hpp"

namespace glide {
namespace {

using SetOfSets = std::set<NodeSet>;

SetOfSets as_set(const std::vector<NodeSet>& v) { return SetOfSets(v.begin(), v.end()); }

Dag random_dag(std::mt19937_64& rng, int max_d, std::size_t max_e) {
  const int d = 2 + static_cast<int>(rng() % (max_d - 1));
  const std::size_t cap = std::min<std::size_t>(max_e, static_cast<std::size_t>(d * (d - 1) / 2));
  return gen_random_dag(GraphKind::ErdosRenyi, d, rng() % (cap + 1), rng());
}

BiGraph random_bigraph(std::mt19937_64& rng, int n, double density) {
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  BiGraph g(ids);
  std::bernoulli_distribution coin(density);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (coin(rng)) g.add_edge(u, v);
    }
  }
  return g;
}

SetOfSets brute_maximal_cliques(const BiGraph& g) {
  const int n = g.size();
  std::vector<unsigned> cliques;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    bool clique = true;
    for (int u = 0; u < n && clique; ++u) {
      for (int v = u + 1; v < n && clique; ++v) {
        if ((mask >> u & 1u) && (mask >> v & 1u) && !g.adjacent(u, v)) clique = false;
      }
    }
    if (clique) cliques.push_back(mask);
  }
  SetOfSets out;
  for (unsigned c : cliques) {
    const bool maximal = std::none_of(cliques.begin(), cliques.end(), [&](unsigned o) { return o != c && (o & c) == c; });
    if (!maximal) continue;
    NodeSet s;
    for (int u = 0; u < n; ++u) {
      if (c >> u & 1u) s.push_back(g.node_ids()[u]);
    }
    out.insert(s);
  }
  return out;
}

/// Blanket map in which x = n has core {0..n-1} and G'(x) equals `h`.
BlanketMap map_for(const BiGraph& h) {
  const int n = h.size();
  BlanketMap m;
  m.blanket.resize(n + 1);
  m.core.resize(n + 1);
  m.spouses.resize(n + 1);
  for (int u = 0; u < n; ++u) {
    for (int v : h.neighbors(u)) m.blanket[u].push_back(v);
    m.blanket[u].push_back(n);
    std::sort(m.blanket[u].begin(), m.blanket[u].end());
    m.blanket[n].push_back(u);
  }
  for (int v = 0; v <= n; ++v) m.core[v] = m.blanket[v];
  return m;
}

TEST(BlanketTest, OracleFixtures) {
  const Dag chain = testing::chain3(), collider = testing::collider3();
  EXPECT_EQ(grow_shrink_mb(IndepSource::oracle(chain), 1, 3), (NodeSet{0, 2}));
  EXPECT_EQ(grow_shrink_mb(IndepSource::oracle(collider), 0, 3), (NodeSet{1, 2}));
  const Dag three = Dag::empty(3);
  const BlanketMap empty = all_markov_blankets(IndepSource::oracle(three), 3);
  for (const auto& b : empty.blanket) EXPECT_TRUE(b.empty());
}

TEST(BlanketTest, OracleMatchesTrueBlanketsOnRandomGraphs) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Dag g = random_dag(rng, 10, 14);
    const auto src = IndepSource::oracle(g);
    const BlanketMap map = all_markov_blankets(src, g.size(), 2);
    for (int x = 0; x < g.size(); ++x) ASSERT_EQ(map.blanket[x], true_markov_blanket(g, x)) << "trial " << trial;
  }
}

TEST(BlanketTest, SymmetrizedOnData) {
  const Dag g = gen_random_dag(GraphKind::ErdosRenyi, 10, 12, 2);
  const Dataset ds = simulate_categorical(g, 3000, 2, 4, 2);
  const BlanketMap map = all_markov_blankets(IndepSource::data(ds, 0.05), 10);
  for (int x = 0; x < 10; ++x) {
    for (NodeId y : map.blanket[x]) EXPECT_TRUE(map.in_blanket(y, x));
  }
}

TEST(BlanketTest, ThreadCountDoesNotMatter) {
  const Dag g = gen_random_dag(GraphKind::ErdosRenyi, 12, 15, 5);
  const Dataset ds = simulate_categorical(g, 3000, 2, 4, 5);
  BlanketMap a = all_markov_blankets(IndepSource::data(ds, 0.05), 12, 1);
  BlanketMap b = all_markov_blankets(IndepSource::data(ds, 0.05), 12, 4);
  remove_all_spouses(IndepSource::data(ds, 0.05), a, {}, 1);
  remove_all_spouses(IndepSource::data(ds, 0.05), b, {}, 4);
  EXPECT_EQ(a.blanket, b.blanket);
  EXPECT_EQ(a.core, b.core);
}

TEST(SpouseTest, Fixtures) {
  const Dag collider = testing::collider3(), chain = testing::chain3();
  EXPECT_EQ(remove_spouses(IndepSource::oracle(collider), 0, {1, 2}), NodeSet{2});
  EXPECT_EQ(remove_spouses(IndepSource::oracle(chain), 1, {0, 2}), (NodeSet{0, 2}));
  // A->X, B->X, A->B at X: both are parents and neither can be separated.
  const Dag tri = Dag::from_indices(3, {{0, 2}, {1, 2}, {0, 1}});
  EXPECT_EQ(remove_spouses(IndepSource::oracle(tri), 2, {0, 1}), (NodeSet{0, 1}));
}

TEST(SpouseTest, OracleKeepsParentsAndChildren) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Dag g = random_dag(rng, 10, 16);
    const auto src = IndepSource::oracle(g);
    BlanketMap map = all_markov_blankets(src, g.size());
    remove_all_spouses(src, map);
    for (int x = 0; x < g.size(); ++x) {
      for (NodeId p : g.parents(x)) EXPECT_TRUE(std::binary_search(map.core[x].begin(), map.core[x].end(), p));
      for (NodeId c : g.children(x)) EXPECT_TRUE(std::binary_search(map.core[x].begin(), map.core[x].end(), c));
      EXPECT_TRUE(std::includes(map.blanket[x].begin(), map.blanket[x].end(), map.core[x].begin(), map.core[x].end()));
    }
  }
}

TEST(BigraphTest, MutualMembershipMakesAnEdge) {
  BlanketMap m;
  m.blanket = {{1, 2, 3}, {0, 3}, {3}, {0, 1, 2}};
  m.core = m.blanket;
  m.spouses.resize(4);
  const BiGraph g = build_bigraph(3, {0, 1, 2}, m);
  EXPECT_TRUE(g.adjacent(0, 1));
  EXPECT_FALSE(g.adjacent(0, 2));  // 0 is not in the blanket of 2
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(build_bigraph(3, {}, m).size(), 0);
}

TEST(CliqueTest, Examples) {
  auto make = [](int n, std::vector<std::pair<int, int>> edges) {
    std::vector<NodeId> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    BiGraph g(ids);
    for (auto [u, v] : edges) g.add_edge(u, v);
    return g;
  };
  EXPECT_EQ(tree_maximal_cliques(make(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}})),
            (std::vector<NodeSet>{{0, 1, 2, 3}}));
  EXPECT_EQ(as_set(tree_maximal_cliques(make(4, {{0, 1}, {0, 2}, {1, 2}, {2, 3}}))),
            (SetOfSets{{0, 1, 2}, {2, 3}}));
  EXPECT_EQ(as_set(tree_maximal_cliques(make(3, {}))), (SetOfSets{{0}, {1}, {2}}));
}

TEST(CliqueTest, TreeAndReferenceMatchBruteForce) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const double density = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    const BiGraph g = random_bigraph(rng, n, density);
    const SetOfSets truth = brute_maximal_cliques(g);
    ASSERT_EQ(as_set(tree_maximal_cliques(g)), truth) << "trial " << trial;
    ASSERT_EQ(as_set(bron_kerbosch_reference(g)), truth) << "trial " << trial;
  }
}

TEST(CliqueTest, LeafCapThrows) {
  // The complement of a perfect matching on 2k vertices has 2^k maximal cliques.
  const int n = 16;
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  BiGraph g(ids);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (!(v == u + 1 && u % 2 == 0)) g.add_edge(u, v);
    }
  }
  EXPECT_EQ(tree_maximal_cliques(g).size(), 256u);
  try {
    tree_maximal_cliques(g, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CandidateExplosion);
  }
}

TEST(PlausibleTest, Examples) {
  auto candidates_of = [](int n, std::vector<std::pair<int, int>> edges) {
    std::vector<NodeId> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    BiGraph h(ids);
    for (auto [u, v] : edges) h.add_edge(u, v);
    return plausible_parent_sets(map_for(h), n + 1).candidates[n];
  };
  EXPECT_EQ(candidates_of(3, {{0, 1}, {0, 2}, {1, 2}}), (std::vector<NodeSet>{{0, 1, 2}, {}}));
  EXPECT_EQ(candidates_of(3, {{0, 1}, {1, 2}}), (std::vector<NodeSet>{{0, 1}, {1, 2}, {}}));
  EXPECT_EQ(candidates_of(3, {}), (std::vector<NodeSet>{{0}, {1}, {2}, {}}));
}

TEST(PlausibleTest, CandidatesAreCliquesOfTheCore) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const BiGraph h = random_bigraph(rng, 1 + static_cast<int>(rng() % 10), 0.5);
    const BlanketMap m = map_for(h);
    PlausibleOptions opts;
    opts.verify = false;
    const auto sets = plausible_parent_sets(m, h.size() + 1, opts);
    const auto& cands = sets.candidates[h.size()];
    EXPECT_EQ(cands.back(), NodeSet{});
    for (const auto& c : cands) {
      for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = i + 1; j < c.size(); ++j) EXPECT_TRUE(h.adjacent(c[i], c[j]));
      }
    }
    EXPECT_TRUE(sets.warnings.empty());
  }
}

TEST(PlausibleTest, CandidateCountWithinDegeneracyBound) {
  std::mt19937_64 rng(12);
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const BiGraph h = random_bigraph(rng, 2 + static_cast<int>(rng() % 14), 0.4);
    const auto sets = plausible_parent_sets(map_for(h), h.size() + 1);
    const int p = sets.degeneracy[h.size()];
    const double bound = std::max(1, h.size() - p) * std::pow(3.0, p / 3.0);
    violations += static_cast<double>(sets.candidates[h.size()].size() - 1) > bound ? 1 : 0;
  }
  EXPECT_EQ(violations, 0);
}

TEST(PlausibleTest, OracleParentsFallInsideACandidate) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 150; ++trial) {
    const Dag g = random_dag(rng, 10, 14);
    const auto src = IndepSource::oracle(g);
    BlanketMap map = all_markov_blankets(src, g.size());
    remove_all_spouses(src, map);
    const auto sets = plausible_parent_sets(map, g.size());
    for (int x = 0; x < g.size(); ++x) {
      NodeSet pc = g.parents(x);
      pc.insert(pc.end(), g.children(x).begin(), g.children(x).end());
      std::sort(pc.begin(), pc.end());
      if (map.core[x] != pc) continue;
      const auto& pa = g.parents(x);
      const bool covered = std::any_of(sets.candidates[x].begin(), sets.candidates[x].end(), [&](const NodeSet& c) {
        return std::includes(c.begin(), c.end(), pa.begin(), pa.end());
      });
      EXPECT_TRUE(covered) << "trial " << trial << " node " << x;
    }
  }
}

}  // namespace
}  // namespace glide
