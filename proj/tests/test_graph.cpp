#include "glide/graph.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "glide/error.hpp"

namespace glide {
namespace {

using testing::named;

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no glide::Error thrown";
  return ErrorKind::IoError;
}

// Moralized ancestral graph criterion, used as an independent reference for
// the reachability-based d_separated.
bool d_separated_moral(const Dag& dag, NodeId x, NodeId y, const NodeSet& z) {
  const int d = dag.size();
  std::vector<bool> keep(d, false);
  std::vector<NodeId> stack{x, y};
  stack.insert(stack.end(), z.begin(), z.end());
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (keep[v]) continue;
    keep[v] = true;
    for (NodeId p : dag.parents(v)) stack.push_back(p);
  }
  std::vector<std::vector<bool>> adj(d, std::vector<bool>(d, false));
  for (int v = 0; v < d; ++v) {
    if (!keep[v]) continue;
    const auto& pa = dag.parents(v);
    for (NodeId p : pa) adj[p][v] = adj[v][p] = true;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      for (std::size_t j = i + 1; j < pa.size(); ++j) adj[pa[i]][pa[j]] = adj[pa[j]][pa[i]] = true;
    }
  }
  std::vector<bool> blocked(d, false);
  for (NodeId v : z) blocked[v] = true;
  std::vector<bool> seen(d, false);
  stack = {x};
  seen[x] = true;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (v == y) return false;
    for (int w = 0; w < d; ++w) {
      if (keep[w] && adj[v][w] && !seen[w] && !blocked[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return true;
}

TEST(DagTest, SingleEdgeHasOneSource) {
  const Dag g = named({"A", "B"}, {{"A", "B"}});
  EXPECT_EQ(sources(g), NodeSet{0});
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(DagTest, IsolatedNodeIsASource) {
  const Dag g = named({"A"}, {});
  EXPECT_EQ(sources(g), NodeSet{0});
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(DagTest, RejectsTwoCycle) {
  EXPECT_EQ(kind_of([] { named({"A", "B"}, {{"A", "B"}, {"B", "A"}}); }), ErrorKind::CycleDetected);
}

TEST(DagTest, RejectsBadInput) {
  EXPECT_EQ(kind_of([] { named({"A", "B"}, {{"A", "Q"}}); }), ErrorKind::UnknownNode);
  EXPECT_EQ(kind_of([] { named({"A", "B"}, {{"A", "B"}, {"A", "B"}}); }), ErrorKind::DuplicateEdge);
  EXPECT_EQ(kind_of([] { Dag::from_indices(2, {{0, 5}}); }), ErrorKind::UnknownNode);
  EXPECT_EQ(kind_of([] { d_separated(Dag::empty(2), 0, 4, {}); }), ErrorKind::NodeOutOfRange);
  EXPECT_EQ(kind_of([] { Dag::from_indices(2, {{1, 1}}); }), ErrorKind::CycleDetected);
}

TEST(DagTest, SourcesOfSmallFixtures) {
  EXPECT_EQ(sources(testing::chain3()), NodeSet{0});
  EXPECT_EQ(sources(testing::collider3()), (NodeSet{0, 1}));
}

TEST(DagTest, AsiaStyleFixtureHasTwoSources) {
  const Dag asia = named({"asia", "smoke", "tub", "lung", "bronc", "either", "xray", "dysp"},
                         {{"asia", "tub"},
                          {"smoke", "lung"},
                          {"smoke", "bronc"},
                          {"tub", "either"},
                          {"lung", "either"},
                          {"either", "xray"},
                          {"either", "dysp"},
                          {"bronc", "dysp"}});
  EXPECT_EQ(sources(asia).size(), 2u);
}

TEST(DagTest, TopologicalOrderRespectsEdges) {
  const Dag g = gen_random_dag(GraphKind::ErdosRenyi, 30, 60, 3);
  std::vector<int> pos(g.size());
  const auto& order = g.topological_order();
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
  for (const auto& [p, c] : g.edges()) EXPECT_LT(pos[p], pos[c]);
}

TEST(DSeparationTest, SmallFixtures) {
  const NodeSet b{1}, c{2}, none;
  EXPECT_TRUE(d_separated(testing::chain3(), 0, 2, b));
  EXPECT_FALSE(d_separated(testing::chain3(), 0, 2, none));
  EXPECT_TRUE(d_separated(testing::collider3(), 0, 1, none));
  EXPECT_FALSE(d_separated(testing::collider3(), 0, 1, c));
  EXPECT_FALSE(d_separated(testing::fork3(), 0, 2, none));
  EXPECT_TRUE(d_separated(testing::fork3(), 0, 2, b));
}

TEST(DSeparationTest, ConditioningOnDescendantOfColliderOpensIt) {
  const Dag g = Dag::from_indices(4, {{0, 2}, {1, 2}, {2, 3}});
  const NodeSet z{3};
  EXPECT_FALSE(d_separated(g, 0, 1, z));
}

TEST(DSeparationTest, MatchesMoralizationOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 150; ++trial) {
    const int d = 3 + static_cast<int>(rng() % 6);
    const std::size_t max_e = static_cast<std::size_t>(d * (d - 1) / 2);
    const Dag g = gen_random_dag(GraphKind::ErdosRenyi, d, rng() % (max_e + 1), rng());
    for (int x = 0; x < d; ++x) {
      for (int y = x + 1; y < d; ++y) {
        NodeSet rest;
        for (int v = 0; v < d; ++v) {
          if (v != x && v != y) rest.push_back(v);
        }
        for (unsigned mask = 0; mask < (1u << rest.size()); ++mask) {
          NodeSet z;
          for (std::size_t k = 0; k < rest.size(); ++k) {
            if (mask >> k & 1u) z.push_back(rest[k]);
          }
          ASSERT_EQ(d_separated(g, x, y, z), d_separated_moral(g, x, y, z))
              << "trial " << trial << " x=" << x << " y=" << y;
        }
      }
    }
  }
}

TEST(MarkovBlanketTest, Fixtures) {
  EXPECT_EQ(true_markov_blanket(testing::chain3(), 1), (NodeSet{0, 2}));
  EXPECT_EQ(true_markov_blanket(testing::collider3(), 0), (NodeSet{1, 2}));
  // A->B, A->C, D->C at A: children B, C and spouse D.
  const Dag g = Dag::from_indices(4, {{0, 1}, {0, 2}, {3, 2}});
  EXPECT_EQ(true_markov_blanket(g, 0), (NodeSet{1, 2, 3}));
  EXPECT_EQ(g.spouses(0), NodeSet{3});
}

BiGraph bigraph_from(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  BiGraph g(ids);
  for (const auto& [u, v] : edges) g.add_edge(u, v);
  return g;
}

int brute_degeneracy(const BiGraph& g) {
  const int n = g.size();
  int best = 0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    int min_deg = n;
    for (int u = 0; u < n; ++u) {
      if (!(mask >> u & 1u)) continue;
      int deg = 0;
      for (int v : g.neighbors(u)) deg += (mask >> v & 1u) ? 1 : 0;
      min_deg = std::min(min_deg, deg);
    }
    best = std::max(best, min_deg);
  }
  return best;
}

TEST(DegeneracyTest, CompleteGraphAndTree) {
  EXPECT_EQ(degeneracy(bigraph_from(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}})).p, 3);
  EXPECT_EQ(degeneracy(bigraph_from(5, {{0, 1}, {0, 2}, {2, 3}, {2, 4}})).p, 1);
  EXPECT_EQ(degeneracy(bigraph_from(2, {{0, 1}})).p, 1);
}

TEST(DegeneracyTest, MatchesBruteForceAndOrderingIsCertificate) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (rng() % 3 == 0) edges.emplace_back(u, v);
      }
    }
    const BiGraph g = bigraph_from(n, edges);
    const Degeneracy dg = degeneracy(g);
    ASSERT_EQ(dg.p, brute_degeneracy(g));
    ASSERT_EQ(static_cast<int>(dg.ordering.size()), n);
    std::vector<bool> removed(n, false);
    for (int u : dg.ordering) {
      int later = 0;
      for (int v : g.neighbors(u)) later += removed[v] ? 0 : 1;
      EXPECT_LE(later, dg.p);
      removed[u] = true;
    }
  }
}

TEST(DegeneracyTest, SparseLargeGraphStaysSmall) {
  std::mt19937_64 rng(2);
  int worst = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::pair<int, int>> edges;
    std::set<std::pair<int, int>> seen;
    while (edges.size() < 1000) {
      int u = static_cast<int>(rng() % 500), v = static_cast<int>(rng() % 500);
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      if (seen.insert({u, v}).second) edges.emplace_back(u, v);
    }
    worst = std::max(worst, degeneracy(bigraph_from(500, edges)).p);
  }
  EXPECT_LE(worst, 13);
}

TEST(GeneratorTest, EmptyGraph) {
  const Dag g = gen_random_dag(GraphKind::ErdosRenyi, 5, 0, 7);
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_EQ(sources(g).size(), 5u);
}

TEST(GeneratorTest, ExactEdgeCountAndDeterminism) {
  for (GraphKind kind : {GraphKind::ErdosRenyi, GraphKind::ScaleFree, GraphKind::Bipartite}) {
    const Dag a = gen_random_dag(kind, 100, 100, 1);
    const Dag b = gen_random_dag(kind, 100, 100, 1);
    EXPECT_EQ(a.edge_count(), 100u) << to_string(kind);
    EXPECT_EQ(static_cast<int>(a.topological_order().size()), 100);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, gen_random_dag(kind, 100, 100, 2));
  }
}

TEST(GeneratorTest, BipartiteEdgesGoFromTopLayer) {
  GeneratorOptions opts;
  opts.bipartite_top = 5;
  const Dag g = gen_random_dag(GraphKind::Bipartite, 10, 25, 4, opts);
  EXPECT_EQ(g.edge_count(), 25u);
  for (const auto& [p, c] : g.edges()) {
    EXPECT_TRUE(g.parents(p).empty());
    EXPECT_TRUE(g.children(c).empty());
  }
  EXPECT_EQ(kind_of([&] { gen_random_dag(GraphKind::Bipartite, 10, 26, 4, opts); }),
            ErrorKind::InfeasibleEdgeCount);
  EXPECT_EQ(kind_of([] { gen_random_dag(GraphKind::ErdosRenyi, 4, 7, 4); }), ErrorKind::InfeasibleEdgeCount);
}

TEST(EdgeListTest, RoundTrip) {
  const Dag g = gen_random_dag(GraphKind::ScaleFree, 20, 30, 9);
  std::stringstream buf;
  write_edge_list(buf, g);
  EXPECT_EQ(read_edge_list(buf), g);

  std::stringstream empty;
  write_edge_list(empty, gen_random_dag(GraphKind::ErdosRenyi, 5, 0, 1));
  std::string line;
  int lines = 0;
  while (std::getline(empty, line)) ++lines;
  EXPECT_EQ(lines, 1);
}

TEST(EdgeListTest, ParseErrors) {
  std::stringstream bad("# nodes: A,B\nA\tC\n");
  EXPECT_EQ(kind_of([&] { read_edge_list(bad); }), ErrorKind::UnknownNode);
  std::stringstream cyclic("# nodes: A,B\nA\tB\nB\tA\n");
  EXPECT_EQ(kind_of([&] { read_edge_list(cyclic); }), ErrorKind::CycleDetected);
}

}  // namespace
}  // namespace glide
