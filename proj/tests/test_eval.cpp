#include "glide/eval.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "glide/error.hpp"

namespace glide {
namespace {

// Adjacency-matrix reference counts: state of each unordered pair is none,
// forward or backward.
struct Brute {
  int shd = 0;
  double spurious = 0.0;
  double tpr = 1.0;
};

Brute brute(const Dag& pred, const Dag& truth) {
  const int d = truth.size();
  Brute out;
  int extra = 0, correct = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const int p = pred.has_edge(i, j) ? 1 : pred.has_edge(j, i) ? 2 : 0;
      const int t = truth.has_edge(i, j) ? 1 : truth.has_edge(j, i) ? 2 : 0;
      out.shd += p != t ? 1 : 0;
      extra += (p != 0 && t == 0) ? 1 : 0;
      correct += (p != 0 && p == t) ? 1 : 0;
    }
  }
  out.spurious = pred.edge_count() == 0 ? 0.0 : static_cast<double>(extra) / pred.edge_count();
  out.tpr = truth.edge_count() == 0 ? 1.0 : static_cast<double>(correct) / truth.edge_count();
  return out;
}

std::vector<Dag> all_dags(int d) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
  }
  std::size_t total = 1;
  for (std::size_t k = 0; k < pairs.size(); ++k) total *= 3;
  std::vector<Dag> out;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<Edge> edges;
    std::size_t c = code;
    for (const auto& [i, j] : pairs) {
      if (c % 3 == 1) edges.emplace_back(i, j);
      if (c % 3 == 2) edges.emplace_back(j, i);
      c /= 3;
    }
    try {
      out.push_back(Dag::from_indices(d, edges));
    } catch (const Error&) {
    }
  }
  return out;
}

TEST(AllDagsTest, CountsMatchKnownSequence) {
  EXPECT_EQ(all_dags(2).size(), 3u);
  EXPECT_EQ(all_dags(3).size(), 25u);
  EXPECT_EQ(all_dags(4).size(), 543u);
}

TEST(ShdTest, Examples) {
  const Dag ab = Dag::from_indices(2, {{0, 1}});
  EXPECT_EQ(shd(ab, ab), 0);
  EXPECT_EQ(shd(Dag::from_indices(2, {{1, 0}}), ab), 1);
  const Dag truth = Dag::from_indices(4, {{0, 1}, {1, 2}, {2, 3}});
  EXPECT_EQ(shd(Dag::empty(4), truth), 3);
}

TEST(SpuriousTest, Examples) {
  const Dag truth = Dag::from_indices(4, {{0, 1}, {1, 2}});
  EXPECT_DOUBLE_EQ(spurious_rate(Dag::from_indices(4, {{1, 0}}), truth), 0.0);
  EXPECT_DOUBLE_EQ(spurious_rate(Dag::from_indices(4, {{2, 3}}), truth), 1.0);
  EXPECT_DOUBLE_EQ(spurious_rate(Dag::from_indices(4, {{0, 1}, {2, 3}}), truth), 0.5);
  EXPECT_DOUBLE_EQ(spurious_rate(Dag::empty(4), truth), 0.0);
}

TEST(TprTest, Examples) {
  const Dag truth = Dag::from_indices(3, {{0, 1}, {1, 2}});
  EXPECT_DOUBLE_EQ(tpr(truth, truth), 1.0);
  EXPECT_DOUBLE_EQ(tpr(Dag::from_indices(3, {{1, 0}, {2, 1}}), truth), 0.0);
  EXPECT_DOUBLE_EQ(tpr(Dag::empty(3), Dag::empty(3)), 1.0);

  // 17 true edges on 18 nodes, 14 recovered.
  std::vector<Edge> edges;
  for (int v = 0; v < 17; ++v) edges.emplace_back(v, v + 1);
  const Dag sachs_like = Dag::from_indices(18, edges);
  std::vector<Edge> found(edges.begin(), edges.begin() + 14);
  EXPECT_NEAR(tpr(Dag::from_indices(18, found), sachs_like), 14.0 / 17.0, 1e-12);
}

TEST(CompareTest, NodeSetMismatchThrows) {
  try {
    compare(Dag::empty(3), Dag::empty(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NodeSetMismatch);
  }
  EXPECT_THROW(compare(Dag({"a", "b"}, {}), Dag({"a", "c"}, {})), Error);
}

TEST(CompareTest, ExhaustiveSmallGraphsMatchBruteForce) {
  for (int d = 1; d <= 4; ++d) {
    const auto dags = all_dags(d);
    for (const Dag& pred : dags) {
      for (const Dag& truth : dags) {
        const MetricReport m = compare(pred, truth);
        const Brute b = brute(pred, truth);
        ASSERT_EQ(m.shd, b.shd);
        ASSERT_DOUBLE_EQ(m.spurious_rate, b.spurious);
        ASSERT_DOUBLE_EQ(m.tpr, b.tpr);
        ASSERT_EQ(m.shd, static_cast<int>(m.missing.size() + m.extra.size() + m.reversed.size()));
        ASSERT_NEAR(m.spurious_rate * pred.edge_count(), static_cast<double>(m.extra.size()), 1e-9);
      }
    }
  }
}

Dag relabel(const Dag& g, const std::vector<int>& perm) {
  std::vector<Edge> edges;
  for (const auto& [p, c] : g.edges()) edges.emplace_back(perm[p], perm[c]);
  return Dag::from_indices(g.size(), edges);
}

TEST(MetricPropertyTest, SymmetryTriangleAndRelabeling) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 7);
    const std::size_t max_e = static_cast<std::size_t>(d * (d - 1) / 2);
    auto draw = [&] { return gen_random_dag(GraphKind::ErdosRenyi, d, rng() % (max_e + 1), rng()); };
    const Dag a = draw(), b = draw(), c = draw();
    ASSERT_EQ(shd(a, a), 0);
    ASSERT_EQ(shd(a, b), shd(b, a));
    ASSERT_LE(shd(a, c), shd(a, b) + shd(b, c));
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    ASSERT_DOUBLE_EQ(spurious_rate(relabel(a, perm), relabel(b, perm)), spurious_rate(a, b));
    ASSERT_DOUBLE_EQ(tpr(relabel(a, perm), relabel(b, perm)), tpr(a, b));
    ASSERT_EQ(shd(relabel(a, perm), relabel(b, perm)), shd(a, b));
  }
}

}  // namespace
}  // namespace glide
