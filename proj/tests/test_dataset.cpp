#include "glide/dataset.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "glide/error.hpp"

namespace glide {
namespace {

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double sd(const std::vector<double>& v) {
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / (v.size() - 1));
}

double corr(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

Dataset small(std::vector<std::vector<Code>> cols, std::vector<int> cards) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < cols.size(); ++j) names.push_back("V" + std::to_string(j));
  return Dataset(names, std::move(cols), std::move(cards));
}

TEST(DatasetTest, RejectsCodeOutsideCardinality) {
  EXPECT_THROW(small({{0, 2}}, {2}), Error);
  EXPECT_THROW(small({{0, 1}, {0}}, {2, 2}), Error);
}

TEST(LinearGaussianTest, IsolatedNodeIsStandardNoise) {
  const auto t = simulate_linear_gaussian(Dag::empty(1), 10000, 0.5, 2.0, 1.0, 3);
  EXPECT_NEAR(mean(t.columns[0]), 0.0, 0.05);
  EXPECT_NEAR(sd(t.columns[0]), 1.0, 0.05);
}

TEST(LinearGaussianTest, UnitWeightEdgeCorrelation) {
  const Dag g = Dag::from_indices(2, {{0, 1}});
  const auto t = simulate_linear_gaussian(g, 100000, LinearWeights{{1.0}}, 1.0, 8);
  EXPECT_NEAR(corr(t.columns[0], t.columns[1]), 1.0 / std::sqrt(2.0), 0.03);
}

TEST(LinearGaussianTest, SameSeedSameTable) {
  const Dag g = gen_random_dag(GraphKind::ErdosRenyi, 6, 6, 1);
  EXPECT_EQ(simulate_linear_gaussian(g, 500, 0.5, 2.0, 1.0, 4), simulate_linear_gaussian(g, 500, 0.5, 2.0, 1.0, 4));
}

TEST(NonlinearTest, IsolatedNodeIsUniformNoise) {
  const auto t = simulate_nonlinear(Dag::empty(1), 100000, 5);
  EXPECT_NEAR(mean(t.columns[0]), 0.0, 0.02);
  EXPECT_GE(*std::min_element(t.columns[0].begin(), t.columns[0].end()), -1.0);
  EXPECT_LE(*std::max_element(t.columns[0].begin(), t.columns[0].end()), 1.0);
}

double binned_mi(const std::vector<Code>& a, const std::vector<Code>& b, int ca, int cb) {
  std::vector<double> joint(ca * cb, 0.0), pa(ca, 0.0), pb(cb, 0.0);
  const double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[a[i] * cb + b[i]] += 1 / n;
    pa[a[i]] += 1 / n;
    pb[b[i]] += 1 / n;
  }
  double mi = 0.0;
  for (int i = 0; i < ca; ++i) {
    for (int j = 0; j < cb; ++j) {
      const double p = joint[i * cb + j];
      if (p > 0) mi += p * std::log(p / (pa[i] * pb[j]));
    }
  }
  return mi;
}

TEST(NonlinearTest, EdgeCarriesInformationUnderPermutationTest) {
  const Dag g = Dag::from_indices(2, {{0, 1}});
  const Dataset ds = discretize(simulate_nonlinear(g, 10000, 6), 4);
  std::vector<Code> a(ds.column(0).begin(), ds.column(0).end());
  std::vector<Code> b(ds.column(1).begin(), ds.column(1).end());
  const double observed = binned_mi(a, b, ds.cardinality(0), ds.cardinality(1));
  std::mt19937_64 rng(1);
  int exceed = 0;
  for (int k = 0; k < 200; ++k) {
    std::shuffle(b.begin(), b.end(), rng);
    exceed += binned_mi(a, b, ds.cardinality(0), ds.cardinality(1)) >= observed ? 1 : 0;
  }
  EXPECT_LE((exceed + 1) / 201.0, 0.01);
}

TEST(CategoricalTest, BernoulliFrequency) {
  CategoricalModel model;
  model.dag = Dag::empty(1);
  model.cardinalities = {2};
  model.cpts = {{{0.7, 0.3}}};
  const Dataset ds = sample_categorical(model, 100000, 9);
  EXPECT_NEAR(empirical_marginal(DataView(ds), 0)[0], 0.7, 0.01);
}

TEST(CategoricalTest, ChainConditionalMatchesCpt) {
  const CategoricalModel model = random_categorical_model(Dag::from_indices(2, {{0, 1}}), 2, 4, 12);
  const Dataset ds = sample_categorical(model, 100000, 13);
  const NodeSet z{0};
  const Cpt cpt = empirical_conditional(DataView(ds), 1, z, 0.0);
  ASSERT_EQ(cpt.configurations.size(), static_cast<std::size_t>(model.cardinalities[0]));
  for (std::size_t k = 0; k < cpt.configurations.size(); ++k) {
    const auto& truth = model.cpts[1][cpt.configurations[k][0]];
    double tv = 0.0;
    for (std::size_t v = 0; v < truth.size(); ++v) tv += std::abs(truth[v] - cpt.table[k][v]) / 2;
    EXPECT_LE(tv, 0.02) << "A=" << cpt.configurations[k][0];
  }
}

TEST(CategoricalTest, CptsAreDistributionsAndSamplingIsDeterministic) {
  const Dag g = gen_random_dag(GraphKind::ErdosRenyi, 8, 10, 2);
  const CategoricalModel model = random_categorical_model(g, 2, 5, 3);
  for (int v = 0; v < g.size(); ++v) {
    for (const auto& row : model.cpts[v]) {
      EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
      EXPECT_EQ(static_cast<int>(row.size()), model.cardinalities[v]);
    }
  }
  EXPECT_EQ(sample_categorical(model, 1000, 4), sample_categorical(model, 1000, 4));
  EXPECT_EQ(simulate_categorical(g, 1000, 2, 5, 4), simulate_categorical(g, 1000, 2, 5, 4));
}

TEST(DiscretizeTest, Examples) {
  const Dataset quarters = discretize(ContinuousTable{{"a"}, {{0, 1, 2, 3}}}, 4);
  EXPECT_EQ(std::vector<Code>(quarters.column(0).begin(), quarters.column(0).end()), (std::vector<Code>{0, 1, 2, 3}));

  const Dataset constant = discretize(ContinuousTable{{"a"}, {{5, 5, 5}}}, 4);
  EXPECT_EQ(std::vector<Code>(constant.column(0).begin(), constant.column(0).end()), (std::vector<Code>{0, 0, 0}));
  EXPECT_EQ(constant.cardinality(0), 1);

  const Dataset halves = discretize(ContinuousTable{{"a"}, {{0, 0.1, 0.9, 1.0}}}, 2);
  EXPECT_EQ(std::vector<Code>(halves.column(0).begin(), halves.column(0).end()), (std::vector<Code>{0, 0, 1, 1}));
}

TEST(DiscretizeTest, RejectsNonFinite) {
  EXPECT_THROW(discretize(ContinuousTable{{"a"}, {{0, NAN, 1}}}, 2), Error);
}

TEST(MarginalTest, Examples) {
  EXPECT_EQ(empirical_marginal(DataView(small({{0, 0, 1, 1}}, {2})), 0), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(empirical_marginal(DataView(small({{0, 0, 0, 1}}, {2})), 0), (std::vector<double>{0.75, 0.25}));
  const Dataset ds = simulate_categorical(Dag::empty(3), 777, 3, 5, 1);
  for (int v = 0; v < 3; ++v) {
    const auto p = empirical_marginal(DataView(ds), v);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(ConditionalTest, Examples) {
  const Dataset ds = small({{0, 0, 0, 1}, {0, 0, 0, 0}}, {2, 2});
  const NodeSet z{1};
  const Cpt raw = empirical_conditional(DataView(ds), 0, z, 0.0);
  ASSERT_EQ(raw.table.size(), 1u);
  EXPECT_EQ(raw.table[0], (std::vector<double>{0.75, 0.25}));
  const Cpt smooth = empirical_conditional(DataView(ds), 0, z, 1.0);
  EXPECT_NEAR(smooth.table[0][0], 4.0 / 6.0, 1e-12);
  EXPECT_NEAR(smooth.table[0][1], 2.0 / 6.0, 1e-12);
  // z = 1 never occurs, so only one configuration is reported.
  EXPECT_EQ(smooth.configurations, (std::vector<std::vector<Code>>{{0}}));
}

TEST(FactorizeTest, LexicographicIds) {
  const Dataset ds = small({{1, 0, 1, 0, 1}, {2, 0, 0, 1, 2}}, {2, 3});
  const NodeSet vars{0, 1};
  const ConfigIndex idx = factorize(DataView(ds), vars);
  // Present configurations: (0,0) (0,1) (1,0) (1,2)
  EXPECT_EQ(idx.count, 4u);
  EXPECT_EQ(idx.ids, (std::vector<std::uint32_t>{3, 0, 2, 1, 3}));
}

TEST(CsvTest, RoundTrips) {
  const Dag g = gen_random_dag(GraphKind::ErdosRenyi, 5, 4, 3);
  const Dataset ds = simulate_categorical(g, 2000, 2, 3, 3);
  std::stringstream buf;
  write_csv(buf, ds);
  EXPECT_EQ(read_csv_categorical(buf), ds);

  const ContinuousTable t = simulate_linear_gaussian(g, 200, 0.5, 2.0, 1.0, 3);
  std::stringstream cbuf;
  write_csv(cbuf, t);
  EXPECT_EQ(read_csv_continuous(cbuf), t);
}

TEST(CsvTest, CategoricalCodesAreRemappedDensely) {
  std::stringstream in("a,b\n3,0\n7,0\n3,1\n");
  const Dataset ds = read_csv_categorical(in);
  EXPECT_EQ(ds.cardinality(0), 2);
  EXPECT_EQ(std::vector<Code>(ds.column(0).begin(), ds.column(0).end()), (std::vector<Code>{0, 1, 0}));
}

TEST(CsvTest, MalformedInputIsAParseError) {
  for (const char* text : {"", "a,b\n1\n", "a,b\n1,x\n", "a\n-1\n"}) {
    std::stringstream in(text);
    try {
      read_csv_categorical(in);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ParseError) << text;
    }
  }
}

}  // namespace
}  // namespace glide
