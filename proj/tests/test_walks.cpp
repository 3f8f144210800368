#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "kne/alias_table.hpp"
#include "kne/graph.hpp"
#include "kne/walks.hpp"
#include "stats_util.hpp"

namespace {

using kne::Graph;
using kne::NodeId;
using kne::TransitionModel;

Graph karate() { return kne::read_edge_list(std::string(KNE_TEST_DATA_DIR) + "/karate.edgelist"); }

std::vector<std::size_t> sample_counts(const kne::AliasTable& t, std::size_t draws, std::uint64_t seed) {
  kne::Rng rng = kne::make_rng(seed);
  std::vector<std::size_t> counts(t.size(), 0);
  for (std::size_t i = 0; i < draws; ++i) ++counts[t.sample(rng)];
  return counts;
}

TEST(AliasTable, TwoEqualWeights) {
  const std::vector<double> w{1.0, 1.0};
  const kne::AliasTable t(w);
  EXPECT_DOUBLE_EQ(t.probability(0), 0.5);
  EXPECT_DOUBLE_EQ(t.probability(1), 0.5);
  const auto counts = sample_counts(t, 100000, 1);
  const std::vector<double> p{0.5, 0.5};
  EXPECT_GT(kne::testing::chi_square_gof_pvalue(counts, p), 1e-3);
}

TEST(AliasTable, SingleWeightAlwaysZero) {
  const std::vector<double> w{5.0};
  const kne::AliasTable t(w);
  const auto counts = sample_counts(t, 1000, 2);
  EXPECT_EQ(counts[0], 1000u);
}

TEST(AliasTable, ThreeToOneMonteCarlo) {
  const std::vector<double> w{3.0, 1.0};
  const kne::AliasTable t(w);
  const auto counts = sample_counts(t, 100000, 3);
  const std::vector<double> p{0.75, 0.25};
  EXPECT_GT(kne::testing::chi_square_gof_pvalue(counts, p), 1e-3);
}

TEST(AliasTable, ReconstructionMatchesNormalizedWeights) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> w(1 + trial % 17);
    for (double& x : w) x = u(gen);
    w[0] = 0.0;
    if (w.size() == 1) w[0] = 1.0;
    const double z = std::accumulate(w.begin(), w.end(), 0.0);
    const kne::AliasTable t(w);
    for (std::uint32_t i = 0; i < w.size(); ++i) EXPECT_NEAR(t.probability(i), w[i] / z, 1e-12);
  }
}

TEST(AliasTable, RejectsInvalidWeights) {
  EXPECT_THROW(kne::AliasTable(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(kne::AliasTable(std::vector<double>{0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(kne::AliasTable(std::vector<double>{1.0, -1.0}), std::invalid_argument);
  EXPECT_THROW(kne::AliasTable(std::vector<double>{1.0, std::nan("")}), std::invalid_argument);
}

TEST(Transition, UnitParametersGiveUniformSecondStep) {
  const Graph g = karate();
  const TransitionModel tm(g, 1.0, 1.0);
  EXPECT_EQ(tm.mode(), TransitionModel::Mode::kShared);
  for (NodeId cur = 0; cur < g.node_count(); ++cur) {
    for (NodeId prev : g.neighbors(cur)) {
      const auto dist = tm.second_step_distribution(prev, cur);
      for (double x : dist) EXPECT_NEAR(x, 1.0 / g.degree(cur), 1e-12);
    }
  }
}

TEST(Transition, PathClosedFormWeights) {
  // a=0, b=1, c=2; at b having come from a.
  const Graph g = Graph::from_edges(3, {{0, 1}, {1, 2}});
  const TransitionModel tm(g, 0.5, 2.0);
  EXPECT_DOUBLE_EQ(tm.bias(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(tm.bias(0, 2), 0.5);
  const auto dist = tm.second_step_distribution(0, 1);
  ASSERT_EQ(dist.size(), 2u);
  EXPECT_NEAR(dist[0], 0.8, 1e-12);
  EXPECT_NEAR(dist[1], 0.2, 1e-12);
}

TEST(Transition, StarCenterUniform) {
  const Graph g = Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
  const TransitionModel tm(g, 1.0, 1.0);
  for (double x : tm.first_step_distribution(0)) EXPECT_NEAR(x, 1.0 / 3.0, 1e-12);
}

TEST(Transition, RejectsNonPositiveParameters) {
  const Graph g = Graph::from_edges(2, {{0, 1}});
  EXPECT_THROW(TransitionModel(g, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(TransitionModel(g, 1.0, -1.0), std::invalid_argument);
}

// Independent node2vec weight oracle: 1/p to return, 1 to a common
// neighbor of prev, 1/q otherwise.
std::vector<double> oracle_second_step(const Graph& g, NodeId prev, NodeId cur, double p, double q) {
  std::vector<double> w;
  for (NodeId x : g.neighbors(cur)) {
    if (x == prev) {
      w.push_back(1.0 / p);
      continue;
    }
    bool common = false;
    for (NodeId y : g.neighbors(prev)) common = common || y == x;
    w.push_back(common ? 1.0 : 1.0 / q);
  }
  const double z = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= z;
  return w;
}

std::size_t directed_edge(const Graph& g, NodeId prev, NodeId cur) {
  const auto nb = g.neighbors(prev);
  return g.offsets()[prev] + static_cast<std::size_t>(std::lower_bound(nb.begin(), nb.end(), cur) - nb.begin());
}

TEST(Transition, EagerAndRejectionMatchOracle) {
  const Graph g = karate();
  const TransitionModel eager(g, 0.25, 4.0);
  const TransitionModel rejection(g, 0.25, 4.0, 0);
  ASSERT_EQ(eager.mode(), TransitionModel::Mode::kEager);
  ASSERT_EQ(rejection.mode(), TransitionModel::Mode::kRejection);
  kne::Rng rng = kne::make_rng(5);
  const auto edges = g.edges();
  std::vector<std::pair<NodeId, NodeId>> cases;
  for (std::size_t i = 0; i < edges.size(); i += 13) cases.emplace_back(edges[i].v, edges[i].u);
  cases.emplace_back(edges[0].u, edges[0].v);
  for (auto [prev, cur] : cases) {
    ASSERT_TRUE(g.has_edge(prev, cur));
    const auto expected = oracle_second_step(g, prev, cur, 0.25, 4.0);
    const auto exact = eager.second_step_distribution(prev, cur);
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(exact[i], expected[i], 1e-12);
    const std::size_t edge = directed_edge(g, prev, cur);
    for (const TransitionModel* tm : {&eager, &rejection}) {
      std::vector<std::size_t> counts(expected.size(), 0);
      for (int i = 0; i < 50000; ++i) ++counts[tm->second_step(prev, cur, edge, rng)];
      EXPECT_GT(kne::testing::chi_square_gof_pvalue(counts, expected), 1e-3)
          << "prev " << prev << " cur " << cur;
    }
  }
}

TEST(Walks, IsolatedNodeGivesSingletonWalks) {
  const Graph g = Graph::from_edges(1, {});
  const TransitionModel tm(g, 1.0, 1.0);
  const auto corpus = kne::generate_walks(tm, {.walks_per_node = 2, .length = 10, .seed = 1});
  ASSERT_EQ(corpus.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    ASSERT_EQ(corpus.walk(i).size(), 1u);
    EXPECT_EQ(corpus.walk(i)[0], 0u);
  }
}

TEST(Walks, SingleEdgeAlternates) {
  const Graph g = Graph::from_edges(2, {{0, 1}});
  const TransitionModel tm(g, 0.5, 2.0);
  const auto corpus = kne::generate_walks(tm, {.walks_per_node = 3, .length = 3, .seed = 1});
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto w = corpus.walk(i);
    ASSERT_EQ(w.size(), 3u);
    EXPECT_NE(w[0], w[1]);
    EXPECT_EQ(w[0], w[2]);
  }
}

TEST(Walks, EdgeValidityAndCorpusSize) {
  const Graph g = Graph::from_edges(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}});
  for (double q : {1.0, 0.5}) {
    const TransitionModel tm(g, 2.0, q);
    const std::size_t n_walks = 7, len = 9;
    const auto corpus = kne::generate_walks(tm, {.walks_per_node = n_walks, .length = len, .seed = 3});
    ASSERT_EQ(corpus.size(), n_walks * g.node_count());
    std::size_t tokens = 0;
    std::vector<std::size_t> starts(g.node_count(), 0);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto w = corpus.walk(i);
      tokens += w.size();
      ++starts[w[0]];
      EXPECT_EQ(w.size(), g.degree(w[0]) == 0 ? 1u : len);
      for (std::size_t j = 1; j < w.size(); ++j) EXPECT_TRUE(g.has_edge(w[j - 1], w[j]));
    }
    for (std::size_t s : starts) EXPECT_EQ(s, n_walks);
    // Node 5 is isolated, so the corpus is strictly shorter than N * n * L.
    EXPECT_EQ(tokens, n_walks * (5 * len + 1));
    EXPECT_LT(tokens, n_walks * g.node_count() * len);
  }
}

TEST(Walks, DeterministicForSeedAndThreadCount) {
  const Graph g = karate();
  const TransitionModel tm(g, 0.5, 2.0);
  const auto a = kne::generate_walks(tm, {.walks_per_node = 5, .length = 10, .seed = 9, .threads = 1});
  const auto b = kne::generate_walks(tm, {.walks_per_node = 5, .length = 10, .seed = 9, .threads = 1});
  const auto c = kne::generate_walks(tm, {.walks_per_node = 5, .length = 10, .seed = 9, .threads = 4});
  const auto d = kne::generate_walks(tm, {.walks_per_node = 5, .length = 10, .seed = 10, .threads = 1});
  const auto ta = a.tokens();
  EXPECT_TRUE(std::equal(ta.begin(), ta.end(), b.tokens().begin(), b.tokens().end()));
  EXPECT_TRUE(std::equal(ta.begin(), ta.end(), c.tokens().begin(), c.tokens().end()));
  EXPECT_FALSE(std::equal(ta.begin(), ta.end(), d.tokens().begin(), d.tokens().end()));
}

TEST(Walks, VisitFrequenciesMatchFirstOrderWalker) {
  const Graph g = karate();
  const TransitionModel tm(g, 1.0, 1.0);
  const std::size_t n_walks = 1000, len = 10;
  const auto corpus = kne::generate_walks(tm, {.walks_per_node = n_walks, .length = len, .seed = 21});

  // Reference: plain uniform-neighbor walker with its own generator.
  std::mt19937_64 gen(2024);
  const NodeId n = g.node_count();
  // Positions compared separately so that every sample within a test is
  // independent of the others.
  for (std::size_t pos : {1u, 4u, 9u}) {
    std::vector<std::size_t> lib(n, 0), ref(n, 0);
    for (std::size_t i = 0; i < corpus.size(); ++i) ++lib[corpus.walk(i)[pos]];
    for (NodeId s = 0; s < n; ++s) {
      for (std::size_t r = 0; r < n_walks; ++r) {
        NodeId cur = s;
        for (std::size_t step = 0; step < pos; ++step) {
          const auto nb = g.neighbors(cur);
          cur = nb[std::uniform_int_distribution<std::size_t>(0, nb.size() - 1)(gen)];
        }
        ++ref[cur];
      }
    }
    EXPECT_GT(kne::testing::chi_square_two_sample_pvalue(lib, ref), 1e-3) << "position " << pos;
  }
}

TEST(Walks, DumpUsesOriginalLabels) {
  const Graph g = kne::parse_edge_list("x y\n");
  const TransitionModel tm(g, 1.0, 1.0);
  const auto corpus = kne::generate_walks(tm, {.walks_per_node = 1, .length = 3, .seed = 1});
  std::ostringstream out;
  kne::write_walks(corpus, g, out);
  const std::string s = out.str();
  EXPECT_TRUE(s == "x y x\ny x y\n" || s == "y x y\nx y x\n") << s;
}

TEST(Walks, RejectsZeroSizes) {
  const Graph g = Graph::from_edges(2, {{0, 1}});
  const TransitionModel tm(g, 1.0, 1.0);
  EXPECT_THROW(kne::generate_walks(tm, {.walks_per_node = 0}), std::invalid_argument);
  EXPECT_THROW(kne::generate_walks(tm, {.walks_per_node = 1, .length = 0}), std::invalid_argument);
}

}  // namespace
