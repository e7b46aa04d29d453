#include <gtest/gtest.h>

#include "support.hpp"

using namespace domcert;
using namespace testsupport;

TEST(DensestSubgraph, Examples) {
  const auto c = max_subgraph_density(c6_plus());
  EXPECT_EQ(c.density, make_rational(3, 2));
  EXPECT_EQ(c.vertices.size(), 7u);
  EXPECT_EQ(max_subgraph_density(even_cycle(6)).density, make_rational(6, 5));
  EXPECT_EQ(max_subgraph_density(star(3)).density, 1);
  EXPECT_THROW(max_subgraph_density(path(30)), CapExceeded);
}

TEST(DensestSubgraph, AtLeastOwnDensityOnRandomConnectedGraphs) {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 200; ++t) {
    const Graph g = random_connected(rng, 2 + static_cast<int>(rng() % 7), 0.3);
    const auto best = max_subgraph_density(g);
    EXPECT_GE(best.density, make_rational(g.num_edges(), g.n() - 1));
    // The witness set attains the reported density and is connected.
    const Graph w = induced_subgraph(g, best.vertices);
    EXPECT_TRUE(is_connected(w));
    EXPECT_EQ(make_rational(w.num_edges(), w.n() - 1), best.density);
  }
}

TEST(Screen, Examples) {
  const auto c = screen(c6_plus());
  EXPECT_TRUE(c.pass());
  EXPECT_TRUE(c.bipartite && c.one_balanced && c.small_side_regular && c.components_identical);

  const auto p4 = screen(path(4));
  EXPECT_FALSE(p4.pass());
  EXPECT_TRUE(p4.has(ScreenReason::kSideIrregular));
  EXPECT_EQ(p4.failures.size(), 1u);

  EXPECT_TRUE(screen(disjoint_union(star(2), star(2))).components_identical);
  const auto mixed = screen(disjoint_union(star(2), star(3)));
  EXPECT_TRUE(mixed.has(ScreenReason::kComponentsDiffer));

  EXPECT_TRUE(screen(Graph::from_pairs(3, {{0, 1}, {1, 2}, {0, 2}})).has(ScreenReason::kNotBipartite));
  EXPECT_TRUE(screen(Graph(3, {{0, 1}})).has(ScreenReason::kIsolatedVertex));
}

TEST(Screen, EnumerationCountsOfSmallBipartiteGraphs) {
  const auto all = all_bipartite_graphs(5);
  std::vector<int> per(6, 0);
  for (const auto& g : all) ++per[g.num_edges()];
  EXPECT_EQ(per, (std::vector<int>{0, 1, 2, 4, 9, 18}));
}

TEST(Screen, AgreesWithBruteForceOracleOnEveryBipartiteGraphUpToEightEdges) {
  const auto all = all_bipartite_graphs(8);
  ASSERT_EQ(all.size(), 412u);
  for (const auto& g : all) {
    const auto rep = screen(g);
    const auto o = screen_oracle(g);
    ASSERT_TRUE(rep.bipartite);
    ASSERT_EQ(rep.one_balanced, o.one_balanced) << canonical_text(g);
    ASSERT_EQ(rep.small_side_regular, o.side_regular) << canonical_text(g);
    ASSERT_EQ(rep.components_identical, o.identical) << canonical_text(g);
    ASSERT_EQ(rep.pass(), o.one_balanced && o.side_regular && o.identical);
  }
}

TEST(Screen, NeverPassesNonBipartiteGraphs) {
  std::mt19937_64 rng(52);
  for (int t = 0; t < 300; ++t) {
    const Graph g = random_graph(rng, 3 + static_cast<int>(rng() % 6), 0.5);
    if (bipartition(g)) continue;
    EXPECT_FALSE(screen(g).pass());
  }
}

TEST(Screen, WitnessesViolateTheirCondition) {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 300; ++t) {
    const Graph g = random_graph(rng, 3 + static_cast<int>(rng() % 6), 0.4);
    const auto rep = screen(g);
    for (const auto& f : rep.failures) {
      switch (f.reason) {
        case ScreenReason::kIsolatedVertex:
          for (Vertex v : f.witness) EXPECT_EQ(g.degree(v), 0);
          break;
        case ScreenReason::kNotBipartite: {
          // A closed walk of odd length.
          ASSERT_EQ(f.witness.size() % 2, 1u);
          for (std::size_t i = 0; i < f.witness.size(); ++i)
            EXPECT_TRUE(g.adjacent(f.witness[i], f.witness[(i + 1) % f.witness.size()]));
          break;
        }
        case ScreenReason::kNotOneBalanced: {
          const Graph w = induced_subgraph(g, f.witness);
          const auto comps = connected_components(g);
          for (const auto& c : comps)
            if (std::find(c.begin(), c.end(), f.witness.front()) != c.end()) {
              const Graph own = induced_subgraph(g, c);
              EXPECT_GT(make_rational(w.num_edges(), w.n() - 1), make_rational(own.num_edges(), own.n() - 1));
            }
          break;
        }
        case ScreenReason::kSideIrregular:
          for (Vertex v : f.witness)
            for (const auto& c : connected_components(g))
              if (std::find(c.begin(), c.end(), v) != c.end())
                EXPECT_LT(g.degree(v), induced_subgraph(g, c).max_degree());
          break;
        case ScreenReason::kComponentsDiffer:
          EXPECT_FALSE(f.witness.empty());
          break;
      }
    }
  }
}

TEST(Screen, ReportsLargerSideDegrees) {
  const auto rep = screen(c6_plus());
  EXPECT_EQ(rep.larger_side_degrees, (std::vector<int>{2, 2, 2, 3}));
  const auto j = screen_to_json(rep);
  EXPECT_EQ(j["overall"], "PASS");
  EXPECT_EQ(screen_to_json(screen(path(4)))["failures"][0]["reason"], "SIDE_IRREGULAR");
}
