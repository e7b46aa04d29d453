#include <gtest/gtest.h>

#include "support.hpp"

using namespace domcert;
using namespace testsupport;

namespace {

std::vector<Graph> library() {
  return {even_cycle(4), even_cycle(6), c6_plus(), complete_bipartite(3, 3), hypercube(3),
          path(5),       perfect_tree(3, 2), one_subdivision(complete_bipartite(2, 3))};
}

// Conditions rechecked with nothing but the definitions.
bool oracle_is_cut_involution(const Graph& g, const std::vector<int>& p) {
  const int n = g.n();
  for (int v = 0; v < n; ++v)
    if (p[p[v]] != v) return false;
  bool some_fixed = false, some_moved = false;
  for (int v = 0; v < n; ++v) (p[v] == v ? some_fixed : some_moved) = true;
  if (!some_fixed || !some_moved) return false;
  // Components of g - F; none may be mapped to itself.
  std::vector<int> comp(n, -1);
  int c = 0;
  for (int s = 0; s < n; ++s) {
    if (p[s] == s || comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = c;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int y = 0; y < n; ++y)
        if (g.adjacent(x, y) && p[y] != y && comp[y] < 0) {
          comp[y] = c;
          stack.push_back(y);
        }
    }
    ++c;
  }
  for (int v = 0; v < n; ++v)
    if (p[v] != v && comp[p[v]] == comp[v]) return false;
  return true;
}

}  // namespace

TEST(CutInvolutions, C6HasThreeVertexAxes) {
  const auto invs = find_cut_involutions(even_cycle(6));
  ASSERT_EQ(invs.size(), 3u);
  for (const auto& phi : invs) EXPECT_EQ(phi.fixed.size(), 2u);
}

TEST(CutInvolutions, EdgeHasNone) { EXPECT_TRUE(find_cut_involutions(path(2)).empty()); }

TEST(CutInvolutions, C6PlusHubFixingReflections) {
  const auto invs = find_cut_involutions(c6_plus());
  ASSERT_EQ(invs.size(), 3u);
  for (const auto& phi : invs) {
    EXPECT_EQ(phi.perm(6), 6);
    EXPECT_EQ(phi.fixed.size(), 3u);
    EXPECT_FALSE(phi.stable);
  }
}

TEST(CutInvolutions, AgreeWithDefinitionOracleOnRandomGraphs) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 150; ++t) {
    const Graph g = t < 8 ? library()[t] : random_graph(rng, 3 + static_cast<int>(rng() % 5), 0.45);
    if (g.n() > 8) continue;
    std::set<std::vector<int>> found;
    for (const auto& phi : find_cut_involutions(g)) {
      EXPECT_TRUE(validate_cut_involution(g, phi).empty());
      EXPECT_EQ(phi.stable, fixed_set_independent(g, phi.fixed));
      found.insert(phi.perm.image);
    }
    std::set<std::vector<int>> oracle;
    for (const auto& p : brute_automorphisms(g))
      if (oracle_is_cut_involution(g, p)) oracle.insert(p);
    EXPECT_EQ(found, oracle);
  }
}

TEST(CutInvolutions, ValidatorCatchesTampering) {
  const Graph g = c6_plus();
  auto phi = find_cut_involutions(g).front();
  auto bad = phi;
  bad.stable = !bad.stable;
  EXPECT_FALSE(validate_cut_involution(g, bad).empty());
  bad = phi;
  std::swap(bad.left, bad.right);
  bad.left.push_back(bad.right.back());
  bad.right.pop_back();
  EXPECT_FALSE(validate_cut_involution(g, bad).empty());
  bad = phi;
  bad.perm = VertexPermutation::identity(g.n());
  EXPECT_FALSE(validate_cut_involution(g, bad).empty());
}

TEST(CutInvolutions, JsonRoundTripDerivesStability) {
  const Graph g = even_cycle(6);
  const auto phi = find_cut_involutions(g).front();
  auto j = involution_to_json(phi);
  EXPECT_EQ(involution_from_json(j), phi);
  j.erase("stable");
  EXPECT_EQ(involution_from_json(j, &g), phi);
}

TEST(HalfFolds, VertexMapIsIdempotentAndConjugateFlipsSide) {
  for (const auto& g : library())
    for (const auto& phi : find_cut_involutions(g))
      for (Side s : {Side::kLeft, Side::kRight}) {
        const auto h = make_half_fold(g, phi, s);
        for (Vertex v = 0; v < g.n(); ++v) EXPECT_EQ(h.vertex_map[h.vertex_map[v]], h.vertex_map[v]);
        const auto& kept = s == Side::kLeft ? phi.left : phi.right;
        for (Vertex v : kept) EXPECT_EQ(h.vertex_map[v], v);
        const auto c = conjugate(g, h);
        EXPECT_EQ(c.side, opposite(s));
        EXPECT_EQ(c.base, h.base);
      }
}

TEST(Fold, EmptyAndFull) {
  const Graph g = c6_plus();
  const auto h = make_half_fold(g, find_cut_involutions(g)[0], Side::kLeft);
  EXPECT_TRUE(fold(g.no_edges(), h).empty());
  EXPECT_TRUE(fold(g.all_edges(), h).full());
  EXPECT_THROW(fold(path(3).all_edges(), h), HostMismatch);
}

TEST(Fold, FixedAxisExampleOnC6Plus) {
  // Hub edge (2,6) and cycle edge (1,2); the reflection through vertex 2
  // copies (1,2) onto (2,3).
  const Graph g = c6_plus();
  const auto j = g.subset(std::vector<int>{g.edge_index(2, 6), g.edge_index(1, 2)});
  for (const auto& phi : find_cut_involutions(g)) {
    if (phi.perm(2) != 2) continue;
    for (Side s : {Side::kLeft, Side::kRight}) {
      const auto out = fold(j, make_half_fold(g, phi, s));
      const bool keeps_12 = std::find(phi.left.begin(), phi.left.end(), 1) != phi.left.end() ? s == Side::kLeft
                                                                                            : s == Side::kRight;
      if (keeps_12)
        EXPECT_EQ(out, g.subset(std::vector<int>{g.edge_index(2, 6), g.edge_index(1, 2), g.edge_index(2, 3)}));
      else
        EXPECT_EQ(out, g.subset(std::vector<int>{g.edge_index(2, 6)}));
    }
  }
}

TEST(Fold, AlgebraicProperties) {
  std::mt19937_64 rng(32);
  for (const auto& g : library()) {
    const auto invs = find_cut_involutions(g);
    const auto orbits = invs.empty() ? std::vector<std::vector<int>>{} : edge_orbits(g, invs);
    for (const auto& phi : invs)
      for (Side s : {Side::kLeft, Side::kRight}) {
        const auto psi = make_half_fold(g, phi, s);
        const auto bar = conjugate(g, psi);
        for (int t = 0; t < 200; ++t) {
          const auto j = g.subset(rng() & full_mask(g.num_edges()));
          const auto f = fold(j, psi);
          EXPECT_EQ(fold(f, psi), f);
          // Mirror closed.
          for (int e : f.indices()) EXPECT_TRUE(f.contains(map_edge(g, phi.perm.image, e)));
          EXPECT_EQ(f.count() + fold(j, bar).count(), 2 * j.count());
          // Complement within a phi-invariant layer.
          for (const auto& o : orbits) {
            const auto layer = g.subset(o);
            EXPECT_EQ(fold(layer - j, psi), layer - fold(j, psi));
          }
        }
      }
  }
}

TEST(EdgeOrbits, Examples) {
  const Graph g = c6_plus();
  const auto o = edge_orbits(g, find_cut_involutions(g));
  ASSERT_EQ(o.size(), 2u);
  EXPECT_EQ(o[0], (std::vector<int>{0, 1, 3, 4, 6, 7}));
  EXPECT_EQ(o[1], (std::vector<int>{2, 5, 8}));
  EXPECT_EQ(edge_orbits(even_cycle(6), find_cut_involutions(even_cycle(6))).size(), 1u);
  EXPECT_EQ(edge_orbits(g, {}).size(), 9u);
}
