#pragma once

// Generators and brute-force oracles shared by the test suites. The oracles
// deliberately avoid the library's search code: plain permutation loops,
// plain k^v sums, exact rationals.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "domcert/domcert.hpp"

namespace testsupport {

using namespace domcert;

inline Graph random_graph(std::mt19937_64& rng, int n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) e.push_back({u, v});
  return Graph(n, e);
}

inline Graph random_bipartite(std::mt19937_64& rng, int a, int b, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> e;
  for (int u = 0; u < a; ++u)
    for (int v = 0; v < b; ++v)
      if (coin(rng)) e.push_back({u, a + v});
  return Graph(a + b, e);
}

inline Graph random_connected(std::mt19937_64& rng, int n, double extra) {
  std::vector<Edge> e;
  for (int v = 1; v < n; ++v) e.push_back({static_cast<int>(rng() % v), v});
  std::bernoulli_distribution coin(extra);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      bool present = false;
      for (const auto& x : e) present = present || (x.u == u && x.v == v) || (x.u == v && x.v == u);
      if (!present && coin(rng)) e.push_back({u, v});
    }
  return Graph(n, e);
}

inline BlockKernel<double> random_kernel(std::mt19937_64& rng, int k, bool signed_mode = false) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  BlockKernel<double> w;
  w.k = k;
  w.values.assign(static_cast<std::size_t>(k) * k, 0.0);
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) {
      const double v = signed_mode ? 2 * unit(rng) - 1 : unit(rng);
      w.at(a, b) = w.at(b, a) = v;
    }
  double total = 0;
  for (int a = 0; a < k; ++a) {
    w.measures.push_back(0.05 + unit(rng));
    total += w.measures.back();
  }
  for (auto& m : w.measures) m /= total;
  return w;
}

inline StepGraphon random_graphon(std::mt19937_64& rng, int k, bool signed_mode = false) {
  const auto w = random_kernel(rng, k, signed_mode);
  std::vector<std::vector<double>> vals(k, std::vector<double>(k));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) vals[a][b] = w.at(a, b);
  return StepGraphon(vals, w.measures, signed_mode);
}

// Random rational graphon with small denominators.
inline StepGraphon random_exact_graphon(std::mt19937_64& rng, int k) {
  std::vector<std::vector<Rational>> vals(k, std::vector<Rational>(k));
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) vals[a][b] = vals[b][a] = make_rational(static_cast<std::int64_t>(rng() % 8), 7);
  std::vector<std::int64_t> w(k);
  std::int64_t total = 0;
  for (auto& x : w) total += (x = 1 + static_cast<std::int64_t>(rng() % 5));
  std::vector<Rational> meas;
  for (auto x : w) meas.push_back(make_rational(x, total));
  return StepGraphon::exact(vals, meas);
}

// Sum over all k^v block assignments; no elimination, no pruning.
template <class T>
T brute_density(const Graph& p, const BlockKernel<T>& w) {
  const int v = p.n(), k = w.k;
  std::vector<int> a(v, 0);
  T total(0);
  while (true) {
    T term(1);
    for (int i = 0; i < v; ++i) term *= w.measures[a[i]];
    for (const auto& e : p.edges()) term *= w.at(a[e.u], a[e.v]);
    total += term;
    int i = 0;
    while (i < v && ++a[i] == k) a[i++] = 0;
    if (i == v) break;
  }
  return total;
}

// All maps V(p) -> V(g), counted.
inline long long brute_hom(const Graph& p, const Graph& g) {
  const int v = p.n(), n = g.n();
  if (v == 0) return 1;
  if (n == 0) return 0;
  std::vector<int> a(v, 0);
  long long count = 0;
  while (true) {
    bool ok = true;
    for (const auto& e : p.edges()) ok = ok && g.adjacent(a[e.u], a[e.v]);
    count += ok;
    int i = 0;
    while (i < v && ++a[i] == n) a[i++] = 0;
    if (i == v) break;
  }
  return count;
}

inline std::vector<std::vector<int>> brute_automorphisms(const Graph& g) {
  std::vector<int> p(g.n());
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    bool ok = true;
    for (const auto& e : g.edges()) ok = ok && g.adjacent(p[e.u], p[e.v]);
    if (ok) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline bool brute_isomorphic(const Graph& a, const Graph& b) {
  if (a.n() != b.n() || a.num_edges() != b.num_edges()) return false;
  std::vector<int> p(a.n());
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = true;
    for (const auto& e : a.edges()) ok = ok && b.adjacent(p[e.u], p[e.v]);
    if (ok) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

// Graph on the edges in `mask`, isolated vertices dropped.
inline Graph edge_mask_graph(const Graph& g, EdgeMask mask) { return compact_subgraph(g, g.subset(mask)).graph; }

// Random nonempty edge subgraph, compacted.
inline Graph random_subgraph(std::mt19937_64& rng, const Graph& g) {
  EdgeMask m = 0;
  while (m == 0) m = rng() & full_mask(g.num_edges());
  return edge_mask_graph(g, m);
}

}  // namespace testsupport

namespace testsupport {

// Every bipartite graph without isolated vertices and with 1..max_edges
// edges, one per isomorphism class. Grown edge by edge: each such graph minus
// any edge (and its newly isolated ends) is one edge smaller.
inline std::vector<Graph> all_bipartite_graphs(int max_edges) {
  auto key = [](const Graph& g) {
    auto d = degree_sequence(g);
    d.push_back(-g.n());
    return d;
  };
  std::vector<Graph> out;
  std::vector<Graph> level{path(2)};
  for (int m = 1; m <= max_edges; ++m) {
    out.insert(out.end(), level.begin(), level.end());
    if (m == max_edges) break;
    std::map<std::vector<int>, std::vector<Graph>> next;
    auto add = [&](const Graph& g) {
      auto& bucket = next[key(g)];
      for (const auto& h : bucket)
        if (isomorphic(g, h)) return;
      bucket.push_back(g);
    };
    for (const Graph& g : level) {
      const auto bp = *bipartition(g);
      std::vector<int> side(g.n());
      for (Vertex v : bp.b) side[v] = 1;
      std::vector<int> comp(g.n());
      const auto comps = connected_components(g);
      for (std::size_t c = 0; c < comps.size(); ++c)
        for (Vertex v : comps[c]) comp[v] = static_cast<int>(c);
      // Across components either orientation keeps the graph bipartite.
      for (int u = 0; u < g.n(); ++u)
        for (int v = u + 1; v < g.n(); ++v)
          if ((side[u] != side[v] || comp[u] != comp[v]) && !g.adjacent(u, v)) {
            auto e = g.edges();
            e.push_back({u, v});
            add(Graph(g.n(), e));
          }
      for (int u = 0; u < g.n(); ++u) {
        auto e = g.edges();
        e.push_back({u, g.n()});
        add(Graph(g.n() + 1, e));
      }
      auto e = g.edges();
      e.push_back({g.n(), g.n() + 1});
      add(Graph(g.n() + 2, e));
    }
    level.clear();
    for (auto& [k, bucket] : next)
      for (auto& g : bucket) level.push_back(std::move(g));
  }
  return out;
}

struct OracleVerdict {
  bool one_balanced = true;
  bool side_regular = true;
  bool identical = true;
};

// Screen verdicts from first principles: every edge subset of every
// component, exact rationals, plain loops.
inline OracleVerdict screen_oracle(const Graph& g) {
  OracleVerdict v;
  const auto comps = connected_components(g);
  std::vector<Graph> cg;
  for (const auto& c : comps) cg.push_back(induced_subgraph(g, c));
  for (const auto& h : cg) {
    const Rational own = make_rational(h.num_edges(), h.n() - 1);
    for (EdgeMask m = 1; m <= full_mask(h.num_edges()); ++m) {
      const Graph s = edge_mask_graph(h, m);
      if (make_rational(s.num_edges(), s.n() - 1) > own) v.one_balanced = false;
    }
    // 2-colour from vertex 0; connected, so the colouring is unique.
    std::vector<int> col(h.n(), -1);
    col[0] = 0;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& e : h.edges()) {
        if (col[e.u] >= 0 && col[e.v] < 0) col[e.v] = 1 - col[e.u], changed = true;
        if (col[e.v] >= 0 && col[e.u] < 0) col[e.u] = 1 - col[e.v], changed = true;
      }
    }
    int size[2] = {0, 0};
    for (int x : col) ++size[x];
    int delta = 0;
    for (Vertex x = 0; x < h.n(); ++x) delta = std::max(delta, h.degree(x));
    for (Vertex x = 0; x < h.n(); ++x)
      if (size[col[x]] <= size[1 - col[x]] && h.degree(x) != delta) v.side_regular = false;
  }
  for (std::size_t c = 1; c < cg.size(); ++c)
    if (!brute_isomorphic(cg[0], cg[c])) v.identical = false;
  return v;
}

}  // namespace testsupport
