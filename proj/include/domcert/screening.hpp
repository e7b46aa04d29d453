#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "domcert/graph.hpp"
#include "domcert/graph_io.hpp"
#include "domcert/rational.hpp"

namespace domcert {

struct DensestSubgraph {
  Rational density;
  std::vector<Vertex> vertices;
};

inline constexpr int kMaxDensityVertices = 22;

/// max e(G[S]) / (|S| - 1) over connected vertex sets S with at least one
/// edge. Ties prefer the larger set, then the smaller bitmask.
inline DensestSubgraph max_subgraph_density(const Graph& g, int max_vertices = kMaxDensityVertices) {
  const int n = g.n();
  if (n > max_vertices)
    throw CapExceeded("densest-subgraph enumeration: " + std::to_string(n) + " vertices exceeds cap " +
                      std::to_string(max_vertices));
  if (g.num_edges() == 0) throw BadParams("densest-subgraph search needs at least one edge");
  std::uint64_t best_mask = 0;
  int best_e = 0, best_v = 0;
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t s = 1; s < limit; ++s) {
    const int v = std::popcount(s);
    if (v < 2) continue;
    int twice_e = 0;
    for (std::uint64_t b = s; b; b &= b - 1) twice_e += std::popcount(g.neighbor_mask(std::countr_zero(b)) & s);
    const int e = twice_e / 2;
    if (e < v - 1) continue;  // cannot be connected
    // Compare e/(v-1) against the incumbent before paying for connectivity.
    if (best_v != 0) {
      const long long lhs = static_cast<long long>(e) * (best_v - 1);
      const long long rhs = static_cast<long long>(best_e) * (v - 1);
      if (lhs < rhs || (lhs == rhs && v <= best_v)) continue;
    }
    std::uint64_t reach = s & (~s + 1), frontier = reach;
    while (frontier) {
      std::uint64_t next = 0;
      for (std::uint64_t b = frontier; b; b &= b - 1) next |= g.neighbor_mask(std::countr_zero(b));
      next &= s & ~reach;
      reach |= next;
      frontier = next;
    }
    if (reach != s) continue;
    best_mask = s;
    best_e = e;
    best_v = v;
  }
  DensestSubgraph out{make_rational(best_e, best_v - 1), {}};
  for (std::uint64_t b = best_mask; b; b &= b - 1) out.vertices.push_back(std::countr_zero(b));
  return out;
}

enum class ScreenReason { kIsolatedVertex, kNotBipartite, kNotOneBalanced, kSideIrregular, kComponentsDiffer };

inline const char* reason_code(ScreenReason r) {
  switch (r) {
    case ScreenReason::kIsolatedVertex: return "ISOLATED_VERTEX";
    case ScreenReason::kNotBipartite: return "NOT_BIPARTITE";
    case ScreenReason::kNotOneBalanced: return "NOT_ONE_BALANCED";
    case ScreenReason::kSideIrregular: return "SIDE_IRREGULAR";
    case ScreenReason::kComponentsDiffer: return "COMPONENTS_DIFFER";
  }
  return "UNKNOWN";
}

struct ScreenFailure {
  ScreenReason reason;
  std::vector<Vertex> witness;
  std::string detail;
};

struct ScreeningReport {
  bool bipartite = false;
  bool one_balanced = false;
  bool small_side_regular = false;
  bool components_identical = false;
  /// False when the densest-subgraph check was skipped for size.
  bool density_checked = true;
  std::vector<ScreenFailure> failures;
  /// Degrees on the larger side of each component's bipartition, sorted.
  std::vector<int> larger_side_degrees;

  bool pass() const { return failures.empty(); }
  bool has(ScreenReason r) const {
    for (const auto& f : failures)
      if (f.reason == r) return true;
    return false;
  }
};

namespace detail {

// Vertices of an odd cycle, assuming g is not bipartite.
inline std::vector<Vertex> odd_cycle(const Graph& g) {
  const int n = g.n();
  std::vector<int> colour(n, -1), parent(n, -1), depth(n, 0);
  for (Vertex s = 0; s < n; ++s) {
    if (colour[s] >= 0) continue;
    colour[s] = 0;
    std::deque<Vertex> q{s};
    while (!q.empty()) {
      const Vertex v = q.front();
      q.pop_front();
      for (Vertex w : g.neighbors(v)) {
        if (colour[w] < 0) {
          colour[w] = 1 - colour[v];
          parent[w] = v;
          depth[w] = depth[v] + 1;
          q.push_back(w);
        } else if (colour[w] == colour[v]) {
          std::vector<Vertex> a{v}, b{w};
          Vertex x = v, y = w;
          while (x != y) {
            if (depth[x] >= depth[y]) {
              x = parent[x];
              a.push_back(x);
            } else {
              y = parent[y];
              b.push_back(y);
            }
          }
          b.pop_back();
          a.insert(a.end(), b.rbegin(), b.rend());
          return a;
        }
      }
    }
  }
  return {};
}

}  // namespace detail

/// Necessary conditions for domination: bipartite, 1-balanced (per
/// component), the smaller side regular at the maximum degree, and all
/// components isomorphic.
inline ScreeningReport screen(const Graph& g, int max_density_vertices = kMaxDensityVertices) {
  ScreeningReport rep;
  std::vector<Vertex> isolated;
  for (Vertex v = 0; v < g.n(); ++v)
    if (g.degree(v) == 0) isolated.push_back(v);
  if (g.n() == 0 || !isolated.empty()) {
    rep.failures.push_back({ScreenReason::kIsolatedVertex, isolated,
                            g.n() == 0 ? "graph has no vertices" : "graph has isolated vertices"});
    return rep;
  }
  const auto comps = connected_components(g);
  std::vector<Graph> comp_graphs;
  for (const auto& c : comps) comp_graphs.push_back(induced_subgraph(g, c));

  const auto bp = bipartition(g);
  rep.bipartite = bp.has_value();
  if (!rep.bipartite)
    rep.failures.push_back({ScreenReason::kNotBipartite, detail::odd_cycle(g), "odd cycle"});

  rep.one_balanced = true;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const Graph& h = comp_graphs[c];
    if (h.n() > max_density_vertices) {
      rep.density_checked = false;
      continue;
    }
    const auto best = max_subgraph_density(h, max_density_vertices);
    const Rational own = make_rational(h.num_edges(), h.n() - 1);
    if (best.density > own) {
      rep.one_balanced = false;
      std::vector<Vertex> w;
      for (Vertex v : best.vertices) w.push_back(comps[c][v]);
      rep.failures.push_back({ScreenReason::kNotOneBalanced, w,
                              "subgraph density " + to_string(best.density) + " exceeds " + to_string(own)});
    }
  }

  rep.small_side_regular = rep.bipartite;
  if (rep.bipartite) {
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const Graph& h = comp_graphs[c];
      const auto cb = *bipartition(h);
      const int delta = h.max_degree();
      std::vector<Vertex> bad;
      for (const auto* side : {&cb.a, &cb.b}) {
        const auto* other = side == &cb.a ? &cb.b : &cb.a;
        if (side->size() > other->size()) continue;
        for (Vertex v : *side)
          if (h.degree(v) != delta) bad.push_back(comps[c][v]);
      }
      const auto& larger = cb.a.size() > cb.b.size() ? cb.a : cb.b;
      for (Vertex v : larger) rep.larger_side_degrees.push_back(h.degree(v));
      if (!bad.empty()) {
        rep.small_side_regular = false;
        std::sort(bad.begin(), bad.end());
        rep.failures.push_back({ScreenReason::kSideIrregular, bad,
                                "smaller side has vertices below the maximum degree " + std::to_string(delta)});
      }
    }
    std::sort(rep.larger_side_degrees.begin(), rep.larger_side_degrees.end());
  }

  rep.components_identical = true;
  for (std::size_t c = 1; c < comps.size(); ++c) {
    if (!isomorphic(comp_graphs[0], comp_graphs[c])) {
      rep.components_identical = false;
      rep.failures.push_back({ScreenReason::kComponentsDiffer, comps[c],
                              "component " + std::to_string(c) + " is not isomorphic to component 0"});
      break;
    }
  }
  return rep;
}

inline Json screen_to_json(const ScreeningReport& rep) {
  Json fails = Json::array();
  for (const auto& f : rep.failures)
    fails.push_back({{"reason", reason_code(f.reason)}, {"witness", f.witness}, {"detail", f.detail}});
  return Json{{"overall", rep.pass() ? "PASS" : "FAIL"},
              {"bipartite", rep.bipartite},
              {"one_balanced", rep.one_balanced},
              {"density_checked", rep.density_checked},
              {"small_side_regular", rep.small_side_regular},
              {"components_identical", rep.components_identical},
              {"larger_side_degrees", rep.larger_side_degrees},
              {"failures", fails}};
}

}  // namespace domcert
