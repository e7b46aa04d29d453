#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "domcert/graph.hpp"

namespace domcert {

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw BadParams(what);
}

// Collects edges, dropping duplicates (parallel edges are simplified).
class EdgeCollector {
 public:
  void add(Vertex u, Vertex v) {
    if (u > v) std::swap(u, v);
    if (seen_.insert({u, v}).second) edges_.push_back({u, v});
  }
  Graph build(int n) const { return Graph(n, edges_); }

 private:
  std::set<std::pair<Vertex, Vertex>> seen_;
  std::vector<Edge> edges_;
};

inline std::vector<std::vector<int>> k_subsets(int t, int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == r) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < t; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace detail

/// Path on n vertices 0-1-...-(n-1).
inline Graph path(int n) {
  detail::require(n >= 1, "path needs n >= 1");
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return Graph(n, e);
}

inline Graph even_cycle(int len) {
  detail::require(len >= 4 && len % 2 == 0, "even cycle needs an even length >= 4");
  std::vector<Edge> e;
  for (int i = 0; i < len; ++i) e.push_back({i, (i + 1) % len});
  return Graph(len, e);
}

/// K_{1,d} with centre 0.
inline Graph star(int d) {
  detail::require(d >= 1, "star needs d >= 1");
  std::vector<Edge> e;
  for (int i = 1; i <= d; ++i) e.push_back({0, i});
  return Graph(d + 1, e);
}

inline Graph complete_bipartite(int s, int t) {
  detail::require(s >= 1 && t >= 1, "complete bipartite graph needs s, t >= 1");
  std::vector<Edge> e;
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < t; ++b) e.push_back({a, s + b});
  return Graph(s + t, e);
}

/// Q_n(k): vertices of the n-cube within Hamming distance k of 0, numbered by
/// ascending binary code.
inline Graph hypercube_ball(int n, int k) {
  detail::require(n >= 1 && n <= 6, "hypercube dimension must be in 1..6");
  detail::require(k >= 0 && k <= n, "ball radius must be in 0..n");
  std::vector<int> id(1 << n, -1);
  int count = 0;
  for (int c = 0; c < (1 << n); ++c)
    if (std::popcount(static_cast<unsigned>(c)) <= k) id[c] = count++;
  std::vector<Edge> e;
  for (int c = 0; c < (1 << n); ++c)
    for (int b = 0; b < n; ++b) {
      const int d = c ^ (1 << b);
      if (c < d && id[c] >= 0 && id[d] >= 0) e.push_back({id[c], id[d]});
    }
  return Graph(count, e);
}

inline Graph hypercube(int n) { return hypercube_ball(n, n); }

/// Hexagon 0..5 plus a hub 6 joined to 0, 2 and 4.
inline Graph c6_plus() {
  return Graph::from_pairs(7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {6, 0}, {6, 2}, {6, 4}});
}

/// Adds vertex n joined to every vertex of `side`.
inline Graph h_a_plus(const Graph& h, const std::vector<Vertex>& side) {
  detail::require(!side.empty(), "side must be nonempty");
  std::vector<Edge> e = h.edges();
  std::set<Vertex> seen;
  for (Vertex v : side) {
    detail::require(v >= 0 && v < h.n(), "side vertex " + std::to_string(v) + " out of range");
    detail::require(seen.insert(v).second, "side vertex " + std::to_string(v) + " repeated");
    e.push_back({v, h.n()});
  }
  return Graph(h.n() + 1, e);
}

/// h_a_plus over the smaller side of the bipartition.
inline Graph h_a_plus(const Graph& h) {
  const auto bp = bipartition(h);
  detail::require(bp.has_value(), "base graph must be bipartite");
  return h_a_plus(h, bp->a);
}

/// Each edge e = uv becomes t paths u - (n + e*t + j) - v.
inline Graph k2t_replacement(const Graph& h, int t) {
  detail::require(t >= 1, "t must be >= 1");
  std::vector<Edge> e;
  for (int i = 0; i < h.num_edges(); ++i)
    for (int j = 0; j < t; ++j) {
      const Vertex m = h.n() + i * t + j;
      e.push_back({h.edge(i).u, m});
      e.push_back({h.edge(i).v, m});
    }
  return Graph(h.n() + h.num_edges() * t, e);
}

inline Graph one_subdivision(const Graph& h) {
  std::vector<Edge> e;
  for (int i = 0; i < h.num_edges(); ++i) {
    e.push_back({h.edge(i).u, h.n() + i});
    e.push_back({h.edge(i).v, h.n() + i});
  }
  return Graph(h.n() + h.num_edges(), e);
}

/// r-subsets of [t] (first, in lexicographic order) against (t-r)-subsets,
/// joined when the smaller set is contained in the larger.
inline Graph bipartite_kneser(int t, int r) {
  detail::require(t >= 1 && t <= 12, "t must be in 1..12");
  detail::require(r >= 0 && r <= t && 2 * r != t, "r must lie in 0..t with r != t - r");
  const auto a = detail::k_subsets(t, r);
  const auto b = detail::k_subsets(t, t - r);
  std::vector<Edge> e;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const auto& small = r < t - r ? a[i] : b[j];
      const auto& large = r < t - r ? b[j] : a[i];
      if (std::includes(large.begin(), large.end(), small.begin(), small.end()))
        e.push_back({static_cast<int>(i), static_cast<int>(a.size() + j)});
    }
  return Graph(static_cast<int>(a.size() + b.size()), e);
}

/// Root 0 has d children, every other internal vertex d - 1; breadth-first
/// numbering.
inline Graph perfect_tree(int d, int depth) {
  detail::require(d >= 2, "tree degree must be >= 2");
  detail::require(depth >= 1, "tree depth must be >= 1");
  std::vector<Edge> e;
  std::vector<Vertex> level{0};
  int next = 1;
  for (int lv = 0; lv < depth; ++lv) {
    std::vector<Vertex> children;
    for (Vertex v : level) {
      const int c = lv == 0 ? d : d - 1;
      for (int i = 0; i < c; ++i) {
        e.push_back({v, next});
        children.push_back(next++);
        if (next > kMaxVertices) throw BadParams("tree exceeds the vertex storage cap");
      }
    }
    level = std::move(children);
  }
  return Graph(next, e);
}

/// H x K_{m,m}: vertex (v, i) becomes v*m + i; each edge becomes a K_{m,m}.
inline Graph tensor_kmm(const Graph& h, int m) {
  detail::require(m >= 1, "m must be >= 1");
  detail::require(h.n() * m <= kMaxVertices, "product exceeds the vertex storage cap");
  std::vector<Edge> e;
  for (const auto& ed : h.edges())
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) e.push_back({ed.u * m + i, ed.v * m + j});
  return Graph(h.n() * m, e);
}

/// K_{2,2,2}; antipodal pairs are (0,1), (2,3), (4,5).
inline Graph octahedron() {
  std::vector<Edge> e;
  for (int u = 0; u < 6; ++u)
    for (int v = u + 1; v < 6; ++v)
      if (u / 2 != v / 2) e.push_back({u, v});
  return Graph(6, e);
}

inline Graph octahedron_subdivision() { return one_subdivision(octahedron()); }

// ---------------------------------------------------------------------------
// Symmetric groups as Coxeter groups of type A.

/// Generator i (1-based) is the adjacent transposition swapping i and i+1.
struct CoxeterSpec {
  int n = 3;
  std::vector<std::vector<int>> subsets;
  int center = 1;  // 1-based part index for star replacement
};

class SymmetricGroup {
 public:
  explicit SymmetricGroup(int n) : n_(n) {
    detail::require(n >= 1 && n <= 7, "symmetric group degree must be in 1..7");
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    do {
      index_[p] = static_cast<int>(elements_.size());
      elements_.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  }

  int n() const { return n_; }
  int order() const { return static_cast<int>(elements_.size()); }
  const std::vector<int>& element(int i) const { return elements_[i]; }

  /// (a*b)(x) = a(b(x)).
  int multiply(int a, int b) const {
    std::vector<int> r(n_);
    for (int x = 0; x < n_; ++x) r[x] = elements_[a][elements_[b][x]];
    return index_.at(r);
  }

  int generator(int i) const {
    detail::require(i >= 1 && i < n_, "generator index " + std::to_string(i) + " out of range 1.." + std::to_string(n_ - 1));
    std::vector<int> p(n_);
    std::iota(p.begin(), p.end(), 0);
    std::swap(p[i - 1], p[i]);
    return index_.at(p);
  }

  int length(int a) const {
    int inv = 0;
    for (int x = 0; x < n_; ++x)
      for (int y = x + 1; y < n_; ++y)
        if (elements_[a][x] > elements_[a][y]) ++inv;
    return inv;
  }

  /// Elements of the subgroup generated by the given generators.
  std::vector<int> subgroup(const std::vector<int>& gens) const {
    std::vector<int> gen_ids;
    for (int g : gens) gen_ids.push_back(generator(g));
    std::vector<char> in(order(), 0);
    std::vector<int> out{0}, stack{0};
    in[0] = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int g : gen_ids) {
        const int y = multiply(x, g);
        if (!in[y]) {
          in[y] = 1;
          out.push_back(y);
          stack.push_back(y);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Left cosets wU of the subgroup generated by `gens`. Returns, for every
  /// element, the index of its coset; cosets are keyed by their sorted
  /// element sets and numbered by (length, lex) of the shortest member.
  std::vector<int> coset_index(const std::vector<int>& gens, int* num_cosets = nullptr) const {
    const auto sub = subgroup(gens);
    std::map<std::vector<int>, int> key_to_id;
    std::vector<std::vector<int>> members;
    std::vector<int> raw(order(), -1);
    for (int w = 0; w < order(); ++w) {
      if (raw[w] >= 0) continue;
      std::vector<int> coset;
      for (int u : sub) coset.push_back(multiply(w, u));
      std::sort(coset.begin(), coset.end());
      const int id = static_cast<int>(members.size());
      key_to_id.emplace(coset, id);
      for (int x : coset) raw[x] = id;
      members.push_back(std::move(coset));
    }
    std::vector<std::pair<std::pair<int, std::vector<int>>, int>> keyed;
    for (std::size_t c = 0; c < members.size(); ++c) {
      int best = members[c].front();
      for (int x : members[c])
        if (length(x) < length(best) || (length(x) == length(best) && elements_[x] < elements_[best])) best = x;
      keyed.push_back({{length(best), elements_[best]}, static_cast<int>(c)});
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> rank(members.size());
    for (std::size_t r = 0; r < keyed.size(); ++r) rank[keyed[r].second] = static_cast<int>(r);
    if (num_cosets) *num_cosets = static_cast<int>(members.size());
    std::vector<int> out(order());
    for (int w = 0; w < order(); ++w) out[w] = rank[raw[w]];
    return out;
  }

 private:
  int n_;
  std::vector<std::vector<int>> elements_;
  std::map<std::vector<int>, int> index_;
};

namespace detail {

inline void check_subset(const SymmetricGroup& w, const std::vector<int>& s) {
  std::set<int> seen;
  for (int g : s) {
    (void)w.generator(g);
    require(seen.insert(g).second, "generator " + std::to_string(g) + " repeated in a subset");
  }
}

inline std::vector<int> sorted_subset(std::vector<int> s) {
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace detail

/// Bipartite graph on cosets of W_1 (first) and W_2, one edge per group
/// element w joining wW_1 and wW_2, duplicates merged.
inline Graph reflection_graph(int n, const std::vector<int>& s1, const std::vector<int>& s2) {
  const SymmetricGroup w(n);
  detail::check_subset(w, s1);
  detail::check_subset(w, s2);
  int c1 = 0, c2 = 0;
  const auto i1 = w.coset_index(s1, &c1);
  const auto i2 = w.coset_index(s2, &c2);
  detail::require(c1 + c2 <= kMaxVertices, "reflection graph exceeds the vertex storage cap");
  detail::EdgeCollector edges;
  for (int x = 0; x < w.order(); ++x) edges.add(i1[x], c1 + i2[x]);
  return edges.build(c1 + c2);
}

/// A graph plus suggested layers (edge index lists) and one seed per layer.
struct HintedGraph {
  Graph graph;
  std::vector<std::vector<int>> layers;
  std::vector<int> seeds;
};

/// Replaces each hyperedge (wW_1, ..., wW_k) of the reflection hypergraph by
/// the star from wW_center to the other parts. Parts are laid out in order.
inline HintedGraph star_replacement_graph(const CoxeterSpec& params) {
  const SymmetricGroup w(params.n);
  const int k = static_cast<int>(params.subsets.size());
  detail::require(k >= 3, "star replacement needs at least three subsets");
  detail::require(params.center >= 1 && params.center <= k, "centre index must be in 1..k");
  std::set<std::vector<int>> distinct;
  for (const auto& s : params.subsets) {
    detail::check_subset(w, s);
    detail::require(distinct.insert(detail::sorted_subset(s)).second, "subsets must generate distinct subgroups");
  }
  std::vector<std::vector<int>> idx(k);
  std::vector<int> offset(k + 1, 0);
  for (int j = 0; j < k; ++j) {
    int c = 0;
    idx[j] = w.coset_index(params.subsets[j], &c);
    offset[j + 1] = offset[j] + c;
  }
  detail::require(offset[k] <= kMaxVertices, "graph exceeds the vertex storage cap");
  const int ci = params.center - 1;
  detail::EdgeCollector edges;
  for (int x = 0; x < w.order(); ++x)
    for (int j = 0; j < k; ++j)
      if (j != ci) edges.add(offset[ci] + idx[ci][x], offset[j] + idx[j][x]);
  HintedGraph out{edges.build(offset[k]), {}, {}};
  const Graph& g = out.graph;
  for (int j = 0; j < k; ++j) {
    if (j == ci) continue;
    std::vector<int> layer;
    for (int e = 0; e < g.num_edges(); ++e) {
      const auto& ed = g.edge(e);
      auto in_part = [&](Vertex v, int p) { return v >= offset[p] && v < offset[p + 1]; };
      if ((in_part(ed.u, ci) && in_part(ed.v, j)) || (in_part(ed.v, ci) && in_part(ed.u, j))) layer.push_back(e);
    }
    out.layers.push_back(std::move(layer));
    // Identity element 0 lies in coset 0 of every part.
    out.seeds.push_back(g.edge_index(offset[ci] + idx[ci][0], offset[j] + idx[j][0]));
  }
  return out;
}

}  // namespace domcert
