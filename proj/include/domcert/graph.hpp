#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <deque>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "domcert/error.hpp"

namespace domcert {

using Vertex = int;
using EdgeMask = std::uint64_t;

/// Hard storage limits: adjacency rows and edge subsets are single 64-bit words.
inline constexpr int kMaxVertices = 64;
inline constexpr int kMaxSubsetEdges = 64;

/// Soft caps for the exponential searches; all configurable by callers.
struct Limits {
  int max_vertices = 24;
  int max_edges = 32;
  std::size_t max_automorphisms = std::size_t{1} << 20;
};

inline constexpr EdgeMask full_mask(int m) {
  return m >= 64 ? ~EdgeMask{0} : ((EdgeMask{1} << m) - 1);
}

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Bitmask over the canonical edge order of one host graph.
class EdgeSubset {
 public:
  EdgeSubset() = default;
  EdgeSubset(EdgeMask bits, int size, std::uint64_t host)
      : bits_(bits & full_mask(size)), size_(size), host_(host) {}

  EdgeMask bits() const { return bits_; }
  int size() const { return size_; }
  std::uint64_t host() const { return host_; }
  int count() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  bool full() const { return bits_ == full_mask(size_); }
  bool contains(int i) const { return (bits_ >> i) & 1U; }

  EdgeSubset with(int i) const { return {bits_ | (EdgeMask{1} << i), size_, host_}; }
  EdgeSubset without(int i) const { return {bits_ & ~(EdgeMask{1} << i), size_, host_}; }
  EdgeSubset complement() const { return {~bits_, size_, host_}; }
  EdgeSubset with_bits(EdgeMask bits) const { return {bits, size_, host_}; }

  std::vector<int> indices() const {
    std::vector<int> out;
    for (EdgeMask b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  void require_same_host(const EdgeSubset& other) const {
    if (host_ != other.host_ || size_ != other.size_)
      throw HostMismatch("edge subsets belong to different host graphs");
  }

  bool subset_of(const EdgeSubset& other) const {
    require_same_host(other);
    return (bits_ & ~other.bits_) == 0;
  }

  friend EdgeSubset operator|(const EdgeSubset& a, const EdgeSubset& b) {
    a.require_same_host(b);
    return {a.bits_ | b.bits_, a.size_, a.host_};
  }
  friend EdgeSubset operator&(const EdgeSubset& a, const EdgeSubset& b) {
    a.require_same_host(b);
    return {a.bits_ & b.bits_, a.size_, a.host_};
  }
  friend EdgeSubset operator-(const EdgeSubset& a, const EdgeSubset& b) {
    a.require_same_host(b);
    return {a.bits_ & ~b.bits_, a.size_, a.host_};
  }
  friend bool operator==(const EdgeSubset&, const EdgeSubset&) = default;

 private:
  EdgeMask bits_ = 0;
  int size_ = 0;
  std::uint64_t host_ = 0;
};

/// Finite simple undirected graph on vertices 0..n-1 with edges sorted
/// lexicographically as (u, v), u < v. Immutable once built.
class Graph {
 public:
  Graph() = default;

  /// Normalizes each pair to u < v and sorts. Rejects loops, duplicates and
  /// out-of-range endpoints with a ParseError naming the pair.
  Graph(int n, std::vector<Edge> edges, std::vector<std::string> labels = {})
      : n_(n), edges_(std::move(edges)), labels_(std::move(labels)) {
    if (n_ < 0) throw ParseError("negative vertex count");
    if (n_ > kMaxVertices)
      throw CapExceeded("graph has " + std::to_string(n_) + " vertices; storage cap is " +
                        std::to_string(kMaxVertices));
    if (!labels_.empty() && static_cast<int>(labels_.size()) != n_)
      throw ParseError("label count does not match vertex count");
    for (auto& e : edges_) {
      if (e.u == e.v)
        throw ParseError("self-loop at vertex " + std::to_string(e.u) + " in pair (" +
                         std::to_string(e.u) + "," + std::to_string(e.v) + ")");
      if (e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_)
        throw ParseError("pair (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                         ") has an endpoint outside 0.." + std::to_string(n_ - 1));
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t i = 1; i < edges_.size(); ++i) {
      if (edges_[i] == edges_[i - 1])
        throw ParseError("duplicate edge (" + std::to_string(edges_[i].u) + "," +
                         std::to_string(edges_[i].v) + ")");
    }
    index_.assign(static_cast<std::size_t>(n_) * n_, -1);
    adj_.assign(n_, 0);
    incident_.assign(n_, {});
    for (int i = 0; i < num_edges(); ++i) {
      const auto [u, v] = edges_[i];
      index_[u * n_ + v] = i;
      index_[v * n_ + u] = i;
      adj_[u] |= EdgeMask{1} << v;
      adj_[v] |= EdgeMask{1} << u;
      incident_[u].push_back(i);
      incident_[v].push_back(i);
    }
    // FNV-1a over the canonical text; used only as a cheap host identity tag.
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t x) {
      for (int b = 0; b < 8; ++b) {
        h ^= (x >> (8 * b)) & 0xffU;
        h *= 1099511628211ULL;
      }
    };
    mix(static_cast<std::uint64_t>(n_));
    for (const auto& e : edges_) mix((static_cast<std::uint64_t>(e.u) << 32) | e.v);
    fingerprint_ = h;
  }

  static Graph from_pairs(int n, std::initializer_list<std::pair<int, int>> pairs) {
    std::vector<Edge> edges;
    for (auto [u, v] : pairs) edges.push_back({u, v});
    return Graph(n, std::move(edges));
  }

  int n() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int i) const { return edges_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  int edge_index(Vertex u, Vertex v) const {
    if (u < 0 || v < 0 || u >= n_ || v >= n_) return -1;
    return index_[u * n_ + v];
  }
  bool adjacent(Vertex u, Vertex v) const { return (adj_[u] >> v) & 1U; }
  EdgeMask neighbor_mask(Vertex v) const { return adj_[v]; }
  int degree(Vertex v) const { return std::popcount(adj_[v]); }
  const std::vector<int>& incident_edges(Vertex v) const { return incident_[v]; }

  std::vector<Vertex> neighbors(Vertex v) const {
    std::vector<Vertex> out;
    for (EdgeMask b = adj_[v]; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  int max_degree() const {
    int d = 0;
    for (Vertex v = 0; v < n_; ++v) d = std::max(d, degree(v));
    return d;
  }

  void require_subset_capacity() const {
    if (num_edges() > kMaxSubsetEdges)
      throw CapExceeded("graph has " + std::to_string(num_edges()) +
                        " edges; edge subsets hold at most " + std::to_string(kMaxSubsetEdges));
  }

  EdgeSubset no_edges() const {
    require_subset_capacity();
    return {0, num_edges(), fingerprint_};
  }
  EdgeSubset all_edges() const {
    require_subset_capacity();
    return {full_mask(num_edges()), num_edges(), fingerprint_};
  }
  EdgeSubset subset(EdgeMask bits) const {
    require_subset_capacity();
    return {bits, num_edges(), fingerprint_};
  }
  EdgeSubset subset(const std::vector<int>& indices) const {
    EdgeMask bits = 0;
    for (int i : indices) {
      if (i < 0 || i >= num_edges()) throw BadParams("edge index " + std::to_string(i) + " out of range");
      bits |= EdgeMask{1} << i;
    }
    return subset(bits);
  }
  void require_host(const EdgeSubset& s) const {
    if (s.host() != fingerprint_ || s.size() != num_edges())
      throw HostMismatch("edge subset does not belong to this graph");
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::string> labels_;
  std::vector<int> index_;
  std::vector<EdgeMask> adj_;
  std::vector<std::vector<int>> incident_;
  std::uint64_t fingerprint_ = 1469598103934665603ULL;
};

/// A bijection on vertices, stored as its image array.
struct VertexPermutation {
  std::vector<Vertex> image;

  int size() const { return static_cast<int>(image.size()); }
  Vertex operator()(Vertex v) const { return image[v]; }

  static VertexPermutation identity(int n) {
    VertexPermutation p;
    p.image.resize(n);
    std::iota(p.image.begin(), p.image.end(), 0);
    return p;
  }

  bool is_bijection() const {
    std::vector<char> seen(image.size(), 0);
    for (Vertex v : image) {
      if (v < 0 || v >= size() || seen[v]) return false;
      seen[v] = 1;
    }
    return true;
  }

  /// (this ∘ other)(v) = this(other(v)).
  VertexPermutation compose(const VertexPermutation& other) const {
    VertexPermutation p;
    p.image.resize(image.size());
    for (int v = 0; v < size(); ++v) p.image[v] = image[other.image[v]];
    return p;
  }

  VertexPermutation inverse() const {
    VertexPermutation p;
    p.image.resize(image.size());
    for (int v = 0; v < size(); ++v) p.image[image[v]] = v;
    return p;
  }

  bool is_identity() const {
    for (int v = 0; v < size(); ++v)
      if (image[v] != v) return false;
    return true;
  }

  bool is_involution() const { return compose(*this).is_identity(); }

  bool is_automorphism_of(const Graph& g) const {
    if (size() != g.n() || !is_bijection()) return false;
    for (const auto& e : g.edges())
      if (!g.adjacent(image[e.u], image[e.v])) return false;
    return true;
  }

  friend auto operator<=>(const VertexPermutation&, const VertexPermutation&) = default;
};

/// Index of the image of edge `e` under a vertex map, or -1 if it is not an edge.
inline int map_edge(const Graph& g, const std::vector<Vertex>& vertex_map, int e) {
  const auto& ed = g.edge(e);
  return g.edge_index(vertex_map[ed.u], vertex_map[ed.v]);
}

/// Injective vertex map from a pattern into a host together with the host
/// edges hit by pattern edges.
struct Embedding {
  std::vector<Vertex> map;
  EdgeSubset image;
};

struct Bipartition {
  std::vector<Vertex> a;
  std::vector<Vertex> b;
};

/// Partition into maximal connected vertex sets, each sorted, ordered by
/// smallest member.
inline std::vector<std::vector<Vertex>> connected_components(const Graph& g) {
  std::vector<std::vector<Vertex>> out;
  std::vector<char> seen(g.n(), 0);
  for (Vertex s = 0; s < g.n(); ++s) {
    if (seen[s]) continue;
    std::vector<Vertex> comp;
    std::deque<Vertex> queue{s};
    seen[s] = 1;
    while (!queue.empty()) {
      Vertex v = queue.front();
      queue.pop_front();
      comp.push_back(v);
      for (Vertex w : g.neighbors(v)) {
        if (!seen[w]) {
          seen[w] = 1;
          queue.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

inline bool is_connected(const Graph& g) { return connected_components(g).size() <= 1; }

/// Two-colouring with component roots on side A; the smaller class becomes A,
/// ties going to the class holding the smallest vertex. Absent if an odd
/// cycle exists.
inline std::optional<Bipartition> bipartition(const Graph& g) {
  std::vector<int> colour(g.n(), -1);
  for (Vertex s = 0; s < g.n(); ++s) {
    if (colour[s] != -1) continue;
    colour[s] = 0;
    std::deque<Vertex> queue{s};
    while (!queue.empty()) {
      Vertex v = queue.front();
      queue.pop_front();
      for (Vertex w : g.neighbors(v)) {
        if (colour[w] == -1) {
          colour[w] = 1 - colour[v];
          queue.push_back(w);
        } else if (colour[w] == colour[v]) {
          return std::nullopt;
        }
      }
    }
  }
  Bipartition bp;
  for (Vertex v = 0; v < g.n(); ++v) (colour[v] == 0 ? bp.a : bp.b).push_back(v);
  const bool swap_sides =
      bp.a.size() > bp.b.size() ||
      (bp.a.size() == bp.b.size() && !bp.b.empty() && (bp.a.empty() || bp.b.front() < bp.a.front()));
  if (swap_sides) std::swap(bp.a, bp.b);
  return bp;
}

/// Subgraph on the same vertex set keeping the edges in `s`.
inline Graph edge_subgraph(const Graph& g, const EdgeSubset& s) {
  g.require_host(s);
  std::vector<Edge> edges;
  for (int i : s.indices()) edges.push_back(g.edge(i));
  return Graph(g.n(), std::move(edges));
}

/// Drops isolated vertices, relabelling the rest in increasing order.
/// `original[i]` is the old id of new vertex i.
struct CompactGraph {
  Graph graph;
  std::vector<Vertex> original;
};

inline CompactGraph compact(const Graph& g) {
  CompactGraph out;
  std::vector<int> relabel(g.n(), -1);
  for (Vertex v = 0; v < g.n(); ++v) {
    if (g.degree(v) > 0) {
      relabel[v] = static_cast<int>(out.original.size());
      out.original.push_back(v);
    }
  }
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) edges.push_back({relabel[e.u], relabel[e.v]});
  out.graph = Graph(static_cast<int>(out.original.size()), std::move(edges));
  return out;
}

inline CompactGraph compact_subgraph(const Graph& g, const EdgeSubset& s) {
  return compact(edge_subgraph(g, s));
}

/// Induced subgraph on `vertices` (relabelled in the given order).
inline Graph induced_subgraph(const Graph& g, const std::vector<Vertex>& vertices) {
  std::vector<int> relabel(g.n(), -1);
  for (std::size_t i = 0; i < vertices.size(); ++i) relabel[vertices[i]] = static_cast<int>(i);
  std::vector<Edge> edges;
  for (const auto& e : g.edges())
    if (relabel[e.u] >= 0 && relabel[e.v] >= 0) edges.push_back({relabel[e.u], relabel[e.v]});
  return Graph(static_cast<int>(vertices.size()), std::move(edges));
}

inline Graph disjoint_union(const Graph& a, const Graph& b) {
  std::vector<Edge> edges = a.edges();
  for (const auto& e : b.edges()) edges.push_back({e.u + a.n(), e.v + a.n()});
  return Graph(a.n() + b.n(), std::move(edges));
}

namespace detail {

// Sorted multiset of neighbour degrees, one per vertex.
inline std::vector<std::vector<int>> neighbour_degree_signature(const Graph& g) {
  std::vector<std::vector<int>> sig(g.n());
  for (Vertex v = 0; v < g.n(); ++v) {
    for (Vertex w : g.neighbors(v)) sig[v].push_back(g.degree(w));
    std::sort(sig[v].begin(), sig[v].end());
  }
  return sig;
}

}  // namespace detail

/// Every automorphism of `g`, in lexicographic order of the image array.
/// Plain backtracking with degree and neighbour-degree pruning.
inline std::vector<VertexPermutation> automorphisms(const Graph& g, const Limits& limits = {}) {
  if (g.n() > limits.max_vertices)
    throw CapExceeded("automorphism search: " + std::to_string(g.n()) + " vertices exceeds cap " +
                      std::to_string(limits.max_vertices));
  const int n = g.n();
  const auto sig = detail::neighbour_degree_signature(g);
  std::vector<std::vector<Vertex>> candidates(n);
  for (Vertex v = 0; v < n; ++v)
    for (Vertex w = 0; w < n; ++w)
      if (g.degree(v) == g.degree(w) && sig[v] == sig[w]) candidates[v].push_back(w);

  std::vector<VertexPermutation> out;
  std::vector<Vertex> image(n, -1);
  EdgeMask used = 0;

  auto recurse = [&](auto&& self, Vertex v) -> void {
    if (v == n) {
      if (out.size() >= limits.max_automorphisms)
        throw CapExceeded("automorphism count exceeds cap " + std::to_string(limits.max_automorphisms));
      out.push_back(VertexPermutation{image});
      return;
    }
    for (Vertex w : candidates[v]) {
      if ((used >> w) & 1U) continue;
      bool ok = true;
      for (Vertex u = 0; u < v && ok; ++u)
        if (g.adjacent(u, v) != g.adjacent(image[u], w)) ok = false;
      if (!ok) continue;
      image[v] = w;
      used |= EdgeMask{1} << w;
      self(self, v + 1);
      used &= ~(EdgeMask{1} << w);
      image[v] = -1;
    }
  };
  recurse(recurse, 0);
  return out;
}

struct EmbeddingOptions {
  std::size_t limit = std::numeric_limits<std::size_t>::max();
  /// Backtracking nodes before giving up; the result is then whatever was found.
  std::size_t node_budget = std::size_t{1} << 26;
};

/// Injective homomorphisms of `pattern` into `host` whose edge image contains
/// `must_cover`. Pattern vertices are placed component by component in BFS
/// order from a maximum-degree root; candidates are tried by ascending host
/// degree, then id.
inline std::vector<Embedding> subgraph_embeddings(const Graph& pattern, const Graph& host,
                                                  const EdgeSubset& must_cover,
                                                  const EmbeddingOptions& options = {}) {
  host.require_host(must_cover);
  std::vector<Embedding> out;
  const int pn = pattern.n();
  if (pn > host.n() || pattern.num_edges() > host.num_edges()) return out;
  if (options.limit == 0) return out;

  // Placement order and, for each vertex, an already placed neighbour.
  std::vector<Vertex> order;
  std::vector<Vertex> anchor(pn, -1);
  {
    std::vector<char> seen(pn, 0);
    for (const auto& comp : connected_components(pattern)) {
      Vertex root = comp.front();
      for (Vertex v : comp)
        if (pattern.degree(v) > pattern.degree(root)) root = v;
      std::deque<Vertex> queue{root};
      seen[root] = 1;
      while (!queue.empty()) {
        Vertex v = queue.front();
        queue.pop_front();
        order.push_back(v);
        for (Vertex w : pattern.neighbors(v)) {
          if (!seen[w]) {
            seen[w] = 1;
            anchor[w] = v;
            queue.push_back(w);
          }
        }
      }
    }
  }
  std::vector<int> position(pn);
  for (int i = 0; i < pn; ++i) position[order[i]] = i;

  std::vector<Vertex> by_degree(host.n());
  std::iota(by_degree.begin(), by_degree.end(), 0);
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](Vertex a, Vertex b) { return host.degree(a) < host.degree(b); });

  const EdgeMask must = must_cover.bits();
  std::vector<Vertex> map(pn, -1);
  EdgeMask used = 0;
  EdgeMask image = 0;
  std::size_t nodes = 0;
  int edges_placed = 0;

  auto uncovered_blocked = [&]() {
    EdgeMask missing = must & ~image;
    for (EdgeMask b = missing; b != 0; b &= b - 1) {
      const auto& e = host.edge(std::countr_zero(b));
      if (((used >> e.u) & 1U) && ((used >> e.v) & 1U)) return true;
    }
    return std::popcount(missing) > pattern.num_edges() - edges_placed;
  };

  auto recurse = [&](auto&& self, int depth) -> bool {
    if (++nodes > options.node_budget) return false;
    if (depth == pn) {
      if ((must & ~image) == 0) {
        out.push_back(Embedding{map, host.subset(image)});
        if (out.size() >= options.limit) return false;
      }
      return true;
    }
    const Vertex v = order[depth];
    std::vector<Vertex> cands;
    if (anchor[v] >= 0) {
      std::vector<Vertex> nb = host.neighbors(map[anchor[v]]);
      std::stable_sort(nb.begin(), nb.end(),
                       [&](Vertex a, Vertex b) { return host.degree(a) < host.degree(b); });
      cands = std::move(nb);
    } else {
      cands = by_degree;
    }
    for (Vertex w : cands) {
      if ((used >> w) & 1U) continue;
      if (host.degree(w) < pattern.degree(v)) continue;
      EdgeMask added = 0;
      int added_count = 0;
      bool ok = true;
      for (Vertex u : pattern.neighbors(v)) {
        if (position[u] >= depth) continue;
        const int idx = host.edge_index(map[u], w);
        if (idx < 0) {
          ok = false;
          break;
        }
        added |= EdgeMask{1} << idx;
        ++added_count;
      }
      if (!ok) continue;
      map[v] = w;
      used |= EdgeMask{1} << w;
      const EdgeMask saved = image;
      image |= added;
      edges_placed += added_count;
      bool keep_going = true;
      if (!uncovered_blocked()) keep_going = self(self, depth + 1);
      edges_placed -= added_count;
      image = saved;
      used &= ~(EdgeMask{1} << w);
      map[v] = -1;
      if (!keep_going) return false;
    }
    return true;
  };
  host.require_subset_capacity();
  recurse(recurse, 0);
  return out;
}

inline std::vector<int> degree_sequence(const Graph& g) {
  std::vector<int> d(g.n());
  for (Vertex v = 0; v < g.n(); ++v) d[v] = g.degree(v);
  std::sort(d.begin(), d.end());
  return d;
}

inline bool isomorphic(const Graph& a, const Graph& b) {
  if (a.n() != b.n() || a.num_edges() != b.num_edges()) return false;
  if (degree_sequence(a) != degree_sequence(b)) return false;
  if (a.num_edges() > kMaxSubsetEdges) throw CapExceeded("isomorphism test: too many edges");
  EmbeddingOptions opts;
  opts.limit = 1;
  return !subgraph_embeddings(a, b, b.no_edges(), opts).empty();
}

/// True if some injective map sends every edge of `pattern` onto an edge of `host`.
inline bool embeds_into(const Graph& pattern, const Graph& host) {
  EmbeddingOptions opts;
  opts.limit = 1;
  return !subgraph_embeddings(pattern, host, host.no_edges(), opts).empty();
}

}  // namespace domcert
