#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "domcert/graph.hpp"
#include "domcert/graph_io.hpp"

namespace domcert {

/// An involutive automorphism whose fixed set separates the remaining
/// vertices into two mirror halves with no edges between them.
struct CutInvolution {
  VertexPermutation perm;
  std::vector<Vertex> fixed;
  std::vector<Vertex> left;
  std::vector<Vertex> right;
  bool stable = false;  // fixed set is independent

  friend bool operator==(const CutInvolution&, const CutInvolution&) = default;
};

enum class Side { kLeft, kRight };

inline Side opposite(Side s) { return s == Side::kLeft ? Side::kRight : Side::kLeft; }
inline const char* side_name(Side s) { return s == Side::kLeft ? "L" : "R"; }

inline Side parse_side(const std::string& s) {
  if (s == "L") return Side::kLeft;
  if (s == "R") return Side::kRight;
  throw ParseError("side must be \"L\" or \"R\", got \"" + s + "\"");
}

/// A half-folding map: fixes one half and the cut, reflects the other half
/// onto it. `edge_map[e]` is the index of the image of edge e.
struct HalfFold {
  CutInvolution base;
  Side side = Side::kLeft;
  std::vector<Vertex> vertex_map;
  std::vector<int> edge_map;
  std::uint64_t host = 0;
  int host_edges = 0;
};

inline HalfFold make_half_fold(const Graph& g, const CutInvolution& phi, Side side) {
  HalfFold h;
  h.base = phi;
  h.side = side;
  h.host = g.fingerprint();
  h.host_edges = g.num_edges();
  h.vertex_map.resize(g.n());
  std::iota(h.vertex_map.begin(), h.vertex_map.end(), 0);
  const auto& moved = side == Side::kLeft ? phi.right : phi.left;
  for (Vertex v : moved) h.vertex_map[v] = phi.perm(v);
  h.edge_map.resize(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    h.edge_map[e] = map_edge(g, h.vertex_map, e);
    if (h.edge_map[e] < 0) throw BadParams("half-fold does not map edges to edges; not a cut involution");
  }
  return h;
}

inline HalfFold conjugate(const Graph& g, const HalfFold& psi) { return make_half_fold(g, psi.base, opposite(psi.side)); }

/// {e : psi(e) in j}.
inline EdgeSubset fold(const EdgeSubset& j, const HalfFold& psi) {
  if (j.host() != psi.host || j.size() != psi.host_edges)
    throw HostMismatch("edge subset and half-fold belong to different graphs");
  EdgeMask out = 0;
  for (int e = 0; e < psi.host_edges; ++e)
    if (j.contains(psi.edge_map[e])) out |= EdgeMask{1} << e;
  return j.with_bits(out);
}

/// Rechecks conditions (i)-(iii) and the recorded split from scratch.
/// Returns the list of violated clauses (empty when valid).
inline std::vector<std::string> validate_cut_involution(const Graph& g, const CutInvolution& phi) {
  std::vector<std::string> bad;
  const int n = g.n();
  if (phi.perm.size() != n || !phi.perm.is_bijection()) {
    bad.push_back("perm is not a bijection on the vertex set");
    return bad;
  }
  if (!phi.perm.is_automorphism_of(g)) bad.push_back("perm is not an automorphism");
  if (!phi.perm.is_involution()) bad.push_back("perm is not an involution");
  std::vector<int> role(n, -1);  // 0 fixed, 1 left, 2 right
  auto mark = [&](const std::vector<Vertex>& vs, int r, const char* name) {
    for (Vertex v : vs) {
      if (v < 0 || v >= n) {
        bad.push_back(std::string(name) + " set has out-of-range vertex");
        continue;
      }
      if (role[v] != -1) bad.push_back("vertex " + std::to_string(v) + " appears in two of fixed/left/right");
      role[v] = r;
    }
  };
  mark(phi.fixed, 0, "fixed");
  mark(phi.left, 1, "left");
  mark(phi.right, 2, "right");
  if (!bad.empty()) return bad;
  for (Vertex v = 0; v < n; ++v) {
    if (role[v] == -1) bad.push_back("vertex " + std::to_string(v) + " is in none of fixed/left/right");
    else if ((phi.perm(v) == v) != (role[v] == 0))
      bad.push_back("fixed set differs from the fixed points of perm at vertex " + std::to_string(v));
    else if (role[v] != 0 && role[phi.perm(v)] != 3 - role[v])
      bad.push_back("perm does not swap left and right at vertex " + std::to_string(v));
  }
  if (phi.fixed.empty()) bad.push_back("fixed set is empty, not a vertex cut");
  if (phi.left.empty()) bad.push_back("no vertices outside the fixed set");
  for (const auto& e : g.edges())
    if (role[e.u] > 0 && role[e.v] > 0 && role[e.u] != role[e.v])
      bad.push_back("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") joins left and right");
  bool independent = true;
  for (const auto& e : g.edges())
    if (role[e.u] == 0 && role[e.v] == 0) independent = false;
  if (independent != phi.stable) bad.push_back("stable flag does not match independence of the fixed set");
  return bad;
}

/// All cut involutions with the canonical split: components of g - F are
/// paired by the involution and the one holding the smaller vertex goes left.
inline std::vector<CutInvolution> find_cut_involutions(const Graph& g, const Limits& limits = {}) {
  std::vector<CutInvolution> out;
  for (const auto& p : automorphisms(g, limits)) {
    if (p.is_identity() || !p.is_involution()) continue;
    CutInvolution phi;
    phi.perm = p;
    std::vector<Vertex> rest;
    for (Vertex v = 0; v < g.n(); ++v) (p(v) == v ? phi.fixed : rest).push_back(v);
    if (phi.fixed.empty()) continue;
    const Graph sub = induced_subgraph(g, rest);
    std::vector<int> comp_of(g.n(), -1);
    const auto comps = connected_components(sub);
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (Vertex v : comps[c]) comp_of[rest[v]] = static_cast<int>(c);
    bool ok = true;
    std::vector<char> is_left(comps.size(), 0);
    for (std::size_t c = 0; c < comps.size() && ok; ++c) {
      const int partner = comp_of[p(rest[comps[c].front()])];
      if (partner == static_cast<int>(c)) ok = false;
      // Components are listed by smallest member, so the earlier one of a pair goes left.
      if (partner > static_cast<int>(c)) is_left[c] = 1;
    }
    if (!ok) continue;
    for (Vertex v : rest) (is_left[comp_of[v]] ? phi.left : phi.right).push_back(v);
    phi.stable = true;
    for (const auto& e : g.edges())
      if (p(e.u) == e.u && p(e.v) == e.v) phi.stable = false;
    out.push_back(std::move(phi));
  }
  return out;
}

/// Orbits of E(g) under the group generated by the given involutions,
/// each sorted, ordered by smallest edge index.
inline std::vector<std::vector<int>> edge_orbits(const Graph& g, const std::vector<CutInvolution>& phi_set) {
  const int m = g.num_edges();
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& phi : phi_set)
    for (int e = 0; e < m; ++e) {
      const int img = map_edge(g, phi.perm.image, e);
      if (img < 0) throw BadParams("involution does not preserve the edge set");
      const int a = find(e), b = find(img);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::vector<int>> orbits;
  std::vector<int> slot(m, -1);
  for (int e = 0; e < m; ++e) {
    const int r = find(e);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(orbits.size());
      orbits.emplace_back();
    }
    orbits[slot[r]].push_back(e);
  }
  return orbits;
}

inline Json involution_to_json(const CutInvolution& phi) {
  return Json{{"perm", phi.perm.image},
              {"fixed", phi.fixed},
              {"left", phi.left},
              {"right", phi.right},
              {"stable", phi.stable}};
}

inline bool fixed_set_independent(const Graph& g, const std::vector<Vertex>& fixed) {
  EdgeMask in = 0;
  for (Vertex v : fixed)
    if (v >= 0 && v < g.n()) in |= EdgeMask{1} << v;
  for (Vertex v : fixed)
    if (v >= 0 && v < g.n() && (g.neighbor_mask(v) & in)) return false;
  return true;
}

/// A missing "stable" field is derived from `g` when it is given.
inline CutInvolution involution_from_json(const Json& j, const Graph* g = nullptr) {
  try {
    CutInvolution phi;
    phi.perm.image = j.at("perm").get<std::vector<Vertex>>();
    phi.fixed = j.at("fixed").get<std::vector<Vertex>>();
    phi.left = j.at("left").get<std::vector<Vertex>>();
    phi.right = j.at("right").get<std::vector<Vertex>>();
    if (j.contains("stable"))
      phi.stable = j.at("stable").get<bool>();
    else
      phi.stable = g != nullptr && fixed_set_independent(*g, phi.fixed);
    return phi;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed involution: ") + e.what());
  }
}

}  // namespace domcert
