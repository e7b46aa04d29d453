#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "domcert/falsify.hpp"
#include "domcert/graph_io.hpp"
#include "domcert/involution.hpp"
#include "domcert/percolation.hpp"
#include "domcert/screening.hpp"

namespace domcert {

enum class RelocationKind { kIsoCopy, kStarUnion, kRecursiveSuper, kAsserted };
enum class CertMode { kDominating, kStrong };

inline const char* kind_name(RelocationKind k) {
  switch (k) {
    case RelocationKind::kIsoCopy: return "ISO_COPY";
    case RelocationKind::kStarUnion: return "STAR_UNION";
    case RelocationKind::kRecursiveSuper: return "RECURSIVE_SUPER";
    case RelocationKind::kAsserted: return "ASSERTED";
  }
  return "?";
}

inline RelocationKind parse_kind(const std::string& s) {
  if (s == "ISO_COPY") return RelocationKind::kIsoCopy;
  if (s == "STAR_UNION") return RelocationKind::kStarUnion;
  if (s == "RECURSIVE_SUPER") return RelocationKind::kRecursiveSuper;
  if (s == "ASSERTED") return RelocationKind::kAsserted;
  throw ParseError("unknown relocation kind " + s);
}

inline const char* mode_name(CertMode m) { return m == CertMode::kStrong ? "STRONG" : "DOMINATING"; }

inline CertMode parse_mode(const std::string& s) {
  if (s == "DOMINATING") return CertMode::kDominating;
  if (s == "STRONG") return CertMode::kStrong;
  throw ParseError("unknown certificate mode " + s);
}

struct Certificate;

/// A certificate for `graph`, and an isomorphism `map` from `graph` onto the
/// relocation inside the host.
struct SubCertificate {
  Graph graph;
  std::vector<Vertex> map;
  std::shared_ptr<const Certificate> certificate;
};

struct StarPiece {
  Vertex center = 0;
  std::vector<int> edges;
};

/// Evidence that the edge set `edges` dominates the union of layers I and
/// holds more than |I| seeds. `embedding` maps the vertices of the compacted
/// union of layers (in increasing original order) into the host.
struct RelocationWitness {
  std::vector<int> layer_subset;
  RelocationKind kind = RelocationKind::kIsoCopy;
  std::vector<Vertex> embedding;
  std::vector<int> seeds_covered;
  std::vector<int> edges;
  std::vector<StarPiece> stars;
  std::optional<SubCertificate> sub;
};

struct Certificate {
  std::string graph_sha;
  std::vector<std::vector<int>> layers;
  std::vector<CutInvolution> phi;
  std::vector<int> seeds;
  Signature signature;
  std::vector<RelocationWitness> relocations;
  CertMode mode = CertMode::kDominating;
};

inline LayerStructure layer_structure(const Graph& g, const Certificate& c) {
  LayerStructure ls;
  for (const auto& l : c.layers) ls.layers.push_back(g.subset(l));
  ls.phi = c.phi;
  ls.seeds = c.seeds;
  return ls;
}

// ---------------------------------------------------------------------------
// JSON

inline Json certificate_to_json(const Certificate& c);

inline Json witness_to_json(const RelocationWitness& w) {
  Json j{{"I", w.layer_subset},
         {"kind", kind_name(w.kind)},
         {"embedding", w.embedding},
         {"seeds_covered", w.seeds_covered},
         {"edges", w.edges}};
  if (!w.stars.empty()) {
    Json stars = Json::array();
    for (const auto& s : w.stars) stars.push_back(Json::array({s.center, s.edges}));
    j["stars"] = std::move(stars);
  }
  if (w.sub)
    j["sub_certificate"] = {{"graph", graph_to_json(w.sub->graph)},
                            {"map", w.sub->map},
                            {"certificate", certificate_to_json(*w.sub->certificate)}};
  return j;
}

inline Json certificate_to_json(const Certificate& c) {
  Json phi = Json::array();
  for (const auto& p : c.phi) phi.push_back(involution_to_json(p));
  Json rel = Json::array();
  for (const auto& w : c.relocations) rel.push_back(witness_to_json(w));
  return Json{{"graph_sha", c.graph_sha},
              {"layers", c.layers},
              {"phi", std::move(phi)},
              {"seeds", c.seeds},
              {"signature", signature_to_json(c.signature)},
              {"relocations", std::move(rel)},
              {"mode", mode_name(c.mode)}};
}

/// `g`, when given, fills in omitted involution stability flags.
inline Certificate certificate_from_json(const Json& j, const Graph* g = nullptr) {
  try {
    Certificate c;
    c.graph_sha = j.at("graph_sha").get<std::string>();
    c.layers = j.at("layers").get<std::vector<std::vector<int>>>();
    for (const auto& p : j.at("phi")) c.phi.push_back(involution_from_json(p, g));
    c.seeds = j.at("seeds").get<std::vector<int>>();
    c.signature = signature_from_json(j.at("signature"));
    c.mode = parse_mode(j.value("mode", std::string("DOMINATING")));
    for (const auto& r : j.at("relocations")) {
      RelocationWitness w;
      w.layer_subset = r.at("I").get<std::vector<int>>();
      w.kind = parse_kind(r.at("kind").get<std::string>());
      w.embedding = r.value("embedding", std::vector<Vertex>{});
      w.seeds_covered = r.value("seeds_covered", std::vector<int>{});
      w.edges = r.value("edges", std::vector<int>{});
      if (r.contains("stars"))
        for (const auto& s : r.at("stars")) w.stars.push_back({s.at(0).get<Vertex>(), s.at(1).get<std::vector<int>>()});
      if (r.contains("sub_certificate")) {
        const auto& sc = r.at("sub_certificate");
        SubCertificate sub;
        sub.graph = graph_from_json(sc.at("graph"));
        sub.map = sc.at("map").get<std::vector<Vertex>>();
        sub.certificate = std::make_shared<Certificate>(certificate_from_json(sc.at("certificate"), &sub.graph));
        w.sub = std::move(sub);
      }
      c.relocations.push_back(std::move(w));
    }
    return c;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed certificate: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Witness checks shared by search and verification

struct VerifyOptions {
  bool allow_asserted = false;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  int max_depth = 4;
  /// Budget for the numeric spot check of asserted witnesses.
  int asserted_restarts = 16;
  int asserted_iterations = 300;
};

struct Clause {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct VerifyReport {
  std::vector<Clause> clauses;
  bool sound = true;  // no asserted witnesses relied upon

  bool ok() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.pass; });
  }
  std::vector<Clause> failures() const {
    std::vector<Clause> out;
    for (const auto& c : clauses)
      if (!c.pass) out.push_back(c);
    return out;
  }
};

inline VerifyReport verify_certificate(const Graph& g, const Certificate& cert, const VerifyOptions& opts = {},
                                       int depth = 0);

namespace detail {

inline std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline bool is_star(const Graph& c, int* center, int* s) {
  if (c.num_edges() < 1 || c.n() != c.num_edges() + 1) return false;
  for (Vertex v = 0; v < c.n(); ++v)
    if (c.degree(v) == c.num_edges()) {
      *center = v;
      *s = c.num_edges();
      return true;
    }
  return false;
}

// Shape of the pattern when it is a disjoint union of equal stars K_{1,s}
// with s >= 2: returns s, or 0.
inline int equal_star_size(const Graph& pattern) {
  int s = 0;
  for (const auto& comp : connected_components(pattern)) {
    const Graph c = induced_subgraph(pattern, comp);
    int center = 0, size = 0;
    if (!is_star(c, &center, &size) || size < 2) return 0;
    if (s != 0 && size != s) return 0;
    s = size;
  }
  return s;
}

// Edge-disjoint stars of size s whose leaf-sharing pattern is either a lone
// star or a hub sharing exactly t leaves with each other star, the others
// pairwise leaf-disjoint, and no centre being a leaf.
inline std::optional<std::string> check_star_shape(const Graph& g, const std::vector<StarPiece>& stars, int s) {
  std::set<int> used;
  std::vector<EdgeMask> leaves(stars.size(), 0);
  EdgeMask centers = 0;
  for (std::size_t i = 0; i < stars.size(); ++i) {
    const auto& st = stars[i];
    if (st.center < 0 || st.center >= g.n()) return "star centre out of range";
    if (static_cast<int>(st.edges.size()) != s) return "star " + std::to_string(i) + " does not have " + std::to_string(s) + " edges";
    for (int e : st.edges) {
      if (e < 0 || e >= g.num_edges()) return "star edge out of range";
      if (!used.insert(e).second) return "stars are not edge-disjoint (edge " + std::to_string(e) + ")";
      const auto& ed = g.edge(e);
      if (ed.u != st.center && ed.v != st.center) return "edge " + std::to_string(e) + " does not touch its star centre";
      leaves[i] |= EdgeMask{1} << (ed.u == st.center ? ed.v : ed.u);
    }
    centers |= EdgeMask{1} << st.center;
  }
  for (std::size_t i = 0; i < stars.size(); ++i)
    if (leaves[i] & centers) return "a star centre is a leaf of star " + std::to_string(i);
  // Components of the leaf-sharing relation.
  const int c = static_cast<int>(stars.size());
  std::vector<int> comp(c, -1);
  for (int i = 0; i < c; ++i) {
    if (comp[i] >= 0) continue;
    std::vector<int> stack{i};
    comp[i] = i;
    std::vector<int> members;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      members.push_back(x);
      for (int y = 0; y < c; ++y)
        if (comp[y] < 0 && (leaves[x] & leaves[y])) {
          comp[y] = i;
          stack.push_back(y);
        }
    }
    if (members.size() == 1) continue;
    int hub = -1;
    for (int x : members) {
      bool shares_all = true;
      for (int y : members)
        if (y != x && !(leaves[x] & leaves[y])) shares_all = false;
      if (shares_all) {
        hub = x;
        break;
      }
    }
    if (hub < 0) return "a group of overlapping stars has no hub";
    int t = -1;
    for (int x : members) {
      if (x == hub) continue;
      const int shared = std::popcount(leaves[x] & leaves[hub]);
      if (t >= 0 && shared != t) return "stars share unequal numbers of leaves with the hub";
      t = shared;
      for (int y : members)
        if (y != hub && y != x && (leaves[x] & leaves[y])) return "two non-hub stars share a leaf";
    }
  }
  return std::nullopt;
}

inline std::vector<int> seeds_in(const std::vector<int>& seeds, const std::vector<int>& edges) {
  std::vector<int> out;
  for (int s : seeds)
    if (std::find(edges.begin(), edges.end(), s) != edges.end()) out.push_back(s);
  std::sort(out.begin(), out.end());
  return out;
}

// Every pattern edge, mapped per component injectively, lands in `allowed`.
inline std::optional<std::string> check_component_map(const Graph& g, const Graph& pattern,
                                                      const std::vector<Vertex>& map, const std::set<int>& allowed,
                                                      bool globally_injective) {
  if (static_cast<int>(map.size()) != pattern.n()) return "embedding has the wrong length";
  for (Vertex v : map)
    if (v < 0 || v >= g.n()) return "embedding maps outside the host";
  auto injective_on = [&](const std::vector<Vertex>& vs) {
    std::set<Vertex> seen;
    for (Vertex v : vs)
      if (!seen.insert(map[v]).second) return false;
    return true;
  };
  if (globally_injective) {
    std::vector<Vertex> all(pattern.n());
    std::iota(all.begin(), all.end(), 0);
    if (!injective_on(all)) return "embedding is not injective";
  } else {
    for (const auto& comp : connected_components(pattern))
      if (!injective_on(comp)) return "embedding is not injective on a component";
  }
  for (const auto& e : pattern.edges()) {
    const int idx = g.edge_index(map[e.u], map[e.v]);
    if (idx < 0) return "embedding sends a pattern edge to a non-edge";
    if (!allowed.count(idx)) return "embedding leaves the relocation edge set";
  }
  return std::nullopt;
}

}  // namespace detail

/// Independent check of one relocation witness.
inline std::optional<std::string> check_witness(const Graph& g, const LayerStructure& ls, const RelocationWitness& w,
                                                CertMode mode, const VerifyOptions& opts, int depth,
                                                bool* used_asserted = nullptr) {
  const int k = ls.k();
  std::set<int> iset(w.layer_subset.begin(), w.layer_subset.end());
  if (iset.empty() || static_cast<int>(iset.size()) >= k) return "layer subset must be nonempty and proper";
  if (static_cast<int>(iset.size()) != static_cast<int>(w.layer_subset.size())) return "layer subset repeats an index";
  for (int i : iset)
    if (i < 0 || i >= k) return "layer index out of range";
  std::set<int> edge_set(w.edges.begin(), w.edges.end());
  if (edge_set.size() != w.edges.size()) return "relocation edges repeat";
  for (int e : edge_set)
    if (e < 0 || e >= g.num_edges()) return "relocation edge out of range";
  const auto covered = detail::seeds_in(ls.seeds, w.edges);
  auto claimed = w.seeds_covered;
  std::sort(claimed.begin(), claimed.end());
  if (claimed != covered) return "seeds_covered does not match the seeds inside the relocation";
  if (static_cast<int>(covered.size()) <= static_cast<int>(iset.size()))
    return "relocation holds " + std::to_string(covered.size()) + " seeds, needs more than " +
           std::to_string(iset.size());
  const auto pattern = compact_subgraph(g, ls.union_of(std::vector<int>(iset.begin(), iset.end())));
  if (mode == CertMode::kStrong && w.kind != RelocationKind::kIsoCopy && w.kind != RelocationKind::kRecursiveSuper)
    return std::string("kind ") + kind_name(w.kind) + " is not allowed in STRONG mode";

  switch (w.kind) {
    case RelocationKind::kIsoCopy: {
      if (auto bad = detail::check_component_map(g, pattern.graph, w.embedding, edge_set, true)) return bad;
      if (static_cast<int>(edge_set.size()) != pattern.graph.num_edges()) return "image is not exactly the relocation";
      return std::nullopt;
    }
    case RelocationKind::kStarUnion: {
      const int s = detail::equal_star_size(pattern.graph);
      if (s == 0) return "layers are not a disjoint union of equal stars with at least two edges";
      const auto comps = connected_components(pattern.graph);
      if (w.stars.size() != comps.size()) return "star count differs from the layer union";
      if (auto bad = detail::check_star_shape(g, w.stars, s)) return bad;
      std::set<int> star_edges;
      for (const auto& st : w.stars) star_edges.insert(st.edges.begin(), st.edges.end());
      if (star_edges != edge_set) return "stars do not cover exactly the relocation edges";
      return std::nullopt;
    }
    case RelocationKind::kRecursiveSuper: {
      if (!w.sub || !w.sub->certificate) return "missing sub-certificate";
      if (depth + 1 > opts.max_depth) return "sub-certificate nesting exceeds the depth cap";
      const auto& sub = *w.sub;
      if (static_cast<int>(edge_set.size()) >= g.num_edges()) return "relocation must be a proper subgraph";
      if (auto bad = detail::check_component_map(g, sub.graph, sub.map, edge_set, true))
        return "sub-certificate map: " + *bad;
      if (sub.graph.num_edges() != static_cast<int>(edge_set.size())) return "sub-certificate graph is not the relocation";
      if (auto bad = detail::check_component_map(g, pattern.graph, w.embedding, edge_set, false))
        return "layer embedding: " + *bad;
      if (mode == CertMode::kStrong && sub.certificate->mode != CertMode::kStrong)
        return "STRONG certificate relies on a non-strong sub-certificate";
      try {
        const auto rep = verify_certificate(sub.graph, *sub.certificate, opts, depth + 1);
        if (!rep.ok()) return "sub-certificate fails: " + rep.failures().front().name + " " + rep.failures().front().detail;
        if (!rep.sound && used_asserted) *used_asserted = true;
      } catch (const HashMismatch& e) {
        return std::string("sub-certificate: ") + e.what();
      }
      return std::nullopt;
    }
    case RelocationKind::kAsserted: {
      if (!opts.allow_asserted) return "asserted witnesses need explicit permission";
      if (used_asserted) *used_asserted = true;
      if (edge_set.empty()) return "asserted relocation is empty";
      const auto reloc = compact_subgraph(g, g.subset(std::vector<int>(edge_set.begin(), edge_set.end())));
      FalsifyTask task;
      task.h = reloc.graph;
      task.hprime = pattern.graph;
      task.restarts = opts.asserted_restarts;
      task.iterations = opts.asserted_iterations;
      task.seed = opts.seed;
      if (falsify(task).counterexample) return "numeric search refutes the asserted domination";
      return std::nullopt;
    }
  }
  return "unknown witness kind";
}

/// Rechecks every clause of a certificate from scratch.
inline VerifyReport verify_certificate(const Graph& g, const Certificate& cert, const VerifyOptions& opts, int depth) {
  if (cert.graph_sha != graph_sha(g))
    throw HashMismatch("certificate hash " + cert.graph_sha + " does not match graph hash " + graph_sha(g));
  VerifyReport rep;
  auto add = [&](std::string name, bool pass, std::string detail = {}) {
    rep.clauses.push_back({std::move(name), pass, std::move(detail)});
  };
  add("hash", true);
  if (g.num_edges() > kMaxSubsetEdges) {
    add("capacity", false, "graph has too many edges for edge subsets");
    return rep;
  }
  std::vector<std::string> inv_bad;
  for (std::size_t p = 0; p < cert.phi.size(); ++p)
    for (const auto& why : validate_cut_involution(g, cert.phi[p]))
      inv_bad.push_back("involution " + std::to_string(p) + ": " + why);
  add("involutions", inv_bad.empty(), inv_bad.empty() ? "" : inv_bad.front());
  if (!inv_bad.empty()) return rep;

  LayerStructure ls;
  try {
    ls = layer_structure(g, cert);
  } catch (const Error& e) {
    add("layers", false, e.what());
    return rep;
  }
  const auto lr = validate_layers(g, ls);
  add("layers", lr.ok, lr.ok ? "" : lr.failures.front());
  if (!lr.ok) return rep;

  try {
    const EdgeSubset end = replay(g, ls.seed_set(), ls, cert.signature);
    add("replay", end.full(), end.full() ? "" : "seeds replay to " + std::to_string(end.count()) + " of " +
                                                    std::to_string(g.num_edges()) + " edges");
    const auto mp = check_multiperc(g, ls, cert.signature, opts.trials, opts.seed);
    add("multiperc", mp.ok,
        std::string(mp.exhaustive ? "exhaustive, " : "sampled, ") + std::to_string(mp.checked) + " starting sets");
  } catch (const BadSignatureIndex& e) {
    add("replay", false, e.what());
    return rep;
  }

  // One valid witness for every nonempty proper layer subset.
  const int k = ls.k();
  std::map<std::vector<int>, const RelocationWitness*> by_subset;
  for (const auto& w : cert.relocations) {
    auto key = w.layer_subset;
    std::sort(key.begin(), key.end());
    by_subset.emplace(key, &w);
  }
  for (std::uint32_t mask = 1; k <= 20 && mask + 1 < (std::uint32_t{1} << k); ++mask) {
    std::vector<int> iset;
    for (int i = 0; i < k; ++i)
      if ((mask >> i) & 1U) iset.push_back(i);
    const std::string name = "relocation I={" + detail::join(iset) + "}";
    const auto it = by_subset.find(iset);
    if (it == by_subset.end()) {
      add(name, false, "no witness");
      continue;
    }
    bool asserted = false;
    const auto bad = check_witness(g, ls, *it->second, cert.mode, opts, depth, &asserted);
    if (asserted) rep.sound = false;
    add(name, !bad, bad ? *bad : std::string(kind_name(it->second->kind)));
  }
  for (const auto& w : cert.relocations) {
    std::set<int> s(w.layer_subset.begin(), w.layer_subset.end());
    if (s.empty() || static_cast<int>(s.size()) >= k) add("relocation list", false, "witness for an improper layer subset");
  }

  if (cert.mode == CertMode::kStrong) {
    bool stable = true;
    for (const auto& p : cert.phi) stable = stable && p.stable && fixed_set_independent(g, p.fixed);
    add("strong", stable, stable ? "" : "an involution has a non-independent fixed set");
  }
  return rep;
}

inline Json verify_to_json(const VerifyReport& r) {
  Json clauses = Json::array();
  for (const auto& c : r.clauses)
    clauses.push_back({{"clause", c.name}, {"result", c.pass ? "PASS" : "FAIL"}, {"detail", c.detail}});
  return Json{{"verdict", r.ok() ? "PASS" : "FAIL"}, {"sound", r.sound}, {"clauses", clauses}};
}

// ---------------------------------------------------------------------------
// Search

enum KindMask : unsigned {
  kAllowIsoCopy = 1U,
  kAllowStarUnion = 2U,
  kAllowRecursiveSuper = 4U,
  kAllowConstructive = 7U,
};

struct CertifyOptions {
  CertMode mode = CertMode::kDominating;
  int max_layers = 2;
  unsigned kinds = kAllowConstructive;
  bool skip_screen = false;
  std::size_t max_states = default_max_states();
  std::size_t max_phi_candidates = 64;
  /// Work units (percolation searches, embedding searches, candidate checks).
  std::size_t budget = 2000000;
  int max_depth = 4;
  std::size_t max_super_candidates = 20000;
  Limits limits;
  VerifyOptions verify;
};

enum class CertifyStatus { kCertified, kNoCertificate, kStructural, kBudgetExhausted };

inline const char* status_name(CertifyStatus s) {
  switch (s) {
    case CertifyStatus::kCertified: return "CERTIFIED";
    case CertifyStatus::kNoCertificate: return "NO_CERTIFICATE";
    case CertifyStatus::kStructural: return "STRUCTURAL";
    case CertifyStatus::kBudgetExhausted: return "BUDGET_EXHAUSTED";
  }
  return "?";
}

struct CertifyOutcome {
  CertifyStatus status = CertifyStatus::kNoCertificate;
  std::optional<Certificate> certificate;
  std::string reason;
  std::size_t work = 0;
};

namespace detail {

struct MemoEntry {
  Graph graph;
  std::shared_ptr<const Certificate> certificate;  // null when none was found
  int depth = 0;
};

struct CertifyContext {
  std::vector<MemoEntry> memo;
  std::size_t work = 0;
  bool capped = false;

  void spend(const CertifyOptions& o, std::size_t units = 1) {
    work += units;
    if (work > o.budget) throw BudgetExhausted("certification work budget of " + std::to_string(o.budget) + " exhausted");
  }
};

inline CertifyOutcome certify_impl(const Graph& g, const CertifyOptions& opts, CertifyContext& ctx, int depth);

inline std::vector<std::vector<int>> seed_combos(int k, int size) { return k_subsets(k, size); }

inline std::vector<int> mask_edges(EdgeMask m) {
  std::vector<int> out;
  for (; m; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

inline EdgeMask vertex_mask_of(const Graph& g, EdgeMask edges) {
  EdgeMask vm = 0;
  for (; edges; edges &= edges - 1) {
    const auto& e = g.edge(std::countr_zero(edges));
    vm |= (EdgeMask{1} << e.u) | (EdgeMask{1} << e.v);
  }
  return vm;
}

inline std::optional<RelocationWitness> find_iso_copy(const Graph& g, const LayerStructure& ls,
                                                      const std::vector<int>& iset, const CompactGraph& pattern,
                                                      const CertifyOptions& opts, CertifyContext& ctx) {
  for (const auto& combo : seed_combos(ls.k(), static_cast<int>(iset.size()) + 1)) {
    std::vector<int> must;
    for (int p : combo) must.push_back(ls.seeds[p]);
    ctx.spend(opts);
    EmbeddingOptions eo;
    eo.limit = 1;
    const auto emb = subgraph_embeddings(pattern.graph, g, g.subset(must), eo);
    if (emb.empty()) continue;
    RelocationWitness w;
    w.layer_subset = iset;
    w.kind = RelocationKind::kIsoCopy;
    w.embedding = emb.front().map;
    w.edges = emb.front().image.indices();
    w.seeds_covered = seeds_in(ls.seeds, w.edges);
    return w;
  }
  return std::nullopt;
}

inline std::optional<RelocationWitness> find_star_union(const Graph& g, const LayerStructure& ls,
                                                        const std::vector<int>& iset, const CompactGraph& pattern,
                                                        const CertifyOptions& opts, CertifyContext& ctx) {
  const int s = equal_star_size(pattern.graph);
  if (s == 0) return std::nullopt;
  std::vector<StarPiece> stars;
  for (const auto& comp : connected_components(pattern.graph)) {
    Vertex center = 0;
    for (Vertex v : comp)
      if (pattern.graph.degree(v) == s) center = v;
    StarPiece st{pattern.original[center], {}};
    for (int e : pattern.graph.incident_edges(center)) {
      const auto& ed = pattern.graph.edge(e);
      st.edges.push_back(g.edge_index(pattern.original[ed.u], pattern.original[ed.v]));
    }
    std::sort(st.edges.begin(), st.edges.end());
    stars.push_back(std::move(st));
  }
  const int need = static_cast<int>(iset.size()) + 1;
  for (std::size_t r = 0; r < stars.size(); ++r) {
    std::vector<StarPiece> kept;
    EdgeMask kept_edges = 0, kept_centers = 0;
    for (std::size_t i = 0; i < stars.size(); ++i)
      if (i != r) {
        kept.push_back(stars[i]);
        for (int e : stars[i].edges) kept_edges |= EdgeMask{1} << e;
        kept_centers |= EdgeMask{1} << stars[i].center;
      }
    for (Vertex b = 0; b < g.n(); ++b) {
      if (b == stars[r].center || ((kept_centers >> b) & 1U)) continue;
      std::vector<int> avail;
      for (int e : g.incident_edges(b))
        if (!((kept_edges >> e) & 1U)) avail.push_back(e);
      if (static_cast<int>(avail.size()) < s) continue;
      std::sort(avail.begin(), avail.end());
      for (const auto& pick : k_subsets(static_cast<int>(avail.size()), s)) {
        ctx.spend(opts);
        StarPiece nb{b, {}};
        for (int p : pick) nb.edges.push_back(avail[p]);
        auto cand = kept;
        cand.push_back(nb);
        std::vector<int> edges;
        for (const auto& st : cand) edges.insert(edges.end(), st.edges.begin(), st.edges.end());
        std::sort(edges.begin(), edges.end());
        const auto covered = seeds_in(ls.seeds, edges);
        if (static_cast<int>(covered.size()) < need) continue;
        if (check_star_shape(g, cand, s)) continue;
        RelocationWitness w;
        w.layer_subset = iset;
        w.kind = RelocationKind::kStarUnion;
        w.edges = edges;
        w.seeds_covered = covered;
        w.stars = std::move(cand);
        return w;
      }
    }
  }
  return std::nullopt;
}

// Certificate for a graph isomorphic to `h`, with a map from the memo
// representative onto h.
inline std::optional<SubCertificate> certify_sub(const Graph& h, const CertifyOptions& opts, CertifyContext& ctx,
                                                 int depth) {
  EmbeddingOptions one;
  one.limit = 1;
  for (const auto& m : ctx.memo) {
    if (m.graph.n() != h.n() || m.graph.num_edges() != h.num_edges()) continue;
    if (degree_sequence(m.graph) != degree_sequence(h)) continue;
    const auto iso = subgraph_embeddings(m.graph, h, h.no_edges(), one);
    if (iso.empty()) continue;
    if (!m.certificate && m.depth > depth) break;  // failed only for lack of depth; retry below
    if (!m.certificate) return std::nullopt;
    return SubCertificate{m.graph, iso.front().map, m.certificate};
  }
  const auto out = certify_impl(h, opts, ctx, depth);
  std::shared_ptr<const Certificate> cert;
  if (out.certificate) cert = std::make_shared<Certificate>(*out.certificate);
  ctx.memo.push_back({h, cert, depth});
  if (!cert) return std::nullopt;
  std::vector<Vertex> id(h.n());
  std::iota(id.begin(), id.end(), 0);
  return SubCertificate{h, id, cert};
}

inline std::optional<RelocationWitness> find_recursive_super(const Graph& g, const LayerStructure& ls,
                                                             const std::vector<int>& iset, const CompactGraph& pattern,
                                                             const CertifyOptions& opts, CertifyContext& ctx,
                                                             int depth) {
  if (depth + 1 > opts.max_depth) return std::nullopt;
  std::vector<Graph> comps;
  int min_edges = 0;
  for (const auto& c : connected_components(pattern.graph)) {
    comps.push_back(induced_subgraph(pattern.graph, c));
    min_edges = std::max(min_edges, comps.back().num_edges());
  }
  const auto comp_vertices = connected_components(pattern.graph);
  EmbeddingOptions one;
  one.limit = 1;
  const int m = g.num_edges();
  for (const auto& combo : seed_combos(ls.k(), static_cast<int>(iset.size()) + 1)) {
    EdgeMask start = 0;
    for (int p : combo) start |= EdgeMask{1} << ls.seeds[p];
    std::vector<EdgeMask> level{start};
    for (int size = std::popcount(start); size < m && !level.empty(); ++size) {
      for (EdgeMask cand : level) {
        if (size < min_edges) break;
        ctx.spend(opts);
        const auto sub = compact_subgraph(g, g.subset(cand));
        if (!is_connected(sub.graph)) continue;
        bool fits = true;
        std::vector<Vertex> embedding(pattern.graph.n(), -1);
        for (std::size_t c = 0; c < comps.size() && fits; ++c) {
          const auto emb = subgraph_embeddings(comps[c], sub.graph, sub.graph.no_edges(), one);
          if (emb.empty()) {
            fits = false;
            break;
          }
          for (std::size_t i = 0; i < comp_vertices[c].size(); ++i)
            embedding[comp_vertices[c][i]] = sub.original[emb.front().map[i]];
        }
        if (!fits) continue;
        if (!screen(sub.graph).pass()) continue;
        auto sc = certify_sub(sub.graph, opts, ctx, depth + 1);
        if (!sc) continue;
        for (auto& v : sc->map) v = sub.original[v];
        RelocationWitness w;
        w.layer_subset = iset;
        w.kind = RelocationKind::kRecursiveSuper;
        w.edges = mask_edges(cand);
        w.seeds_covered = seeds_in(ls.seeds, w.edges);
        w.embedding = std::move(embedding);
        w.sub = std::move(sc);
        return w;
      }
      // Next level: add one edge touching the current set.
      std::set<EdgeMask> next;
      for (EdgeMask cand : level) {
        const EdgeMask vm = vertex_mask_of(g, cand);
        for (int e = 0; e < m; ++e) {
          if ((cand >> e) & 1U) continue;
          const auto& ed = g.edge(e);
          if (!(((vm >> ed.u) & 1U) || ((vm >> ed.v) & 1U))) continue;
          next.insert(cand | (EdgeMask{1} << e));
          if (next.size() >= opts.max_super_candidates) break;
        }
        if (next.size() >= opts.max_super_candidates) {
          ctx.capped = true;
          break;
        }
      }
      level.assign(next.begin(), next.end());
    }
  }
  return std::nullopt;
}

inline std::optional<RelocationWitness> find_relocation_impl(const Graph& g, const LayerStructure& ls,
                                                             const std::vector<int>& iset, const CertifyOptions& opts,
                                                             CertifyContext& ctx, int depth) {
  const auto pattern = compact_subgraph(g, ls.union_of(iset));
  if (opts.kinds & kAllowIsoCopy)
    if (auto w = find_iso_copy(g, ls, iset, pattern, opts, ctx)) return w;
  if ((opts.kinds & kAllowStarUnion) && opts.mode == CertMode::kDominating)
    if (auto w = find_star_union(g, ls, iset, pattern, opts, ctx)) return w;
  if (opts.kinds & kAllowRecursiveSuper)
    if (auto w = find_recursive_super(g, ls, iset, pattern, opts, ctx, depth)) return w;
  return std::nullopt;
}

// Candidate involution sets: the full set first, then closed proper subsets
// obtained by dropping one involution and re-closing, largest first.
inline std::vector<std::vector<int>> phi_candidates(const Graph& g, const std::vector<CutInvolution>& all,
                                                    std::size_t cap) {
  std::vector<int> full(all.size());
  std::iota(full.begin(), full.end(), 0);
  std::vector<std::vector<int>> out{full};
  std::set<std::vector<int>> seen{full};
  for (std::size_t q = 0; q < out.size() && out.size() < cap; ++q) {
    const auto cur = out[q];
    for (int drop : cur) {
      std::vector<int> rest;
      std::vector<CutInvolution> rest_phi;
      for (int x : cur)
        if (x != drop) {
          rest.push_back(x);
          rest_phi.push_back(all[x]);
        }
      if (rest.empty()) continue;
      const auto orbits = edge_orbits(g, rest_phi);
      std::vector<int> orbit_of(g.num_edges());
      for (std::size_t o = 0; o < orbits.size(); ++o)
        for (int e : orbits[o]) orbit_of[e] = static_cast<int>(o);
      std::vector<int> closed;
      for (std::size_t x = 0; x < all.size(); ++x) {
        bool keeps = true;
        for (int e = 0; e < g.num_edges() && keeps; ++e)
          keeps = orbit_of[map_edge(g, all[x].perm.image, e)] == orbit_of[e];
        if (keeps) closed.push_back(static_cast<int>(x));
      }
      if (closed.size() >= cur.size()) continue;
      if (seen.insert(closed).second) out.push_back(closed);
      if (out.size() >= cap) break;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return out;
}

inline CertifyOutcome certify_impl(const Graph& g, const CertifyOptions& opts, CertifyContext& ctx, int depth) {
  CertifyOutcome out;
  auto structural = [&](std::string why) {
    out.status = CertifyStatus::kStructural;
    out.reason = std::move(why);
    return out;
  };
  if (g.num_edges() == 0) return structural("graph has no edges");
  if (!is_connected(compact(g).graph) || compact(g).graph.n() != g.n())
    return structural("graph is disconnected or has isolated vertices; certify a component instead");
  if (g.num_edges() > kMaxSubsetEdges) throw CapExceeded("graph has more edges than an edge subset holds");
  if (!opts.skip_screen) {
    const auto rep = screen(g);
    if (!rep.pass()) return structural(std::string("screening failed: ") + reason_code(rep.failures.front().reason));
  }
  auto invs = find_cut_involutions(g, opts.limits);
  if (opts.mode == CertMode::kStrong) std::erase_if(invs, [](const CutInvolution& p) { return !p.stable; });
  if (invs.empty()) return structural(opts.mode == CertMode::kStrong ? "no stable cut involutions" : "no cut involutions");

  const auto all_edges = g.all_edges();
  for (const auto& cand : phi_candidates(g, invs, opts.max_phi_candidates)) {
    std::vector<CutInvolution> phi;
    for (int x : cand) phi.push_back(invs[x]);
    const auto orbits = edge_orbits(g, phi);
    const int k = static_cast<int>(orbits.size());
    if (k > opts.max_layers) continue;
    LayerStructure ls;
    for (const auto& o : orbits) ls.layers.push_back(g.subset(o));
    ls.phi = phi;
    // Seed of layer 0 is its smallest edge; the others run through their layers.
    std::vector<int> pos(k, 0);
    while (true) {
      ls.seeds.assign(k, 0);
      for (int i = 0; i < k; ++i) ls.seeds[i] = orbits[i][pos[i]];
      ctx.spend(opts);
      std::optional<Signature> sig;
      try {
        sig = find_percolating_sequence(g, ls.phi, ls.seed_set(), all_edges, opts.max_states);
      } catch (const StateCapExceeded&) {
        ctx.capped = true;
      }
      if (sig && check_multiperc(g, ls, *sig, opts.verify.trials, opts.verify.seed).ok) {
        Certificate cert;
        cert.graph_sha = graph_sha(g);
        cert.layers = orbits;
        cert.phi = phi;
        cert.seeds = ls.seeds;
        cert.signature = *sig;
        cert.mode = opts.mode;
        bool complete = true;
        std::vector<std::vector<int>> subsets;
        for (int size = 1; size < k; ++size)
          for (const auto& s : k_subsets(k, size)) subsets.push_back(s);
        for (const auto& iset : subsets) {
          auto w = find_relocation_impl(g, ls, iset, opts, ctx, depth);
          if (!w) {
            complete = false;
            break;
          }
          cert.relocations.push_back(std::move(*w));
        }
        if (complete && verify_certificate(g, cert, opts.verify, depth).ok()) {
          out.status = CertifyStatus::kCertified;
          out.certificate = std::move(cert);
          return out;
        }
      }
      int i = k - 1;
      while (i >= 1 && pos[i] + 1 >= static_cast<int>(orbits[i].size())) pos[i--] = 0;
      if (i < 1) break;
      ++pos[i];
    }
  }
  out.status = ctx.capped ? CertifyStatus::kBudgetExhausted : CertifyStatus::kNoCertificate;
  out.reason = ctx.capped ? "a search cap was hit before a certificate was found"
                          : "no layered percolation with relocatable layers was found";
  return out;
}

}  // namespace detail

/// Searches for a certificate that g is dominating (or strongly dominating).
/// Any returned certificate has already passed verify_certificate.
inline CertifyOutcome certify(const Graph& g, const CertifyOptions& opts = {}) {
  detail::CertifyContext ctx;
  CertifyOutcome out;
  try {
    out = detail::certify_impl(g, opts, ctx, 0);
  } catch (const BudgetExhausted& e) {
    out.status = CertifyStatus::kBudgetExhausted;
    out.reason = e.what();
  }
  out.work = ctx.work;
  return out;
}

/// Relocation witness for one layer subset of a given layer structure.
inline std::optional<RelocationWitness> find_relocation(const Graph& g, const LayerStructure& ls,
                                                        std::vector<int> iset, const CertifyOptions& opts = {}) {
  std::sort(iset.begin(), iset.end());
  if (iset.empty() || static_cast<int>(iset.size()) >= ls.k()) throw BadParams("layer subset must be nonempty and proper");
  detail::CertifyContext ctx;
  return detail::find_relocation_impl(g, ls, iset, opts, ctx, 0);
}

}  // namespace domcert
