#pragma once

#include <array>
#include <cstdlib>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "domcert/involution.hpp"

namespace domcert {

struct FoldStep {
  int phi = 0;
  Side side = Side::kLeft;
  friend bool operator==(const FoldStep&, const FoldStep&) = default;
};

using Signature = std::vector<FoldStep>;

/// Edge partition preserved by phi, with one seed edge per layer.
struct LayerStructure {
  std::vector<EdgeSubset> layers;
  std::vector<CutInvolution> phi;
  std::vector<int> seeds;

  int k() const { return static_cast<int>(layers.size()); }
  EdgeSubset union_of(const std::vector<int>& layer_ids) const {
    EdgeSubset s = layers.front().with_bits(0);
    for (int i : layer_ids) s = s | layers.at(i);
    return s;
  }
  EdgeSubset seed_set() const {
    EdgeSubset s = layers.front().with_bits(0);
    for (int e : seeds) s = s.with(e);
    return s;
  }
};

/// BFS cap default, overridable through DOMCERT_MAX_STATES.
inline std::size_t default_max_states() {
  if (const char* env = std::getenv("DOMCERT_MAX_STATES")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::size_t{1} << 20;
}

/// Precomputed half-folds for a list of involutions. Folding a mask is eight
/// table lookups: fold(J) is the union of preimages of the edges of J.
class FoldTable {
 public:
  FoldTable(const Graph& g, const std::vector<CutInvolution>& phi) : host_(g.fingerprint()), m_(g.num_edges()) {
    g.require_subset_capacity();
    for (const auto& p : phi)
      for (Side s : {Side::kLeft, Side::kRight}) {
        const HalfFold h = make_half_fold(g, p, s);
        std::vector<EdgeMask> pre(64, 0);
        for (int e = 0; e < m_; ++e) pre[h.edge_map[e]] |= EdgeMask{1} << e;
        auto& tab = tables_.emplace_back();
        for (int byte = 0; byte < 8; ++byte)
          for (int val = 0; val < 256; ++val) {
            EdgeMask acc = 0;
            for (int b = 0; b < 8; ++b)
              if ((val >> b) & 1) acc |= pre[byte * 8 + b];
            tab[byte * 256 + val] = acc;
          }
      }
  }

  int num_involutions() const { return static_cast<int>(tables_.size() / 2); }

  EdgeMask apply(EdgeMask j, const FoldStep& step) const {
    const auto& tab = tables_[index(step)];
    EdgeMask out = 0;
    for (int byte = 0; byte < 8 && j != 0; ++byte, j >>= 8) out |= tab[byte * 256 + (j & 0xff)];
    return out;
  }

  EdgeSubset apply(const EdgeSubset& j, const FoldStep& step) const {
    if (j.host() != host_ || j.size() != m_) throw HostMismatch("edge subset does not belong to the folded graph");
    return j.with_bits(apply(j.bits(), step));
  }

  EdgeMask replay(EdgeMask j, const Signature& sig) const {
    for (const auto& s : sig) j = apply(j, s);
    return j;
  }

 private:
  std::size_t index(const FoldStep& step) const {
    if (step.phi < 0 || step.phi >= num_involutions())
      throw BadSignatureIndex("signature refers to involution " + std::to_string(step.phi) + " but only " +
                              std::to_string(num_involutions()) + " exist");
    return static_cast<std::size_t>(step.phi) * 2 + (step.side == Side::kLeft ? 0 : 1);
  }

  std::uint64_t host_;
  int m_;
  std::vector<std::array<EdgeMask, 8 * 256>> tables_;
};

inline EdgeSubset replay(const Graph& g, const EdgeSubset& f0, const LayerStructure& ls, const Signature& sig) {
  g.require_host(f0);
  const FoldTable table(g, ls.phi);
  return f0.with_bits(table.replay(f0.bits(), sig));
}

/// Layer indices whose seed lies in f0.
inline std::vector<int> seeded_layers(const LayerStructure& ls, EdgeMask f0) {
  std::vector<int> out;
  for (int i = 0; i < ls.k(); ++i)
    if ((f0 >> ls.seeds[i]) & 1U) out.push_back(i);
  return out;
}

struct MultipercReport {
  bool ok = true;
  bool exhaustive = false;
  std::size_t checked = 0;
  std::optional<EdgeMask> failing_start;
  EdgeMask failing_result = 0;
  EdgeMask failing_expected = 0;
};

/// For every (or `trials` random) starting set F0, replays the signature and
/// checks that the result is exactly the union of the layers seeded by F0.
inline MultipercReport check_multiperc(const Graph& g, const LayerStructure& ls, const Signature& sig,
                                       std::size_t trials, std::uint64_t seed, int exhaustive_up_to = 16) {
  const FoldTable table(g, ls.phi);
  const int m = g.num_edges();
  MultipercReport rep;
  auto check = [&](EdgeMask f0) {
    EdgeMask expected = 0;
    for (int i : seeded_layers(ls, f0)) expected |= ls.layers[i].bits();
    const EdgeMask got = table.replay(f0, sig);
    ++rep.checked;
    if (got != expected && rep.ok) {
      rep.ok = false;
      rep.failing_start = f0;
      rep.failing_result = got;
      rep.failing_expected = expected;
    }
  };
  if (m <= exhaustive_up_to) {
    rep.exhaustive = true;
    for (EdgeMask f0 = 0; f0 <= full_mask(m) && rep.ok; ++f0) check(f0);
    return rep;
  }
  std::mt19937_64 rng(seed);
  check(0);
  check(full_mask(m));
  for (std::size_t t = 0; t < trials && rep.ok; ++t) check(rng() & full_mask(m));
  return rep;
}

/// Shortest fold sequence from `start` to `goal`; among shortest ones the
/// lexicographically smallest by (involution index, side). Breadth-first
/// search with first-discovery parents gives exactly that order.
inline std::optional<Signature> find_percolating_sequence(const Graph& g, const std::vector<CutInvolution>& phi,
                                                          const EdgeSubset& start, const EdgeSubset& goal,
                                                          std::size_t max_states = default_max_states()) {
  g.require_host(start);
  g.require_host(goal);
  if (start == goal) return Signature{};
  if (phi.empty()) return std::nullopt;
  const FoldTable table(g, phi);
  struct Parent {
    EdgeMask prev;
    FoldStep step;
  };
  std::unordered_map<EdgeMask, Parent> parents;
  parents.reserve(1024);
  parents.emplace(start.bits(), Parent{start.bits(), {}});
  std::deque<EdgeMask> queue{start.bits()};
  const int actions = 2 * table.num_involutions();
  while (!queue.empty()) {
    const EdgeMask cur = queue.front();
    queue.pop_front();
    for (int a = 0; a < actions; ++a) {
      const FoldStep step{a / 2, a % 2 == 0 ? Side::kLeft : Side::kRight};
      const EdgeMask next = table.apply(cur, step);
      if (parents.count(next)) continue;
      if (parents.size() >= max_states)
        throw StateCapExceeded("fold search exceeded " + std::to_string(max_states) + " states");
      parents.emplace(next, Parent{cur, step});
      if (next == goal.bits()) {
        Signature sig;
        for (EdgeMask s = next; s != start.bits(); s = parents.at(s).prev) sig.push_back(parents.at(s).step);
        std::reverse(sig.begin(), sig.end());
        return sig;
      }
      queue.push_back(next);
    }
  }
  return std::nullopt;
}

struct LayerReport {
  bool ok = true;
  std::vector<std::string> failures;
};

/// Partition, invariance under every involution, seed membership and
/// edge-transitivity of each layer.
inline LayerReport validate_layers(const Graph& g, const LayerStructure& ls) {
  LayerReport rep;
  auto fail = [&](std::string s) {
    rep.ok = false;
    rep.failures.push_back(std::move(s));
  };
  if (ls.layers.empty()) {
    fail("partition: no layers");
    return rep;
  }
  EdgeMask seen = 0;
  for (int i = 0; i < ls.k(); ++i) {
    g.require_host(ls.layers[i]);
    if (ls.layers[i].empty()) fail("partition: layer " + std::to_string(i) + " is empty");
    if (seen & ls.layers[i].bits()) fail("partition: layer " + std::to_string(i) + " overlaps an earlier layer");
    seen |= ls.layers[i].bits();
  }
  if (seen != full_mask(g.num_edges())) fail("partition: layers do not cover every edge");
  if (ls.phi.empty()) fail("involutions: the involution set is empty");
  for (std::size_t p = 0; p < ls.phi.size(); ++p) {
    for (const auto& why : validate_cut_involution(g, ls.phi[p]))
      fail("involutions: involution " + std::to_string(p) + ": " + why);
  }
  if (!rep.ok) return rep;
  for (std::size_t p = 0; p < ls.phi.size(); ++p) {
    bool moved = false;
    for (int i = 0; i < ls.k() && !moved; ++i)
      for (int e : ls.layers[i].indices())
        if (!ls.layers[i].contains(map_edge(g, ls.phi[p].perm.image, e))) {
          fail("invariance: involution " + std::to_string(p) + " moves edge " + std::to_string(e) + " out of layer " +
               std::to_string(i));
          moved = true;
          break;
        }
  }
  if (static_cast<int>(ls.seeds.size()) != ls.k()) {
    fail("seeds: expected " + std::to_string(ls.k()) + " seeds, got " + std::to_string(ls.seeds.size()));
  } else {
    for (int i = 0; i < ls.k(); ++i)
      if (ls.seeds[i] < 0 || ls.seeds[i] >= g.num_edges() || !ls.layers[i].contains(ls.seeds[i]))
        fail("seeds: seed " + std::to_string(i) + " is not in layer " + std::to_string(i));
  }
  if (rep.ok) {
    const auto orbits = edge_orbits(g, ls.phi);
    for (int i = 0; i < ls.k(); ++i) {
      const int first = ls.layers[i].indices().front();
      for (const auto& orb : orbits)
        if (std::find(orb.begin(), orb.end(), first) != orb.end() &&
            static_cast<int>(orb.size()) != ls.layers[i].count())
          fail("transitivity: layer " + std::to_string(i) + " is not a single orbit");
    }
  }
  return rep;
}

/// Fold sequence from the seed set to E(g) using only the layer involutions,
/// returned only after the replay law has been checked on it.
inline std::optional<Signature> find_layered_percolation(const Graph& g, const LayerStructure& ls,
                                                         std::size_t max_states = default_max_states(),
                                                         std::size_t trials = 10000, std::uint64_t seed = 1) {
  const auto rep = validate_layers(g, ls);
  if (!rep.ok) throw BadParams("invalid layer structure: " + rep.failures.front());
  auto sig = find_percolating_sequence(g, ls.phi, ls.seed_set(), g.all_edges(), max_states);
  if (!sig) return std::nullopt;
  if (!check_multiperc(g, ls, *sig, trials, seed).ok) return std::nullopt;
  return sig;
}

inline Json signature_to_json(const Signature& sig) {
  Json j = Json::array();
  for (const auto& s : sig) j.push_back(Json::array({s.phi, side_name(s.side)}));
  return j;
}

inline Signature signature_from_json(const Json& j) {
  Signature sig;
  try {
    for (const auto& s : j) {
      if (!s.is_array() || s.size() != 2) throw ParseError("signature step must be [index, \"L\"|\"R\"]");
      sig.push_back({s[0].get<int>(), parse_side(s[1].get<std::string>())});
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed signature: ") + e.what());
  }
  return sig;
}

}  // namespace domcert
