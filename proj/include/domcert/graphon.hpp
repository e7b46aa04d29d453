#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "domcert/graph.hpp"
#include "domcert/graph_io.hpp"
#include "domcert/rational.hpp"

namespace domcert {

/// Dense k x k block values plus block measures; the numeric core shared by
/// the floating and exact evaluation paths.
template <class T>
struct BlockKernel {
  int k = 0;
  std::vector<T> values;    // row-major k*k, symmetric
  std::vector<T> measures;  // length k

  const T& at(int a, int b) const { return values[static_cast<std::size_t>(a) * k + b]; }
  T& at(int a, int b) { return values[static_cast<std::size_t>(a) * k + b]; }
};

/// Piecewise-constant symmetric kernel on [0,1]^2. Values lie in [0,1]
/// (or [-1,1] when signed), measures are positive and sum to 1.
class StepGraphon {
 public:
  StepGraphon() = default;

  StepGraphon(const std::vector<std::vector<double>>& values, std::vector<double> measures,
              bool signed_ok = false)
      : signed_ok_(signed_ok) {
    kernel_.k = static_cast<int>(measures.size());
    kernel_.measures = std::move(measures);
    if (static_cast<int>(values.size()) != kernel_.k)
      throw ParseError("graphon values must be a k x k matrix");
    for (const auto& row : values) {
      if (static_cast<int>(row.size()) != kernel_.k) throw ParseError("graphon values must be a k x k matrix");
      kernel_.values.insert(kernel_.values.end(), row.begin(), row.end());
    }
    validate();
  }

  /// Builds a graphon whose values and measures are exact rationals; the
  /// floating copy is derived from them.
  static StepGraphon exact(const std::vector<std::vector<Rational>>& values, std::vector<Rational> measures,
                           bool signed_ok = false) {
    StepGraphon w;
    w.signed_ok_ = signed_ok;
    BlockKernel<Rational> ex;
    ex.k = static_cast<int>(measures.size());
    ex.measures = std::move(measures);
    if (static_cast<int>(values.size()) != ex.k) throw ParseError("graphon values must be a k x k matrix");
    for (const auto& row : values) {
      if (static_cast<int>(row.size()) != ex.k) throw ParseError("graphon values must be a k x k matrix");
      ex.values.insert(ex.values.end(), row.begin(), row.end());
    }
    Rational total = 0;
    for (const auto& m : ex.measures) {
      if (m <= 0) throw ParseError("block measures must be positive");
      total += m;
    }
    if (total != 1) throw ParseError("block measures must sum to 1");
    w.kernel_.k = ex.k;
    for (const auto& v : ex.values) w.kernel_.values.push_back(to_double(v));
    for (const auto& m : ex.measures) w.kernel_.measures.push_back(to_double(m));
    w.exact_ = std::move(ex);
    w.validate();
    return w;
  }

  int k() const { return kernel_.k; }
  double value(int a, int b) const { return kernel_.at(a, b); }
  double measure(int a) const { return kernel_.measures[a]; }
  bool signed_ok() const { return signed_ok_; }
  bool has_exact() const { return exact_.has_value(); }
  const BlockKernel<double>& kernel() const { return kernel_; }
  const BlockKernel<Rational>& exact_kernel() const { return *exact_; }

  /// One block per value of n, identity values: the disjoint union of n
  /// equal cliques with loops, as a graphon.
  static StepGraphon identity_blocks(int n) {
    if (n < 1) throw BadParams("identity graphon needs n >= 1");
    std::vector<std::vector<Rational>> vals(n, std::vector<Rational>(n, Rational(0)));
    for (int i = 0; i < n; ++i) vals[i][i] = 1;
    return exact(vals, std::vector<Rational>(n, make_rational(1, n)));
  }

  static StepGraphon constant(const Rational& p) { return exact({{p}}, {Rational(1)}); }

  /// Complete bipartite graphon between [0, eps) and [eps, 1].
  static StepGraphon two_block_bipartite(const Rational& eps) {
    if (eps <= 0 || eps >= 1) throw BadParams("eps must lie in (0,1)");
    return exact({{Rational(0), Rational(1)}, {Rational(1), Rational(0)}}, {eps, Rational(1 - eps)});
  }

  /// The n-vertex graph G as a graphon with n uniform blocks and adjacency values.
  static StepGraphon from_graph(const Graph& g) {
    if (g.n() < 1) throw BadParams("graph must have at least one vertex");
    std::vector<std::vector<Rational>> vals(g.n(), std::vector<Rational>(g.n(), Rational(0)));
    for (const auto& e : g.edges()) vals[e.u][e.v] = vals[e.v][e.u] = 1;
    return exact(vals, std::vector<Rational>(g.n(), make_rational(1, g.n())));
  }

 private:
  void validate() const {
    const int k = kernel_.k;
    if (k < 1) throw ParseError("graphon needs at least one block");
    const double lo = signed_ok_ ? -1.0 : 0.0;
    double total = 0;
    for (int a = 0; a < k; ++a) {
      const double m = kernel_.measures[a];
      if (!(m > 0)) throw ParseError("block measures must be positive");
      total += m;
      for (int b = 0; b < k; ++b) {
        const double v = kernel_.at(a, b);
        if (!std::isfinite(v) || v < lo || v > 1.0)
          throw ParseError("graphon value at (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
        if (v != kernel_.at(b, a)) throw ParseError("graphon values must be symmetric");
      }
    }
    if (std::fabs(total - 1.0) > 1e-12) throw ParseError("block measures must sum to 1");
  }

  BlockKernel<double> kernel_;
  std::optional<BlockKernel<Rational>> exact_;
  bool signed_ok_ = false;
};

/// A homomorphism density, with its exact value when every input was rational.
struct DensityValue {
  double value = 0;
  std::optional<Rational> exact;
};

struct DensityOptions {
  /// Direct k^v enumeration is used while k^v stays at or below this.
  std::size_t direct_work_cap = 4096;
  /// Largest intermediate table allowed on the elimination path.
  std::size_t max_table = std::size_t{1} << 24;
  int max_pattern_vertices = 24;
};

namespace detail {

inline std::size_t checked_power(std::size_t base, int exp, std::size_t cap) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

// Vertex order where every vertex after the first of its component has an
// earlier neighbour.
inline std::vector<Vertex> connectivity_order(const Graph& g) {
  std::vector<Vertex> order;
  for (const auto& comp : connected_components(g)) {
    std::vector<char> seen(g.n(), 0);
    std::deque<Vertex> queue{comp.front()};
    seen[comp.front()] = 1;
    while (!queue.empty()) {
      Vertex v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (Vertex w : g.neighbors(v))
        if (!seen[w]) {
          seen[w] = 1;
          queue.push_back(w);
        }
    }
  }
  return order;
}

template <class T>
struct Factor {
  std::vector<int> vars;  // sorted; vars[0] is the least significant digit
  std::vector<T> table;
};

template <class T>
T direct_sum(const Graph& p, const BlockKernel<T>& w, const std::vector<int>& pinned) {
  // pinned[v] >= 0 fixes vertex v to that block and drops its measure factor
  // (the caller accounts for it).
  const int n = p.n();
  const auto order = connectivity_order(p);
  std::vector<int> block(n, -1);
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;
  T total = T(0);
  auto recurse = [&](auto&& self, int depth, const T& partial) -> void {
    if (depth == n) {
      total += partial;
      return;
    }
    const Vertex v = order[depth];
    const int lo = pinned[v] >= 0 ? pinned[v] : 0;
    const int hi = pinned[v] >= 0 ? pinned[v] + 1 : w.k;
    for (int a = lo; a < hi; ++a) {
      T f = pinned[v] >= 0 ? partial : T(partial * w.measures[a]);
      bool zero = (f == T(0));
      for (Vertex u : p.neighbors(v)) {
        if (zero) break;
        if (pos[u] < depth) {
          f *= w.at(a, block[u]);
          zero = (f == T(0));
        }
      }
      if (zero) continue;
      block[v] = a;
      self(self, depth + 1, f);
    }
    block[v] = -1;
  };
  recurse(recurse, 0, T(1));
  return total;
}

// Sum-product over all vertices except `keep`, eliminating by greedy minimum
// degree (ties to the smallest id). Returns a factor over `keep`.
template <class T>
Factor<T> eliminate(const Graph& p, const BlockKernel<T>& w, const std::vector<int>& keep,
                    bool keep_measures, std::size_t max_table) {
  const int n = p.n();
  const int k = w.k;
  std::vector<Factor<T>> factors;
  std::vector<char> kept(n, 0);
  for (int v : keep) kept[v] = 1;
  for (Vertex v = 0; v < n; ++v) {
    if (kept[v] && !keep_measures) continue;
    factors.push_back({{v}, w.measures});
  }
  for (const auto& e : p.edges()) factors.push_back({{e.u, e.v}, w.values});

  std::vector<std::vector<char>> inter(n, std::vector<char>(n, 0));
  for (const auto& e : p.edges()) inter[e.u][e.v] = inter[e.v][e.u] = 1;
  std::vector<char> alive(n, 1);

  auto index_of = [k](const std::vector<int>& vars, const std::vector<int>& assign_by_var,
                      const std::vector<int>& sub) {
    std::size_t idx = 0;
    for (std::size_t i = sub.size(); i-- > 0;) idx = idx * k + assign_by_var[sub[i]];
    (void)vars;
    return idx;
  };

  std::vector<int> assign(n, 0);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    int best_deg = 0;
    for (Vertex v = 0; v < n; ++v) {
      if (!alive[v] || kept[v]) continue;
      int d = 0;
      for (Vertex u = 0; u < n; ++u)
        if (alive[u] && u != v && inter[v][u]) ++d;
      if (best < 0 || d < best_deg) {
        best = v;
        best_deg = d;
      }
    }
    if (best < 0) break;
    const int x = best;
    std::vector<Factor<T>> touching, rest;
    for (auto& f : factors) {
      if (std::find(f.vars.begin(), f.vars.end(), x) != f.vars.end())
        touching.push_back(std::move(f));
      else
        rest.push_back(std::move(f));
    }
    std::vector<int> all_vars;
    for (const auto& f : touching) all_vars.insert(all_vars.end(), f.vars.begin(), f.vars.end());
    std::sort(all_vars.begin(), all_vars.end());
    all_vars.erase(std::unique(all_vars.begin(), all_vars.end()), all_vars.end());
    std::vector<int> out_vars;
    for (int v : all_vars)
      if (v != x) out_vars.push_back(v);
    const std::size_t span = checked_power(k, static_cast<int>(all_vars.size()), max_table);
    if (span > max_table)
      throw CapExceeded("elimination table of " + std::to_string(all_vars.size()) + " variables exceeds cap");
    Factor<T> result{out_vars, std::vector<T>(checked_power(k, static_cast<int>(out_vars.size()), max_table), T(0))};
    for (std::size_t idx = 0; idx < span; ++idx) {
      std::size_t rem = idx;
      for (int v : all_vars) {
        assign[v] = static_cast<int>(rem % k);
        rem /= k;
      }
      T prod = T(1);
      for (const auto& f : touching) {
        prod *= f.table[index_of(f.vars, assign, f.vars)];
        if (prod == T(0)) break;
      }
      if (prod == T(0)) continue;
      result.table[index_of(out_vars, assign, out_vars)] += prod;
    }
    // Fill-in among the eliminated variable's neighbours.
    for (int a : out_vars)
      for (int b : out_vars)
        if (a != b) inter[a][b] = 1;
    alive[x] = 0;
    rest.push_back(std::move(result));
    factors = std::move(rest);
  }

  // Combine what is left: factors over subsets of `keep` (or scalars).
  std::vector<int> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  Factor<T> out{keep_sorted, std::vector<T>(checked_power(k, static_cast<int>(keep_sorted.size()), max_table), T(1))};
  for (std::size_t idx = 0; idx < out.table.size(); ++idx) {
    std::size_t rem = idx;
    for (int v : keep_sorted) {
      assign[v] = static_cast<int>(rem % k);
      rem /= k;
    }
    T prod = T(1);
    for (const auto& f : factors) prod *= f.table[index_of(f.vars, assign, f.vars)];
    out.table[idx] = prod;
  }
  return out;
}

template <class T>
T density_kernel(const Graph& p, const BlockKernel<T>& w, const DensityOptions& opts) {
  if (p.n() > opts.max_pattern_vertices)
    throw CapExceeded("pattern has " + std::to_string(p.n()) + " vertices; cap is " +
                      std::to_string(opts.max_pattern_vertices));
  if (checked_power(w.k, p.n(), opts.direct_work_cap) <= opts.direct_work_cap)
    return direct_sum(p, w, std::vector<int>(p.n(), -1));
  return eliminate(p, w, {}, true, opts.max_table).table.at(0);
}

// M[a][b] = sum over maps with x_i = a, x_j = b of all edge factors of `p`
// and all vertex measures (including those of i and j).
template <class T>
std::vector<T> pinned_marginal(const Graph& p, const BlockKernel<T>& w, int i, int j, const DensityOptions& opts) {
  const int k = w.k;
  std::vector<T> m(static_cast<std::size_t>(k) * k, T(0));
  if (checked_power(k, p.n(), opts.direct_work_cap) <= opts.direct_work_cap) {
    std::vector<int> pinned(p.n(), -1);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        pinned[i] = a;
        pinned[j] = b;
        m[a * k + b] = direct_sum(p, w, pinned) * w.measures[a] * w.measures[b];
      }
    return m;
  }
  const auto f = eliminate(p, w, {i, j}, true, opts.max_table);
  // f.vars is sorted {min(i,j), max(i,j)}; index = x_min + k * x_max.
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      const int xmin = i < j ? a : b;
      const int xmax = i < j ? b : a;
      m[a * k + b] = f.table[xmin + static_cast<std::size_t>(k) * xmax];
    }
  return m;
}

}  // namespace detail

/// Number of vertex maps sending every pattern edge onto a target edge.
inline BigInt hom_count(const Graph& pattern, const Graph& target, const Limits& limits = {}) {
  if (pattern.n() > limits.max_vertices)
    throw CapExceeded("pattern has " + std::to_string(pattern.n()) + " vertices; cap is " +
                      std::to_string(limits.max_vertices));
  BigInt total = 1;
  for (const auto& comp : connected_components(pattern)) {
    const Graph c = induced_subgraph(pattern, comp);
    const auto order = detail::connectivity_order(c);
    std::vector<int> pos(c.n());
    for (int i = 0; i < c.n(); ++i) pos[order[i]] = i;
    std::vector<Vertex> image(c.n(), -1);
    const EdgeMask everything = full_mask(target.n());
    std::uint64_t count = 0;
    auto recurse = [&](auto&& self, int depth) -> void {
      const Vertex v = order[depth];
      EdgeMask cand = everything;
      for (Vertex u : c.neighbors(v))
        if (pos[u] < depth) cand &= target.neighbor_mask(image[u]);
      if (depth + 1 == c.n()) {
        if (__builtin_add_overflow(count, static_cast<std::uint64_t>(std::popcount(cand)), &count))
          throw CapExceeded("homomorphism count overflow");
        return;
      }
      for (EdgeMask b = cand; b != 0; b &= b - 1) {
        image[v] = std::countr_zero(b);
        self(self, depth + 1);
      }
    };
    if (target.n() == 0) return 0;
    recurse(recurse, 0);
    total *= count;
  }
  return total;
}

/// t_pattern(G) = hom(pattern, G) / n^{v(pattern)}.
inline DensityValue density_graph(const Graph& pattern, const Graph& target, const Limits& limits = {}) {
  if (target.n() < 1) throw BadParams("target graph needs at least one vertex");
  const BigInt hom = hom_count(pattern, target, limits);
  BigInt denom = 1;
  for (int i = 0; i < pattern.n(); ++i) denom *= target.n();
  Rational exact(hom, denom);
  return {to_double(exact), exact};
}

/// Fast floating evaluation of t_pattern(w).
inline double density_value(const Graph& pattern, const BlockKernel<double>& w, const DensityOptions& opts = {}) {
  return detail::density_kernel(pattern, w, opts);
}

inline Rational density_exact(const Graph& pattern, const BlockKernel<Rational>& w, const DensityOptions& opts = {}) {
  return detail::density_kernel(pattern, w, opts);
}

/// t_pattern(w); carries the exact value when w was built from rationals.
inline DensityValue density_step(const Graph& pattern, const StepGraphon& w, const DensityOptions& opts = {}) {
  DensityValue out;
  if (w.has_exact()) {
    out.exact = density_exact(pattern, w.exact_kernel(), opts);
    out.value = to_double(*out.exact);
  } else {
    out.value = density_value(pattern, w.kernel(), opts);
  }
  return out;
}

/// Gradient of t_pattern with respect to the block values, W_ab and W_ba
/// being one variable. Returned as a symmetric row-major k*k matrix.
template <class T>
std::vector<T> density_gradient_kernel(const Graph& pattern, const BlockKernel<T>& w, const DensityOptions& opts = {}) {
  const int k = w.k;
  std::vector<T> grad(static_cast<std::size_t>(k) * k, T(0));
  for (int e = 0; e < pattern.num_edges(); ++e) {
    std::vector<Edge> others;
    for (int f = 0; f < pattern.num_edges(); ++f)
      if (f != e) others.push_back(pattern.edge(f));
    const Graph reduced(pattern.n(), std::move(others));
    const auto& ed = pattern.edge(e);
    const auto m = detail::pinned_marginal(reduced, w, ed.u, ed.v, opts);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        if (a == b)
          grad[a * k + a] += m[a * k + a];
        else
          grad[a * k + b] += m[a * k + b] + m[b * k + a];
      }
  }
  return grad;
}

inline std::vector<double> density_gradient(const Graph& pattern, const StepGraphon& w, const DensityOptions& opts = {}) {
  return density_gradient_kernel(pattern, w.kernel(), opts);
}

/// |t_h|^{1/e(h)} - |t_h'|^{1/e(h')}; negative means h fails to dominate h' at w.
inline double domination_margin(const Graph& h, const Graph& hprime, const BlockKernel<double>& w,
                                const DensityOptions& opts = {}) {
  if (h.num_edges() < 1 || hprime.num_edges() < 1) throw BadParams("domination margin needs graphs with edges");
  const double th = std::fabs(density_value(h, w, opts));
  const double tp = std::fabs(density_value(hprime, w, opts));
  return std::pow(th, 1.0 / h.num_edges()) - std::pow(tp, 1.0 / hprime.num_edges());
}

inline double domination_margin(const Graph& h, const Graph& hprime, const StepGraphon& w,
                                const DensityOptions& opts = {}) {
  return domination_margin(h, hprime, w.kernel(), opts);
}

/// Margins within this band are reported as inconclusive.
inline constexpr double kMarginTolerance = 1e-9;

enum class MarginVerdict { kHolds, kInconclusive, kViolated };

inline MarginVerdict classify_margin(double margin) {
  if (margin > kMarginTolerance) return MarginVerdict::kHolds;
  if (margin < -kMarginTolerance) return MarginVerdict::kViolated;
  return MarginVerdict::kInconclusive;
}

inline Json graphon_to_json(const StepGraphon& w) {
  Json j;
  j["k"] = w.k();
  Json values = Json::array();
  for (int a = 0; a < w.k(); ++a) {
    Json row = Json::array();
    for (int b = 0; b < w.k(); ++b) {
      if (w.has_exact())
        row.push_back(to_string(w.exact_kernel().at(a, b)));
      else
        row.push_back(w.value(a, b));
    }
    values.push_back(std::move(row));
  }
  j["values"] = std::move(values);
  Json measures = Json::array();
  for (int a = 0; a < w.k(); ++a) {
    if (w.has_exact())
      measures.push_back(to_string(w.exact_kernel().measures[a]));
    else
      measures.push_back(w.measure(a));
  }
  j["measures"] = std::move(measures);
  j["signed"] = w.signed_ok();
  return j;
}

/// Entries may be JSON numbers or strings "p/q"; when every entry is an
/// integer or a string the graphon is exact.
inline StepGraphon graphon_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("values") || !j.contains("measures"))
    throw ParseError("graphon JSON needs \"values\" and \"measures\"");
  const bool signed_ok = j.value("signed", false);
  bool all_exact = true;
  auto scan = [&](const Json& x) {
    if (x.is_string() || x.is_number_integer()) return;
    if (!x.is_number()) throw ParseError("graphon entries must be numbers or \"p/q\" strings");
    all_exact = false;
  };
  for (const auto& row : j["values"])
    for (const auto& x : row) scan(x);
  for (const auto& x : j["measures"]) scan(x);
  if (j.contains("k") && j["k"].get<int>() != static_cast<int>(j["measures"].size()))
    throw ParseError("\"k\" does not match the number of measures");
  if (all_exact) {
    auto to_rat = [](const Json& x) {
      return x.is_string() ? parse_rational(x.get<std::string>()) : Rational(BigInt(x.get<long long>()));
    };
    std::vector<std::vector<Rational>> vals;
    for (const auto& row : j["values"]) {
      vals.emplace_back();
      for (const auto& x : row) vals.back().push_back(to_rat(x));
    }
    std::vector<Rational> meas;
    for (const auto& x : j["measures"]) meas.push_back(to_rat(x));
    return StepGraphon::exact(vals, meas, signed_ok);
  }
  auto to_dbl = [](const Json& x) {
    return x.is_string() ? to_double(parse_rational(x.get<std::string>())) : x.get<double>();
  };
  std::vector<std::vector<double>> vals;
  for (const auto& row : j["values"]) {
    vals.emplace_back();
    for (const auto& x : row) vals.back().push_back(to_dbl(x));
  }
  std::vector<double> meas;
  for (const auto& x : j["measures"]) meas.push_back(to_dbl(x));
  return StepGraphon(vals, meas, signed_ok);
}

}  // namespace domcert
