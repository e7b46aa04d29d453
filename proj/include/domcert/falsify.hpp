#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "domcert/constructions.hpp"
#include "domcert/graphon.hpp"

namespace domcert {

struct FalsifyTask {
  Graph h;
  Graph hprime;
  int blocks = 4;
  bool signed_mode = false;
  int restarts = 8;
  int iterations = 200;
  std::uint64_t seed = 1;
  /// Start from the two-block and identity-block families before random restarts.
  bool structured_seeds = true;
  std::int64_t max_denominator = 1000000;
  DensityOptions density;
};

struct Counterexample {
  StepGraphon graphon;
  double margin = 0;
  /// |t_h|^{e(h')} and |t_h'|^{e(h)} on the rationalized graphon; lhs < rhs.
  Rational lhs;
  Rational rhs;
  std::string provenance;
};

struct FalsifyStats {
  std::size_t evaluations = 0;
  std::size_t gradient_evaluations = 0;
  std::size_t confirmations_attempted = 0;
  std::size_t seeds_tried = 0;
  double best_margin = std::numeric_limits<double>::infinity();
};

struct FalsifyResult {
  std::optional<Counterexample> counterexample;
  FalsifyStats stats;
};

/// Float margins below this are candidates for exact confirmation.
inline constexpr double kViolationThreshold = -1e-6;

/// Exact test of |t_h|^{e(h')} < |t_h'|^{e(h)} on a rational graphon.
inline bool exact_violation(const Graph& h, const Graph& hprime, const StepGraphon& w, Rational* lhs_out = nullptr,
                            Rational* rhs_out = nullptr, const DensityOptions& opts = {}) {
  if (!w.has_exact()) throw BadParams("exact confirmation needs a rational graphon");
  const Rational th = abs(density_exact(h, w.exact_kernel(), opts));
  const Rational tp = abs(density_exact(hprime, w.exact_kernel(), opts));
  const Rational lhs = pow(th, static_cast<unsigned>(hprime.num_edges()));
  const Rational rhs = pow(tp, static_cast<unsigned>(h.num_edges()));
  if (lhs_out) *lhs_out = lhs;
  if (rhs_out) *rhs_out = rhs;
  return lhs < rhs;
}

/// Nearest rationals with bounded denominator; measures are adjusted so they
/// sum to exactly one. Absent if that would make a measure non-positive.
inline std::optional<StepGraphon> rationalize_graphon(const BlockKernel<double>& w, bool signed_mode,
                                                      std::int64_t max_den) {
  const int k = w.k;
  const Rational lo = signed_mode ? Rational(-1) : Rational(0);
  std::vector<std::vector<Rational>> vals(k, std::vector<Rational>(k));
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) {
      Rational r = rationalize(w.at(a, b), max_den);
      if (r < lo) r = lo;
      if (r > 1) r = 1;
      vals[a][b] = vals[b][a] = r;
    }
  std::vector<Rational> meas(k);
  Rational total = 0;
  int largest = 0;
  for (int a = 0; a < k; ++a) {
    meas[a] = rationalize(w.measures[a], max_den);
    if (meas[a] <= 0) return std::nullopt;
    total += meas[a];
    if (w.measures[a] > w.measures[largest]) largest = a;
  }
  meas[largest] += 1 - total;
  if (meas[largest] <= 0) return std::nullopt;
  return StepGraphon::exact(vals, meas, signed_mode);
}

namespace detail {

class MarginObjective {
 public:
  MarginObjective(const FalsifyTask& task, FalsifyStats& stats) : task_(task), stats_(stats) {}

  double value(const BlockKernel<double>& w) const {
    ++stats_.evaluations;
    return domination_margin(task_.h, task_.hprime, w, task_.density);
  }

  // Gradient of the margin with respect to the upper-triangular values.
  std::vector<double> gradient(const BlockKernel<double>& w) const {
    ++stats_.gradient_evaluations;
    const int k = w.k;
    std::vector<double> g(static_cast<std::size_t>(k) * k, 0.0);
    auto add = [&](const Graph& p, double sign) {
      const double t = density_value(p, w, task_.density);
      const double at = std::fabs(t);
      if (at < 1e-300) return;
      const double e = p.num_edges();
      const double scale = sign * (1.0 / e) * std::pow(at, 1.0 / e - 1.0) * (t < 0 ? -1.0 : 1.0);
      const auto dt = density_gradient_kernel(p, w, task_.density);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += scale * dt[i];
    };
    add(task_.h, 1.0);
    add(task_.hprime, -1.0);
    return g;
  }

 private:
  const FalsifyTask& task_;
  FalsifyStats& stats_;
};

}  // namespace detail

/// Searches step graphons for a violation of t_h^{1/e(h)} >= t_h'^{1/e(h')}.
/// Any float violation is rationalized and confirmed exactly before being
/// returned, so a returned counterexample is never a rounding artefact.
inline FalsifyResult falsify(const FalsifyTask& task) {
  if (task.h.num_edges() < 1 || task.hprime.num_edges() < 1) throw BadParams("both graphs need at least one edge");
  if (task.blocks < 1) throw BadParams("blocks must be >= 1");
  if (task.restarts < 0 || task.iterations < 0) throw BadParams("restarts and iterations must be nonnegative");
  FalsifyResult result;
  auto& stats = result.stats;
  const detail::MarginObjective objective(task, stats);
  const double lo = task.signed_mode ? -1.0 : 0.0;

  auto try_confirm = [&](const BlockKernel<double>& w, double margin, const std::string& provenance,
                         const StepGraphon* exact_source) -> bool {
    if (margin >= kViolationThreshold) return false;
    ++stats.confirmations_attempted;
    std::optional<StepGraphon> rat;
    if (exact_source && exact_source->has_exact())
      rat = *exact_source;
    else
      rat = rationalize_graphon(w, task.signed_mode, task.max_denominator);
    if (!rat) return false;
    Counterexample cx{*rat, 0, 0, 0, provenance};
    if (!exact_violation(task.h, task.hprime, *rat, &cx.lhs, &cx.rhs, task.density)) return false;
    cx.margin = domination_margin(task.h, task.hprime, *rat, task.density);
    result.counterexample = std::move(cx);
    return true;
  };

  // Projected descent on the margin from a starting kernel.
  auto descend = [&](BlockKernel<double> w, const std::string& label) -> bool {
    double f = objective.value(w);
    stats.best_margin = std::min(stats.best_margin, f);
    if (try_confirm(w, f, label + ", iteration 0", nullptr)) return true;
    double step = 0.1;
    const int k = w.k;
    for (int it = 1; it <= task.iterations && step > 1e-12; ++it) {
      const auto g = objective.gradient(w);
      double norm = 0;
      for (double x : g) norm += x * x;
      if (!(norm > 0) || !std::isfinite(norm)) break;
      BlockKernel<double> trial = w;
      for (int a = 0; a < k; ++a)
        for (int b = a; b < k; ++b) {
          const double d = a == b ? g[a * k + a] : g[a * k + b];
          const double v = std::clamp(w.at(a, b) - step * d / std::sqrt(norm), lo, 1.0);
          trial.at(a, b) = trial.at(b, a) = v;
        }
      const double ft = objective.value(trial);
      if (ft < f) {
        w = std::move(trial);
        f = ft;
        step *= 1.5;
        stats.best_margin = std::min(stats.best_margin, f);
        if (try_confirm(w, f, label + ", iteration " + std::to_string(it), nullptr)) return true;
      } else {
        step *= 0.5;
      }
    }
    return false;
  };

  auto from_seed = [&](const StepGraphon& seed_w, const std::string& label) -> bool {
    ++stats.seeds_tried;
    const double f = objective.value(seed_w.kernel());
    stats.best_margin = std::min(stats.best_margin, f);
    if (try_confirm(seed_w.kernel(), f, label, &seed_w)) return true;
    return descend(seed_w.kernel(), label);
  };

  if (task.structured_seeds) {
    for (int p = 12; p >= 1; --p) {
      const Rational eps = make_rational(1, std::int64_t{1} << p);
      if (from_seed(StepGraphon::two_block_bipartite(eps), "two-block seed eps=1/" + std::to_string(1LL << p)))
        return result;
    }
    for (int n = 2; n <= task.blocks; ++n)
      if (from_seed(StepGraphon::identity_blocks(n), "identity-block seed n=" + std::to_string(n))) return result;
  }

  for (int r = 0; r < task.restarts; ++r) {
    std::seed_seq sq{static_cast<std::uint32_t>(task.seed), static_cast<std::uint32_t>(task.seed >> 32),
                     static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(sq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    BlockKernel<double> w;
    w.k = task.blocks;
    w.values.assign(static_cast<std::size_t>(w.k) * w.k, 0.0);
    for (int a = 0; a < w.k; ++a)
      for (int b = a; b < w.k; ++b) w.at(a, b) = w.at(b, a) = lo + (1.0 - lo) * unit(rng);
    double total = 0;
    for (int a = 0; a < w.k; ++a) {
      w.measures.push_back(0.05 + unit(rng));
      total += w.measures.back();
    }
    for (auto& m : w.measures) m /= total;
    ++stats.seeds_tried;
    if (descend(std::move(w), "random restart " + std::to_string(r) + " (seed " + std::to_string(task.seed) + ")"))
      return result;
  }
  return result;
}

inline Json counterexample_to_json(const Counterexample& cx) {
  return Json{{"graphon", graphon_to_json(cx.graphon)},
              {"margin", cx.margin},
              {"lhs", to_string(cx.lhs)},
              {"rhs", to_string(cx.rhs)},
              {"provenance", cx.provenance}};
}

inline Json falsify_stats_to_json(const FalsifyStats& s) {
  return Json{{"evaluations", s.evaluations},
              {"gradient_evaluations", s.gradient_evaluations},
              {"confirmations_attempted", s.confirmations_attempted},
              {"seeds_tried", s.seeds_tried},
              {"best_margin", std::isfinite(s.best_margin) ? Json(s.best_margin) : Json(nullptr)}};
}

struct ExploreReport {
  int n = 0, k = 0, l = 0;
  bool violation = false;
  FalsifyResult result;
  bool trivial = false;
};

/// Searches for a violation of Q_n(l) dominating Q_n(k).
inline ExploreReport explore_ball_domination(int n, int k, int l, FalsifyTask budget = {}) {
  if (!(1 <= k && k <= l && l <= n)) throw BadParams("need 1 <= k <= l <= n");
  ExploreReport rep{n, k, l, false, {}, false};
  budget.h = hypercube_ball(n, l);
  budget.hprime = hypercube_ball(n, k);
  if (isomorphic(budget.h, budget.hprime)) {
    rep.trivial = true;
    return rep;
  }
  rep.result = falsify(budget);
  rep.violation = rep.result.counterexample.has_value();
  return rep;
}

inline Json explore_to_json(const ExploreReport& r) {
  Json j{{"n", r.n},
         {"k", r.k},
         {"l", r.l},
         {"verdict", r.violation ? "VIOLATION" : "NO_VIOLATION_FOUND"},
         {"trivial", r.trivial},
         {"stats", falsify_stats_to_json(r.result.stats)},
         {"note", "absence of a violation is search evidence, not a proof"}};
  if (r.result.counterexample) j["counterexample"] = counterexample_to_json(*r.result.counterexample);
  return j;
}

}  // namespace domcert
