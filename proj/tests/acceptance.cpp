// One PASS/FAIL line per acceptance criterion; nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

#include "support.hpp"

using namespace domcert;
using namespace testsupport;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Check {
  std::ostringstream why;
  bool ok = true;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) why << what;
    ok = ok && cond;
  }
};

bool certify_kinds_all(const Certificate& c, RelocationKind k) {
  for (const auto& w : c.relocations)
    if (w.kind != k) return false;
  return !c.relocations.empty();
}

LayerStructure c6p_layers(const Graph& g, std::vector<int> seeds) {
  LayerStructure ls;
  ls.phi = find_cut_involutions(g);
  for (const auto& o : edge_orbits(g, ls.phi)) ls.layers.push_back(g.subset(o));
  ls.seeds = std::move(seeds);
  return ls;
}

// C6+ end to end.
void ac1(Check& c, std::string& info) {
  const Graph g = c6_plus();
  const auto t0 = Clock::now();
  const auto out = certify(g);
  c.require(out.status == CertifyStatus::kCertified, "not certified");
  if (!out.certificate) return;
  const auto& cert = *out.certificate;
  c.require(verify_certificate(g, cert).ok(), "verify failed");
  const double secs = since(t0);
  c.require(secs < 5.0, "too slow");
  c.require(cert.layers.size() == 2, "layer count");
  std::set<std::vector<int>> layers(cert.layers.begin(), cert.layers.end());
  c.require(layers.count({0, 1, 3, 4, 6, 7}) && layers.count({2, 5, 8}), "layers are not cycle + star");
  // Adjacent seeds at a cut vertex percolate; far-apart seeds do not.
  const auto near = c6p_layers(g, {g.edge_index(1, 2), g.edge_index(2, 6)});
  const auto far = c6p_layers(g, {g.edge_index(0, 1), g.edge_index(4, 6)});
  c.require(find_layered_percolation(g, near).has_value(), "seed pair {3,5} rejected");
  c.require(!find_layered_percolation(g, far).has_value(), "seed pair {0,8} accepted");
  info = std::to_string(secs) + " s";
}

void ac2(Check& c, std::string& info) {
  const Graph g = one_subdivision(complete_bipartite(3, 3));
  c.require(g.n() == 15 && g.num_edges() == 18, "shape");
  const auto t0 = Clock::now();
  const auto out = certify(g);
  c.require(out.status == CertifyStatus::kCertified, "not certified: " + out.reason);
  if (!out.certificate) return;
  c.require(verify_certificate(g, *out.certificate).ok(), "verify failed");
  const double secs = since(t0);
  c.require(secs < 60.0, "too slow");
  c.require(out.certificate->layers.size() == 2, "layer count");
  info = std::to_string(secs) + " s";
}

void ac3(Check& c, std::string& info) {
  const auto t0 = Clock::now();
  for (const Graph& g : {even_cycle(4), even_cycle(6), complete_bipartite(3, 3), hypercube(3)}) {
    LayerStructure ls{{g.all_edges()}, find_cut_involutions(g), {0}};
    const auto sig = find_layered_percolation(g, ls);
    c.require(sig.has_value(), "no sequence for " + canonical_text(g));
    if (sig) c.require(replay(g, g.subset(std::vector<int>{0}), ls, *sig).full(), "replay incomplete");
  }
  const double secs = since(t0);
  c.require(secs < 30.0, "too slow");
  info = std::to_string(secs) + " s";
}

void ac4(Check& c, std::string& info) {
  const Graph g = c6_plus();
  const auto out = certify(g);
  c.require(out.certificate.has_value(), "not certified");
  if (!out.certificate) return;
  const auto ls = layer_structure(g, *out.certificate);
  int failures = 0;
  for (EdgeMask f0 = 0; f0 < (EdgeMask{1} << 9); ++f0) {
    EdgeMask want = 0;
    for (int i = 0; i < ls.k(); ++i)
      if ((f0 >> ls.seeds[i]) & 1U) want |= ls.layers[i].bits();
    failures += replay(g, g.subset(f0), ls, out.certificate->signature).bits() != want;
  }
  c.require(failures == 0, std::to_string(failures) + " failures");
  info = "512 starting sets";
}

void ac5(Check& c, std::string& info) {
  std::mt19937_64 rng(5);
  const std::vector<Graph> hosts{even_cycle(6), c6_plus(), hypercube(3)};
  std::vector<std::vector<CutInvolution>> invs;
  for (const auto& g : hosts) invs.push_back(find_cut_involutions(g));
  int trials = 0, failures = 0;
  double worst = -1;
  while (trials < 10000) {
    for (std::size_t h = 0; h < hosts.size(); ++h)
      for (const auto& phi : invs[h]) {
        const Graph& g = hosts[h];
        const auto w = random_kernel(rng, 1 + static_cast<int>(rng() % 4));
        const EdgeSubset j = g.subset(rng() & full_mask(g.num_edges()));
        auto t = [&](const EdgeSubset& s) {
          std::vector<Edge> e;
          for (int i : s.indices()) e.push_back(g.edge(i));
          return density_value(Graph(g.n(), e), w);
        };
        const double tj = t(j);
        const double tp = t(fold(j, make_half_fold(g, phi, Side::kLeft)));
        const double tm = t(fold(j, make_half_fold(g, phi, Side::kRight)));
        const double gap = tj - std::sqrt(tp * tm);
        worst = std::max(worst, gap);
        failures += gap > 1e-12;
        ++trials;
      }
  }
  c.require(failures == 0, std::to_string(failures) + " failures");
  std::ostringstream s;
  s << trials << " trials, worst gap " << worst;
  info = s.str();
}

void ac6(Check& c, std::string& info) {
  const auto all = all_bipartite_graphs(8);
  int mismatches = 0;
  for (const auto& g : all) {
    const auto rep = screen(g);
    const auto o = screen_oracle(g);
    mismatches += rep.one_balanced != o.one_balanced || rep.small_side_regular != o.side_regular ||
                  rep.components_identical != o.identical || !rep.bipartite;
  }
  c.require(all.size() == 412, "enumeration size " + std::to_string(all.size()));
  c.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  const auto p4 = screen(path(4));
  c.require(!p4.pass() && p4.has(ScreenReason::kSideIrregular), "P4 not SIDE_IRREGULAR");
  c.require(screen(disjoint_union(star(2), star(2))).components_identical, "2 K12 components");
  const std::vector<Graph> library{path(2),
                                   path(5),
                                   even_cycle(4),
                                   even_cycle(6),
                                   even_cycle(8),
                                   star(3),
                                   complete_bipartite(2, 3),
                                   complete_bipartite(3, 3),
                                   hypercube(3),
                                   hypercube(4),
                                   hypercube_ball(3, 1),
                                   c6_plus(),
                                   perfect_tree(2, 2),
                                   perfect_tree(3, 2),
                                   one_subdivision(complete_bipartite(3, 3)),
                                   k2t_replacement(complete_bipartite(2, 2), 2),
                                   bipartite_kneser(5, 2),
                                   octahedron(),
                                   octahedron_subdivision(),
                                   reflection_graph(3, {1}, {2}),
                                   star_replacement_graph({3, {{1}, {2}, {1, 2}}, 1}).graph};
  int checked = 0;
  for (const auto& h : library)
    for (int n = 1; n <= 6; ++n) {
      const auto d = density_step(h, StepGraphon::identity_blocks(n));
      c.require(d.exact && *d.exact == pow(make_rational(1, n), static_cast<unsigned>(h.n() - 1)),
                "block formula fails for " + canonical_text(h));
      ++checked;
    }
  info = std::to_string(all.size()) + " graphs, " + std::to_string(checked) + " block densities";
}

void ac7(Check& c, std::string& info) {
  FalsifyTask a;
  a.h = path(4);
  a.hprime = path(3);
  const auto t0 = Clock::now();
  const auto ra = falsify(a);
  const double secs = since(t0);
  c.require(ra.counterexample.has_value() && secs < 1.0, "(a) no violation within 1 s");
  if (ra.counterexample) {
    c.require(ra.counterexample->provenance.find("two-block") != std::string::npos, "(a) not from the seed family");
    c.require(exact_violation(a.h, a.hprime, ra.counterexample->graphon), "(a) exact recheck");
  }
  FalsifyTask b;
  b.h = Graph::from_pairs(3, {{0, 1}, {1, 2}, {0, 2}});
  b.hprime = path(2);
  c.require(falsify(b).counterexample.has_value(), "(b) K3 vs K2");

  std::mt19937_64 rng(7);
  double worst = 1;
  int search_hits = 0;
  for (int s = 0; s < 50; ++s) {
    const Graph sub = random_subgraph(rng, c6_plus());
    for (int t = 0; t < 1000; ++t)
      worst = std::min(worst, domination_margin(c6_plus(), sub, random_kernel(rng, 1 + static_cast<int>(rng() % 4))));
    FalsifyTask task;
    task.h = c6_plus();
    task.hprime = sub;
    task.restarts = 1;
    task.iterations = 20;
    task.seed = s;
    search_hits += falsify(task).counterexample.has_value();
  }
  c.require(worst >= -1e-9, "(c) negative margin");
  c.require(search_hits == 0, "(c) falsifier reported a violation");
  std::ostringstream s;
  s << "(a) " << secs << " s, (c) min margin " << worst;
  info = s.str();
}

void ac8(Check& c, std::string& info) {
  std::mt19937_64 rng(8);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const Graph p = random_connected(rng, 2 + static_cast<int>(rng() % 5), 0.3);
    const int k = 1 + static_cast<int>(rng() % 4);
    const auto w = random_kernel(rng, k);
    const auto g = density_gradient_kernel(p, w);
    const double h = 1e-5;
    double diff = 0, norm = 0;
    for (int a = 0; a < k; ++a)
      for (int b = a; b < k; ++b) {
        auto up = w, dn = w;
        up.at(a, b) += h, dn.at(a, b) -= h;
        if (a != b) up.at(b, a) += h, dn.at(b, a) -= h;
        const double fd = (density_value(p, up) - density_value(p, dn)) / (2 * h);
        diff += (fd - g[a * k + b]) * (fd - g[a * k + b]);
        norm += g[a * k + b] * g[a * k + b];
      }
    const double rel = std::sqrt(diff) / std::max(std::sqrt(norm), 1e-300);
    worst = std::max(worst, rel);
  }
  c.require(worst <= 1e-6, "relative error " + std::to_string(worst));
  std::ostringstream s;
  s << "worst relative error " << worst;
  info = s.str();
}

void ac9(Check& c, std::string& info) {
  CertifyOptions opts;
  opts.kinds = kAllowRecursiveSuper;
  const auto t0 = Clock::now();
  for (const Graph& g : {perfect_tree(2, 2), perfect_tree(3, 2)}) {
    const auto out = certify(g, opts);
    c.require(out.status == CertifyStatus::kCertified, "not certified: " + out.reason);
    if (!out.certificate) continue;
    c.require(certify_kinds_all(*out.certificate, RelocationKind::kRecursiveSuper), "kinds");
    c.require(verify_certificate(g, *out.certificate).ok(), "verify failed");
  }
  const double secs = since(t0);
  c.require(secs < 60.0, "too slow");
  info = std::to_string(secs) + " s";
}

void ac10(Check& c, std::string&) {
  c.require(isomorphic(hypercube_ball(3, 2), c6_plus()), "ball");
  c.require(isomorphic(star_replacement_graph({3, {{1}, {2}, {1, 2}}, 1}).graph, c6_plus()), "star replacement");
  c.require(isomorphic(reflection_graph(3, {1}, {2}), even_cycle(6)), "reflection graph");
  std::mt19937_64 rng(10);
  for (int t = 0; t < 50; ++t) {
    const Graph h = random_graph(rng, 2 + static_cast<int>(rng() % 6), 0.5);
    c.require(isomorphic(one_subdivision(h), k2t_replacement(h, 1)), "subdivision");
  }
}

void ac11(Check& c, std::string& info) {
  for (auto [k, l] : {std::pair{1, 2}, std::pair{2, 3}}) {
    const auto r = explore_ball_domination(3, k, l);
    c.require(!r.violation, "violation reported");
    c.require(explore_to_json(r)["verdict"] == "NO_VIOLATION_FOUND", "verdict");
    info += "(3," + std::to_string(k) + "," + std::to_string(l) + ") NO_VIOLATION_FOUND ";
  }
  info += "(search evidence, not a proof)";
}

}  // namespace

int main() {
  const std::vector<std::function<void(Check&, std::string&)>> criteria{ac1, ac2, ac3, ac4, ac5, ac6,
                                                                        ac7, ac8, ac9, ac10, ac11};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    std::string info;
    try {
      criteria[i](c, info);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    failed += !c.ok;
    std::printf("AC%zu %s %s\n", i + 1, c.ok ? "PASS" : "FAIL", c.ok ? info.c_str() : c.why.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
