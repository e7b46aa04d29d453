#pragma once

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "domcert/certify.hpp"
#include "domcert/constructions.hpp"
#include "domcert/falsify.hpp"
#include "domcert/graph_io.hpp"
#include "domcert/graphon.hpp"
#include "domcert/involution.hpp"
#include "domcert/percolation.hpp"
#include "domcert/screening.hpp"

namespace domcert::cli {

enum ExitCode : int { kOk = 0, kFail = 1, kUsage = 2, kViolation = 10 };

namespace detail {

// "1;2;1,2" -> {{1},{2},{1,2}}; an empty group is allowed ("1;;2").
inline std::vector<std::vector<int>> parse_subsets(const std::string& text) {
  std::vector<std::vector<int>> out;
  std::stringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    out.emplace_back();
    std::stringstream items(group);
    std::string item;
    while (std::getline(items, item, ','))
      if (!item.empty()) out.back().push_back(std::stoi(item));
  }
  return out;
}

inline void need(const std::vector<int>& p, std::size_t n, const std::string& family) {
  if (p.size() != n)
    throw BadParams(family + " takes " + std::to_string(n) + " integer parameter" + (n == 1 ? "" : "s"));
}

// Layers and seeds suggested for a graph: orbits of all cut involutions and
// the smallest edge of each.
inline Json default_hints(const Graph& g) {
  const auto invs = find_cut_involutions(g);
  Json j{{"layers", Json::array()}, {"seeds", Json::array()}};
  if (invs.empty()) return j;
  const auto orbits = edge_orbits(g, invs);
  for (const auto& o : orbits) {
    j["layers"].push_back(o);
    j["seeds"].push_back(o.front());
  }
  return j;
}

struct Output {
  std::ostream& out;
  std::ostream& err;
  bool json_only = false;

  void payload(const Json& j) const { out << j.dump(2) << "\n"; }
  void note(const std::string& s) const {
    if (!json_only) err << s << "\n";
  }
};

// Involutions preserving every given layer.
inline std::vector<CutInvolution> preserving(const Graph& g, const std::vector<std::vector<int>>& layers) {
  std::vector<int> layer_of(g.num_edges(), -1);
  for (std::size_t i = 0; i < layers.size(); ++i)
    for (int e : layers[i]) {
      if (e < 0 || e >= g.num_edges()) throw ParseError("layer edge index out of range");
      layer_of[e] = static_cast<int>(i);
    }
  std::vector<CutInvolution> out;
  for (const auto& phi : find_cut_involutions(g)) {
    bool ok = true;
    for (int e = 0; e < g.num_edges() && ok; ++e) ok = layer_of[map_edge(g, phi.perm.image, e)] == layer_of[e];
    if (ok) out.push_back(phi);
  }
  return out;
}

}  // namespace detail

/// Runs one command line; returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Dominating-graph certification toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json_only = false;
  app.add_flag("--json", json_only, "machine output only");
  std::uint64_t seed = 1;
  std::function<int()> action;
  detail::Output io{out, err, false};

  // construct
  auto* c_construct = app.add_subcommand("construct", "generate a construction-family graph");
  std::string family, c_out, c_base, c_subsets, c_side;
  std::vector<int> c_params;
  int c_center = 1, c_t = 1, c_m = 1;
  bool c_hints = false;
  c_construct->add_option("family", family, "family name")->required();
  c_construct->add_option("params", c_params, "integer parameters");
  c_construct->add_option("-o,--output", c_out, "output file (stdout when absent)");
  c_construct->add_option("--base", c_base, "base graph file for derived families");
  c_construct->add_option("--subsets", c_subsets, "generator subsets, e.g. \"1;2;1,2\"");
  c_construct->add_option("--center", c_center, "centre part (1-based)");
  c_construct->add_option("--side", c_side, "vertex list for h_a_plus, e.g. \"0,2,4\"");
  c_construct->add_option("--t", c_t, "K_{2,t} parameter");
  c_construct->add_option("--m", c_m, "tensor parameter");
  c_construct->add_flag("--with-hints", c_hints, "write <output>.hints.json with layers and seeds");
  c_construct->callback([&] {
    action = [&]() -> int {
      auto base = [&] {
        if (c_base.empty()) throw BadParams(family + " needs --base");
        return read_graph_file(c_base);
      };
      Graph g;
      std::optional<Json> hints;
      const auto& p = c_params;
      if (family == "path") detail::need(p, 1, family), g = path(p[0]);
      else if (family == "even_cycle") detail::need(p, 1, family), g = even_cycle(p[0]);
      else if (family == "star") detail::need(p, 1, family), g = star(p[0]);
      else if (family == "complete_bipartite") detail::need(p, 2, family), g = complete_bipartite(p[0], p[1]);
      else if (family == "hypercube") detail::need(p, 1, family), g = hypercube(p[0]);
      else if (family == "hypercube_ball") detail::need(p, 2, family), g = hypercube_ball(p[0], p[1]);
      else if (family == "c6_plus") detail::need(p, 0, family), g = c6_plus();
      else if (family == "octahedron") detail::need(p, 0, family), g = octahedron();
      else if (family == "octahedron_subdivision") detail::need(p, 0, family), g = octahedron_subdivision();
      else if (family == "bipartite_kneser") detail::need(p, 2, family), g = bipartite_kneser(p[0], p[1]);
      else if (family == "perfect_tree") detail::need(p, 2, family), g = perfect_tree(p[0], p[1]);
      else if (family == "one_subdivision") g = one_subdivision(base());
      else if (family == "k2t_replacement") g = k2t_replacement(base(), c_t);
      else if (family == "tensor_kmm") g = tensor_kmm(base(), c_m);
      else if (family == "h_a_plus") {
        if (c_side.empty()) {
          g = h_a_plus(base());
        } else {
          const auto groups = detail::parse_subsets(c_side);
          g = h_a_plus(base(), groups.empty() ? std::vector<int>{} : groups.front());
        }
      } else if (family == "reflection_graph") {
        detail::need(p, 1, family);
        const auto s = detail::parse_subsets(c_subsets);
        if (s.size() != 2) throw BadParams("reflection_graph needs --subsets with two groups");
        g = reflection_graph(p[0], s[0], s[1]);
      } else if (family == "star_replacement") {
        detail::need(p, 1, family);
        const auto h = star_replacement_graph({p[0], detail::parse_subsets(c_subsets), c_center});
        g = h.graph;
        hints = Json{{"layers", h.layers}, {"seeds", h.seeds}};
      } else {
        throw BadParams("unknown family " + family);
      }
      const Json gj = graph_to_json(g);
      if (c_out.empty()) io.payload(gj);
      else write_json_file(c_out, gj);
      if (c_hints) {
        if (c_out.empty()) throw BadParams("--with-hints needs -o");
        write_json_file(c_out + ".hints.json", hints ? *hints : detail::default_hints(g));
      }
      io.note(family + ": " + std::to_string(g.n()) + " vertices, " + std::to_string(g.num_edges()) + " edges");
      return kOk;
    };
  });

  // screen
  auto* c_screen = app.add_subcommand("screen", "run the necessary-condition screen");
  std::string graph_file;
  c_screen->add_option("graph", graph_file)->required();
  c_screen->callback([&] {
    action = [&]() -> int {
      const auto rep = screen(read_graph_file(graph_file));
      io.payload(screen_to_json(rep));
      if (rep.pass()) {
        io.note("screen: PASS");
        return kOk;
      }
      io.note(std::string("screen: FAIL ") + reason_code(rep.failures.front().reason));
      return kFail;
    };
  });

  // involutions
  auto* c_inv = app.add_subcommand("involutions", "list cut involutions and their edge orbits");
  c_inv->add_option("graph", graph_file)->required();
  c_inv->callback([&] {
    action = [&]() -> int {
      const Graph g = read_graph_file(graph_file);
      const auto invs = find_cut_involutions(g);
      Json list = Json::array();
      for (const auto& phi : invs) list.push_back(involution_to_json(phi));
      Json j{{"involutions", list}, {"orbits", invs.empty() ? Json::array() : Json(edge_orbits(g, invs))}};
      io.payload(j);
      io.note(std::to_string(invs.size()) + " cut involutions");
      return kOk;
    };
  });

  // percolate
  auto* c_perc = app.add_subcommand("percolate", "search for a (layered) percolating sequence");
  std::string hints_file;
  c_perc->add_option("graph", graph_file)->required();
  c_perc->add_option("--layers", hints_file, "hints file with \"layers\" and \"seeds\"");
  c_perc->add_option("--seed", seed, "rng seed for the multi-percolation sample");
  c_perc->callback([&] {
    action = [&]() -> int {
      const Graph g = read_graph_file(graph_file);
      LayerStructure ls;
      if (!hints_file.empty()) {
        const Json h = read_json_file(hints_file);
        const auto layers = h.at("layers").get<std::vector<std::vector<int>>>();
        for (const auto& l : layers) ls.layers.push_back(g.subset(l));
        ls.seeds = h.at("seeds").get<std::vector<int>>();
        ls.phi = detail::preserving(g, layers);
      } else {
        ls.phi = find_cut_involutions(g);
        ls.layers.push_back(g.all_edges());
        ls.seeds.push_back(0);
      }
      if (ls.phi.empty()) {
        io.payload(Json{{"result", "NO_INVOLUTIONS"}});
        io.note("no cut involutions preserve the layers");
        return kFail;
      }
      std::optional<Signature> sig;
      if (hints_file.empty()) {
        // Single layer: fold outward from edge 0.
        sig = find_percolating_sequence(g, ls.phi, g.subset(std::vector<int>{0}), g.all_edges());
      } else {
        sig = find_layered_percolation(g, ls, default_max_states(), 10000, seed);
      }
      Json phi = Json::array();
      for (const auto& p : ls.phi) phi.push_back(involution_to_json(p));
      if (!sig) {
        io.payload(Json{{"result", "NONE"}, {"phi", phi}});
        io.note("no percolating sequence");
        return kFail;
      }
      io.payload(Json{{"result", "FOUND"}, {"phi", phi}, {"seeds", ls.seeds}, {"signature", signature_to_json(*sig)}});
      io.note("percolating sequence of length " + std::to_string(sig->size()));
      return kOk;
    };
  });

  // certify
  auto* c_cert = app.add_subcommand("certify", "search for a domination certificate");
  std::string cert_out, kinds_text = "ISO_COPY,STAR_UNION,RECURSIVE_SUPER";
  CertifyOptions copts;
  bool strong = false;
  c_cert->add_option("graph", graph_file)->required();
  c_cert->add_option("-o,--output", cert_out, "certificate file (stdout when absent)");
  c_cert->add_option("--max-layers", copts.max_layers, "largest layer count tried");
  c_cert->add_option("--kinds", kinds_text, "relocation kinds to try, comma separated");
  c_cert->add_option("--budget", copts.budget, "work-unit budget");
  c_cert->add_option("--seed", seed, "rng seed for sampled checks");
  c_cert->add_flag("--strong", strong, "require stable involutions (strong domination)");
  c_cert->add_flag("--skip-screen", copts.skip_screen, "do not require the screen to pass");
  c_cert->callback([&] {
    action = [&]() -> int {
      const Graph g = read_graph_file(graph_file);
      copts.mode = strong ? CertMode::kStrong : CertMode::kDominating;
      copts.verify.seed = seed;
      copts.kinds = 0;
      std::stringstream ks(kinds_text);
      std::string kind;
      while (std::getline(ks, kind, ',')) {
        switch (parse_kind(kind)) {
          case RelocationKind::kIsoCopy: copts.kinds |= kAllowIsoCopy; break;
          case RelocationKind::kStarUnion: copts.kinds |= kAllowStarUnion; break;
          case RelocationKind::kRecursiveSuper: copts.kinds |= kAllowRecursiveSuper; break;
          case RelocationKind::kAsserted: throw BadParams("ASSERTED witnesses are never searched for");
        }
      }
      const auto res = certify(g, copts);
      if (res.certificate) {
        const Json cj = certificate_to_json(*res.certificate);
        if (cert_out.empty()) io.payload(cj);
        else write_json_file(cert_out, cj);
        io.note("certified: " + std::to_string(res.certificate->layers.size()) + " layers, signature length " +
                std::to_string(res.certificate->signature.size()));
        return kOk;
      }
      io.payload(Json{{"status", status_name(res.status)}, {"reason", res.reason}, {"work", res.work}});
      io.note(std::string(status_name(res.status)) + ": " + res.reason);
      return res.status == CertifyStatus::kBudgetExhausted ? kUsage : kFail;
    };
  });

  // verify
  auto* c_ver = app.add_subcommand("verify", "recheck a certificate");
  std::string cert_file;
  VerifyOptions vopts;
  c_ver->add_option("graph", graph_file)->required();
  c_ver->add_option("certificate", cert_file)->required();
  c_ver->add_flag("--allow-asserted", vopts.allow_asserted, "accept numerically spot-checked witnesses");
  c_ver->add_option("--seed", seed, "rng seed for sampled checks");
  c_ver->callback([&] {
    action = [&]() -> int {
      const Graph g = read_graph_file(graph_file);
      vopts.seed = seed;
      const auto cert = certificate_from_json(read_json_file(cert_file), &g);
      const auto rep = verify_certificate(g, cert, vopts);
      io.payload(verify_to_json(rep));
      for (const auto& c : rep.clauses)
        io.note((c.pass ? "PASS " : "FAIL ") + c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));
      if (!rep.sound) io.note("note: relies on asserted witnesses; not a proof");
      return rep.ok() ? kOk : kFail;
    };
  });

  // falsify
  auto* c_fal = app.add_subcommand("falsify", "search step graphons for a domination violation");
  std::string h_file, sub_file;
  FalsifyTask task;
  c_fal->set_help_flag("--help", "print this help message and exit");
  c_fal->add_option("--h", h_file, "dominating candidate graph")->required();
  c_fal->add_option("--sub", sub_file)->required();
  c_fal->add_option("--blocks", task.blocks);
  c_fal->add_flag("--signed", task.signed_mode);
  c_fal->add_option("--restarts", task.restarts);
  c_fal->add_option("--iters", task.iterations);
  c_fal->add_option("--seed", seed);
  c_fal->callback([&] {
    action = [&]() -> int {
      task.h = read_graph_file(h_file);
      task.hprime = read_graph_file(sub_file);
      task.seed = seed;
      const auto res = falsify(task);
      if (res.counterexample) {
        io.payload(Json{{"verdict", "VIOLATION"},
                        {"counterexample", counterexample_to_json(*res.counterexample)},
                        {"stats", falsify_stats_to_json(res.stats)}});
        io.note("violation confirmed exactly: " + res.counterexample->provenance);
        return kViolation;
      }
      io.payload(Json{{"verdict", "NO_VIOLATION_FOUND"}, {"stats", falsify_stats_to_json(res.stats)}});
      io.note("no violation found (search evidence only)");
      return kOk;
    };
  });

  // explore
  auto* c_exp = app.add_subcommand("explore", "falsifier run on hypercube balls Q_n(l) vs Q_n(k)");
  int en = 3, ek = 1, el = 2;
  FalsifyTask etask;
  c_exp->add_option("n", en)->required();
  c_exp->add_option("k", ek)->required();
  c_exp->add_option("l", el)->required();
  c_exp->add_option("--blocks", etask.blocks);
  c_exp->add_option("--restarts", etask.restarts);
  c_exp->add_option("--iters", etask.iterations);
  c_exp->add_option("--seed", seed);
  c_exp->callback([&] {
    action = [&]() -> int {
      etask.seed = seed;
      const auto rep = explore_ball_domination(en, ek, el, etask);
      io.payload(explore_to_json(rep));
      io.note(rep.violation ? "VIOLATION" : "NO_VIOLATION_FOUND (evidence, not proof)");
      return rep.violation ? kViolation : kOk;
    };
  });

  // density
  auto* c_den = app.add_subcommand("density", "homomorphism density of a pattern");
  std::string pattern_file, graphon_file, target_file;
  c_den->add_option("--pattern", pattern_file)->required();
  auto* og = c_den->add_option("--graphon", graphon_file);
  auto* ot = c_den->add_option("--target", target_file);
  og->excludes(ot);
  c_den->callback([&] {
    action = [&]() -> int {
      const Graph p = read_graph_file(pattern_file);
      DensityValue d;
      if (!graphon_file.empty()) d = density_step(p, graphon_from_json(read_json_file(graphon_file)));
      else if (!target_file.empty()) d = density_graph(p, read_graph_file(target_file));
      else throw BadParams("density needs --graphon or --target");
      Json j{{"value", d.value}};
      if (d.exact) j["exact"] = to_string(*d.exact);
      io.payload(j);
      io.note("t = " + (d.exact ? to_string(*d.exact) : std::to_string(d.value)));
      return kOk;
    };
  });

  // hom
  auto* c_hom = app.add_subcommand("hom", "count homomorphisms");
  c_hom->add_option("--pattern", pattern_file)->required();
  c_hom->add_option("--target", target_file)->required();
  c_hom->callback([&] {
    action = [&]() -> int {
      const BigInt count = hom_count(read_graph_file(pattern_file), read_graph_file(target_file));
      io.payload(Json{{"hom", count.str()}});
      io.note("hom = " + count.str());
      return kOk;
    };
  });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  io.json_only = json_only;
  try {
    return action ? action() : kUsage;
  } catch (const HashMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kFail;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Json::exception& e) {
    err << "error: malformed JSON input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: bad number: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace domcert::cli
