#pragma once

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <sstream>
#include <string>

#include "domcert/graph.hpp"
#include "json.hpp"

namespace domcert {

using Json = nlohmann::json;

/// Canonical text form: "n=<n>;u,v;u,v;..." in canonical edge order.
inline std::string canonical_text(const Graph& g) {
  std::string s = "n=" + std::to_string(g.n()) + ";";
  for (const auto& e : g.edges()) s += std::to_string(e.u) + "," + std::to_string(e.v) + ";";
  return s;
}

inline std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

inline std::string graph_sha(const Graph& g) { return sha256_hex(canonical_text(g)); }

inline Json graph_to_json(const Graph& g) {
  Json j;
  j["n"] = g.n();
  Json edges = Json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
  j["edges"] = std::move(edges);
  if (!g.labels().empty()) j["labels"] = g.labels();
  return j;
}

inline Graph graph_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
    throw ParseError("graph JSON needs fields \"n\" and \"edges\"");
  if (!j["n"].is_number_integer()) throw ParseError("\"n\" must be an integer");
  const int n = j["n"].get<int>();
  std::vector<Edge> edges;
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw ParseError("each edge must be a pair of integers, got " + e.dump());
    edges.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  std::vector<std::string> labels;
  if (j.contains("labels") && !j["labels"].is_null()) labels = j["labels"].get<std::vector<std::string>>();
  return Graph(n, std::move(edges), std::move(labels));
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

inline Graph read_graph_file(const std::string& path) { return graph_from_json(read_json_file(path)); }

inline Json permutation_to_json(const VertexPermutation& p) { return p.image; }

}  // namespace domcert
