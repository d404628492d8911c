#pragma once

// JSON forms of interpretations, algebras, reports and routing codebooks.
// Output is canonical: ordered keys, tables sorted by symbol.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "termnet/algebra.hpp"
#include "termnet/interpretation.hpp"
#include "termnet/mincut.hpp"
#include "termnet/routing.hpp"

namespace termnet::io {

using json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write " + path);
  out << text;
}

// 64-bit FNV-1a, hex.
inline std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// -inf (and any non-finite value) serializes as null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const Interpretation& interp) {
  json j;
  j["alphabet"] = interp.alphabet_size();
  j["functions"] = json::array();
  for (const auto& [name, table] : interp.tables()) {
    const auto t = table.materialized();
    j["functions"].push_back({{"symbol", name}, {"arity", t.arity()}, {"table", t.outputs()}});
  }
  return j;
}

inline Interpretation interpretation_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Interpretation interp(j.at("alphabet").get<int>());
    for (const auto& f : j.at("functions"))
      interp.set(f.at("symbol").get<std::string>(), f.at("arity").get<int>(),
                 f.at("table").get<std::vector<int>>());
    return interp;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("interpretation file: ") + e.what());
  }
}

// {"kind": "field", "add": [[...]], "mul": [[...]]} or {"kind": "group", "op": [[...]]};
// "prime_field" / "ring" / "gf2m" / "vector_space" take a "size" or "m".
inline AlgebraSpec algebra_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto kind = j.at("kind").get<std::string>();
    const auto name = j.value("name", std::string());
    if (kind == "field") return AlgebraSpec::field_from_tables(j.at("add"), j.at("mul"), name);
    if (kind == "group") return AlgebraSpec::group_from_table(j.at("op"), name);
    if (kind == "prime_field") return AlgebraSpec::prime_field(j.at("size"));
    if (kind == "ring") return AlgebraSpec::modular_ring(j.at("size"));
    if (kind == "gf2m") return AlgebraSpec::gf2m(j.at("m"));
    if (kind == "vector_space") return AlgebraSpec::vector_space_f2(j.at("m"));
    throw ParseError("unknown algebra kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("algebra file: ") + e.what());
  }
}

inline json histogram_json(const Histogram& h) {
  json out = json::array();
  for (const auto& [m, c] : h) out.push_back({{"multiplicity", m}, {"count", c}});
  return out;
}

inline json to_json(const DispersionValue& d) {
  return {{"count", d.exact_count}, {"log", number(d.log_value)}};
}

inline json to_json(const EvaluationReport& rep) {
  json j;
  j["k"] = rep.k;
  j["r"] = rep.r;
  j["q"] = rep.q;
  j["inputs"] = rep.total_inputs();
  j["image_size"] = rep.image_size;
  j["one_image_size"] = rep.one_image_size;
  j["dispersion"] = number(dispersion(rep).log_value);
  j["one_to_one_dispersion"] = number(one_to_one_dispersion(rep).log_value);
  j["histogram"] = histogram_json(rep.histogram);
  return j;
}

inline json to_json(const TermDag& dag, const CutCertificate& cert) {
  json j;
  j["value"] = cert.value;
  j["cut"] = json::array();
  for (int v : cert.cut_vertices) j["cut"].push_back(dag.index[v].text);
  j["paths"] = json::array();
  for (const auto& p : cert.paths) j["paths"].push_back(describe_path(dag, p));
  return j;
}

// Header codebook: subterm index <-> range of alphabet symbols.
inline json routing_sidecar(const DynamicRouting& dr) {
  const auto& a = dr.alphabet;
  json j;
  j["alphabet"] = a.q;
  j["subterms"] = a.s;
  j["data_size"] = a.B_size;
  j["reserve_size"] = a.R_size;
  j["error_element"] = a.error_element;
  j["headers"] = json::array();
  for (int u = 0; u < a.s; ++u)
    j["headers"].push_back(
        {{"index", u}, {"subterm", dr.codebook[u]}, {"first", a.encode(u, 0)}, {"last", a.encode(u, a.B_size - 1)}});
  return j;
}

inline json paths_json(const TermDag& dag, const PathAssignment& pa) {
  json out = json::array();
  for (const auto& p : pa.paths) out.push_back(describe_path(dag, p));
  return out;
}

}  // namespace termnet::io
