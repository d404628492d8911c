#pragma once

// Built-in examples by name, as the file text the CLI would read.

#include <map>
#include <string>
#include <vector>

#include "termnet/builders.hpp"
#include "termnet/dynamic_networks.hpp"
#include "termnet/io.hpp"
#include "termnet/multiuser.hpp"

namespace termnet::build {

// Two sources, one coding node, two users each missing one source.
inline const char* butterfly_network_text() {
  return R"({
  "nodes": [
    {"name": "x", "kind": "source"},
    {"name": "y", "kind": "source"},
    {"name": "f", "kind": "inner", "in": ["x", "y"]},
    {"name": "u1", "kind": "user", "in": ["x", "f"]},
    {"name": "u2", "kind": "user", "in": ["f", "y"]}
  ]
}
)";
}

// Two storage nodes f, g over sources x, y; six users read every pair of
// {x, y, f, g}. The user holding {x, y} is trivially satisfied.
inline const char* storage_network_text() {
  return R"({
  "nodes": [
    {"name": "x", "kind": "source"},
    {"name": "y", "kind": "source"},
    {"name": "f", "kind": "inner", "in": ["x", "y"]},
    {"name": "g", "kind": "inner", "in": ["x", "y"]},
    {"name": "u1", "kind": "user", "in": ["x", "y"]},
    {"name": "u2", "kind": "user", "in": ["x", "f"]},
    {"name": "u3", "kind": "user", "in": ["y", "f"]},
    {"name": "u4", "kind": "user", "in": ["x", "g"]},
    {"name": "u5", "kind": "user", "in": ["y", "g"]},
    {"name": "u6", "kind": "user", "in": ["f", "g"]}
  ]
}
)";
}

// In each world one of the two links into a user carries pure noise.
inline const char* example17_text() {
  return R"({
  "users": ["u1", "u2"],
  "worlds": [
    {"name": "w1", "probability": 0.5},
    {"name": "w2", "probability": 0.5}
  ],
  "slots": [{"name": "t1", "weight": 1.0}],
  "cells": [
    {"user": "u1", "world": "w1", "termset": "term noise1\nterm f(x,y)\nrequire x\n"},
    {"user": "u2", "world": "w1", "termset": "term y\nterm f(x,y)\nrequire y\n"},
    {"user": "u1", "world": "w2", "termset": "term x\nterm f(x,y)\nrequire x\n"},
    {"user": "u2", "world": "w2", "termset": "term noise2\nterm f(x,y)\nrequire y\n"}
  ],
  "utility": [
    {"user": "u1", "form": "weighted_linear", "threshold": 0.5, "strict": false},
    {"user": "u2", "form": "weighted_linear", "threshold": 0.5, "strict": false}
  ],
  "messages": [
    {"user": "u1", "world": "w1", "variables": ["x"]},
    {"user": "u2", "world": "w1", "variables": ["y"]},
    {"user": "u1", "world": "w2", "variables": ["x"]},
    {"user": "u2", "world": "w2", "variables": ["y"]}
  ]
}
)";
}

inline NetworkInstance butterfly_network() { return parse_network(butterfly_network_text()); }
inline NetworkInstance storage_network() { return parse_network(storage_network_text()); }
inline DynamicNetwork example17() { return parse_dynamic_network(example17_text()); }

// Product over F2, the coding function whose image is largest on the case study.
inline Interpretation f3_interp() { return product_f2(); }

struct CatalogEntry {
  std::string name;
  std::string extension;  // ts, net, dyn.json, interp.json
  std::string description;
};

inline std::vector<CatalogEntry> catalog() {
  return {
      {"gamma1", "ts", "four terms over x, y, z, w with shared subterms; min-cut 3"},
      {"example8", "ts", "a term set whose undirected and directed cuts differ"},
      {"case_study", "ts", "f(x,y), f(x,z), f(w,y), f(w,z); min-cut 4"},
      {"gamma_k", "ts", "k^2 terms in k^2 variables sharing one symbol (k = 3)"},
      {"gamma_prime", "ts", "f(g_i(h1), h2, ..., h_{k+1}) for i = 1..k+1 (k = 2)"},
      {"prop8", "ts", "gamma_prime with h_j(x1, ..., xk) in place of h_j (k = 2)"},
      {"example12", "ts", "f(f(x1,x2), f(x2,x1)), g(g(x1,x2), g(x2,x1))"},
      {"butterfly", "net", "two sources, one coding node, two users"},
      {"storage", "net", "two sources, two storage nodes, six users"},
      {"example17", "dyn.json", "two worlds where one link per user is noise"},
      {"f3", "interp.json", "product over F2"},
      {"psi3", "interp.json", "(a - b)^2 + a + b over Z3"},
  };
}

inline std::string catalog_text(const std::string& name, int k = 0) {
  if (name == "gamma1") return to_dsl(gamma1());
  if (name == "example8") return to_dsl(example8());
  if (name == "case_study") return to_dsl(case_study());
  if (name == "gamma_k") return to_dsl(gamma_k(k ? k : 3));
  if (name == "gamma_prime") return to_dsl(gamma_prime(k ? k : 2));
  if (name == "prop8") return to_dsl(prop8_gamma(k ? k : 2));
  if (name == "example12") return to_dsl(example12());
  if (name == "butterfly") return butterfly_network_text();
  if (name == "storage") return storage_network_text();
  if (name == "example17") return example17_text();
  if (name == "f3") return io::to_json(f3_interp()).dump(2) + "\n";
  if (name == "psi3") return io::to_json(case_study_interp(3)).dump(2) + "\n";
  throw PreconditionError("no built-in example named '" + name + "'");
}

}  // namespace termnet::build
