#pragma once

// Random instances shared by the property suite and the acceptance runner.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "termnet/interpretation.hpp"
#include "termnet/term_model.hpp"

namespace termnet::sample {

// Symbols are named after their arity (s1a, s2b, ...) so any two generated
// sets can be combined without arity clashes.
inline TermSet random_term_set(std::mt19937& rng, std::size_t max_subterms = 12, int variables = 4,
                               int max_terms = 4, int max_depth = 3) {
  const char* suffix = "ab";
  std::function<Term(int)> gen = [&](int depth) -> Term {
    if (depth == 0 || rng() % 3 == 0) return Term::var("x" + std::to_string(rng() % variables));
    const int d = 1 + static_cast<int>(rng() % 3);
    std::vector<Term> args;
    for (int i = 0; i < d; ++i) args.push_back(gen(depth - 1));
    return Term::apply("s" + std::to_string(d) + suffix[rng() % 2], std::move(args));
  };
  for (;;) {
    std::vector<Term> terms;
    const int r = 1 + static_cast<int>(rng() % max_terms);
    for (int i = 0; i < r; ++i) terms.push_back(gen(max_depth));
    TermSet ts(std::move(terms));
    if (subterm_closure(ts).size() <= max_subterms) return ts;
  }
}

inline Interpretation random_interpretation(const Signature& sig, int q, std::mt19937& rng) {
  Interpretation I(q);
  for (const auto& f : sig.functions) {
    std::vector<int> table(*checked_pow(q, f.arity));
    for (auto& v : table) v = static_cast<int>(rng() % q);
    I.set(f.name, f.arity, table);
  }
  return I;
}

}  // namespace termnet::sample
