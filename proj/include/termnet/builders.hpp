#pragma once

// Named term sets and coding functions that serve as reference instances.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "termnet/algebra.hpp"
#include "termnet/interpretation.hpp"
#include "termnet/routing.hpp"
#include "termnet/term_model.hpp"

namespace termnet::build {

inline TermSet gamma1() {
  return parse_term_set(
      "term h(f(x,y), g(z,w), f(y,x))\n"
      "term m(g(z,w), f(y,x))\n"
      "term g(f(x,y), g(z,w))\n"
      "term f(g(z,w), f(y,x))\n");
}

inline TermSet example8() {
  return parse_term_set(
      "term h(g(f(z), y), x)\n"
      "term l(f(z))\n"
      "term l(z)\n");
}

inline TermSet case_study() {
  return parse_term_set("term f(x,y)\nterm f(x,z)\nterm f(w,y)\nterm f(w,z)\n");
}

// x<a>_<j> stands for the variable with superscript a and subscript j.
inline TermSet gamma_k(int k) {
  if (k < 2) throw PreconditionError("gamma_k needs k >= 2");
  auto var = [](int a, int j) { return Term::var("x" + std::to_string(a) + "_" + std::to_string(j)); };
  std::vector<Term> terms;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      std::vector<Term> args{var(0, i)};
      for (int a = 1; a < k; ++a) args.push_back(var(a, j));
      terms.push_back(Term::apply("f", std::move(args)));
    }
  return TermSet(std::move(terms));
}

// t_i = f(g_i(h1), h2, ..., h_{k+1}) with the h_j as variables.
inline TermSet gamma_prime(int k) {
  if (k < 1) throw PreconditionError("gamma_prime needs k >= 1");
  std::vector<Term> terms;
  for (int i = 1; i <= k + 1; ++i) {
    std::vector<Term> args{Term::apply("g" + std::to_string(i), {Term::var("h1")})};
    for (int j = 2; j <= k + 1; ++j) args.push_back(Term::var("h" + std::to_string(j)));
    terms.push_back(Term::apply("f", std::move(args)));
  }
  return TermSet(std::move(terms));
}

// The same shape with h_j(x1, ..., xk) in place of the variables h_j.
inline TermSet prop8_gamma(int k) {
  if (k < 1) throw PreconditionError("prop8_gamma needs k >= 1");
  std::vector<Term> xs;
  for (int j = 1; j <= k; ++j) xs.push_back(Term::var("x" + std::to_string(j)));
  auto h = [&](int j) { return Term::apply("h" + std::to_string(j), xs); };
  std::vector<Term> terms;
  for (int i = 1; i <= k + 1; ++i) {
    std::vector<Term> args{Term::apply("g" + std::to_string(i), {h(1)})};
    for (int j = 2; j <= k + 1; ++j) args.push_back(h(j));
    terms.push_back(Term::apply("f", std::move(args)));
  }
  return TermSet(std::move(terms));
}

inline TermSet example12() {
  return parse_term_set(
      "term f(f(x1,x2), f(x2,x1))\n"
      "term g(g(x1,x2), g(x2,x1))\n");
}

inline TermSet butterfly() {
  return parse_term_set("term x1\nterm f(x1,x2)\nterm f(x3,x4)\nterm x4\n");
}

inline TermSet storage() {
  return parse_term_set(
      "term x1\nterm f(x1,y1)\n"
      "term y2\nterm f(x2,y2)\n"
      "term x3\nterm g(x3,y3)\n"
      "term y4\nterm g(x4,y4)\n"
      "term f(x5,y5)\nterm g(x5,y5)\n");
}

// ---------------------------------------------------------------------------
// Coding functions

inline Interpretation product_f2() {
  Interpretation I(2);
  I.set("f", 2, {0, 0, 0, 1});
  return I;
}

// f = first projection, g = sum, h = a2*a3 + 1, m = product, all over F2.
inline Interpretation example9_interp() {
  Interpretation I(2);
  I.set("f", 2, {0, 0, 1, 1});
  I.set("g", 2, {0, 1, 1, 0});
  I.set(CodingTable::tabulate("h", 3, 2, [](std::span<const int> a) { return (a[1] * a[2] + 1) % 2; }));
  I.set("m", 2, {0, 0, 0, 1});
  return I;
}

// psi_p: f(a, b) = (a - b)^2 + a + b over Z_p.
inline Interpretation case_study_interp(int p, std::string symbol = "f") {
  if (p < 2) throw PreconditionError("alphabet size must be at least 2");
  Interpretation I(p);
  I.set(CodingTable::tabulate(std::move(symbol), 2, p, [p](std::span<const int> a) {
    const long d = a[0] - a[1];
    return static_cast<int>((d * d + a[0] + a[1]) % p);
  }));
  return I;
}

inline Interpretation group_interp(const AlgebraSpec& group, std::string symbol = "f") {
  if (group.kind() != AlgebraKind::finite_group)
    throw PreconditionError(group.name() + " is not a group");
  const int q = group.size();
  Interpretation I(q);
  I.set(CodingTable::tabulate(std::move(symbol), 2, q,
                              [&](std::span<const int> a) { return group.op(a[0], a[1]); }));
  return I;
}

inline Interpretation ring_linear_interp(const AlgebraSpec& ring, int r1, int r2, std::string symbol = "f") {
  const int q = ring.size();
  Interpretation I(q);
  I.set(CodingTable::tabulate(std::move(symbol), 2, q, [&](std::span<const int> a) {
    return ring.add(ring.mul(r1, a[0]), ring.mul(r2, a[1]));
  }));
  return I;
}

// f(a1, a2) = a1^s + tau a2^s and g = first projection over a field of
// order q = s^2 with s a power of 2; tau is the first element with
// tau + tau^s != 0.
struct Example12Solution {
  Interpretation interpretation;
  int tau = 0;
};

inline Example12Solution example12_solution(const AlgebraSpec& field) {
  const int q = field.size();
  if (!field.is_field()) throw PreconditionError("example12 needs a field");
  int s = 1;
  while (s * s < q) ++s;
  if (s * s != q || (q & (q - 1)) != 0 || q < 4)
    throw PreconditionError("example12 needs a field of order 4^m");
  std::optional<int> tau;
  for (int t = 0; t < q && !tau; ++t)
    if (field.add(t, field.pow(t, s)) != 0) tau = t;
  if (!tau) throw Error("no tau with tau + tau^s != 0");
  Example12Solution sol{Interpretation(q), *tau};
  sol.interpretation.set(CodingTable::tabulate("f", 2, q, [&](std::span<const int> a) {
    return field.add(field.pow(a[0], s), field.mul(*tau, field.pow(a[1], s)));
  }));
  sol.interpretation.set(CodingTable::tabulate("g", 2, q, [](std::span<const int> a) { return a[0]; }));
  return sol;
}

// ---------------------------------------------------------------------------
// Closed forms for psi_p

struct PsiClosedForm {
  int p = 0;
  std::uint64_t s1 = 0;      // one pre-image
  std::uint64_t s2 = 0;      // two pre-images
  std::uint64_t s_pm1 = 0;   // p - 1 pre-images
  std::uint64_t s_3pm2 = 0;  // 3p - 2 pre-images
  std::uint64_t image = 0;
  double gamma = 0.0;
  double gamma_one = 0.0;
  double h_alpha = 0.0;
  double limit = 0.0;  // value as p -> infinity
};

inline double psi_limit(const Alpha& alpha) {
  if (alpha.is_infinite()) return 3.0;
  const double a = alpha.value();
  if (a <= 2.0) return 4.0;
  return (3.0 * a - 2.0) / (a - 1.0);
}

inline PsiClosedForm psi_p_closed_form(int p, const Alpha& alpha) {
  if (!is_prime(p) || p < 3) throw PreconditionError("closed form holds for odd primes p");
  PsiClosedForm c;
  c.p = p;
  const std::uint64_t P = p;
  c.s1 = 3 * P * (P - 1) * (P - 1);
  c.s2 = P * (P - 1) * (P - 1) * (P - 3) / 2;
  c.s_pm1 = 2 * P * (P - 1);
  c.s_3pm2 = P;
  c.image = P * (P * P * P + P * P - P + 1) / 2;
  const double pd = p;
  const double lnp = std::log(pd);
  auto logp = [&](double v) { return std::log(v) / lnp; };
  c.gamma = 4.0 - logp(2.0) + logp(1.0 + 1.0 / pd - 1.0 / (pd * pd) + 1.0 / (pd * pd * pd));
  c.gamma_one = 3.0 + logp(3.0) + 2.0 * logp(1.0 - 1.0 / pd);
  c.limit = psi_limit(alpha);

  const double q1 = pd - 1.0;
  if (alpha.is_infinite()) {
    c.h_alpha = 4.0 - logp(3.0 * pd - 2.0);
  } else if (alpha.is_one()) {
    // 4 - p^{-4} sum_m count_m * m * log_p m
    const double acc = static_cast<double>(c.s2) * 2.0 * logp(2.0) +
                       static_cast<double>(c.s_pm1) * q1 * logp(q1) +
                       static_cast<double>(c.s_3pm2) * (3.0 * pd - 2.0) * logp(3.0 * pd - 2.0);
    c.h_alpha = 4.0 - acc / std::pow(pd, 4);
  } else {
    const double a = alpha.value();
    // Summed in logs so large p and alpha stay finite.
    std::vector<double> terms{std::log(3.0) + 2.0 * std::log(q1), std::log(2.0) + (1.0 + a) * std::log(q1),
                              a * std::log(3.0 * pd - 2.0)};
    if (p > 3) terms.push_back(2.0 * std::log(q1) + std::log(pd - 3.0) + (a - 1.0) * std::log(2.0));
    c.h_alpha = detail::log_sum_exp(terms) / lnp / (1.0 - a) + (1.0 - 4.0 * a) / (1.0 - a);
  }
  return c;
}

// ---------------------------------------------------------------------------
// A solution of prop8_gamma(k) over a large alphabet: f and g_i come from
// dynamic routing on gamma_prime(k), where every correctly formatted input
// has a unique image, and h_j(x) = (h_j, b_j(x)) for an injection
// x -> (b_1, ..., b_{k+1}) of A^k into B^{k+1}.

inline int prop8_min_alphabet(int k) {
  const int s = 3 * (k + 1);  // |Γ'_sub|
  for (int q = s + 1;; ++q) {
    const std::uint64_t B = (q - 1) / s;
    const auto lhs = checked_pow(B, k + 1);
    const auto rhs = checked_pow(q, k);
    if (!lhs || !rhs) throw PreconditionError("no alphabet found for k = " + std::to_string(k));
    if (*lhs >= *rhs) return q;
  }
}

inline Interpretation prop8_solution(int k, int q) {
  const TermSet gp = gamma_prime(k);
  auto dyn = build_dynamic_routing(gp, q, true);
  const auto& alpha = dyn.alphabet;
  const auto B = static_cast<std::uint64_t>(alpha.B_size);
  const auto cap = checked_pow(B, k + 1);
  const auto need = checked_pow(q, k);
  if (!cap || !need || *cap < *need)
    throw PreconditionError("alphabet " + std::to_string(q) + " too small: need |B|^(k+1) >= q^k");
  const TermDag dag = build_dag(gp);

  Interpretation I(q);
  for (const auto& [name, table] : dyn.interpretation.tables()) I.set(table);
  for (int j = 1; j <= k + 1; ++j) {
    const int header = dag.sources[j - 1];  // variable h_j
    auto rule = [alpha, header, j, k, q, B](std::span<const int> x) {
      std::uint64_t idx = 0;
      for (int v : x) idx = idx * q + v;
      // digit j-1 of idx in base B, first digit most significant
      for (int d = k + 1; d > j; --d) idx /= B;
      return alpha.encode(header, static_cast<int>(idx % B));
    };
    const auto size = checked_pow(q, k);
    if (size && *size <= (std::uint64_t{1} << 22))
      I.set(CodingTable::tabulate("h" + std::to_string(j), k, q, rule));
    else
      I.set(CodingTable::from_rule("h" + std::to_string(j), k, q, rule));
  }
  return I;
}

}  // namespace termnet::build
