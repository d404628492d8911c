#pragma once

// Rényi entropies of finite distributions, normalized to a chosen log base.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "termnet/errors.hpp"

namespace termnet {

// Multiplicity m -> number of outputs with exactly m pre-images.
using Histogram = std::map<std::uint64_t, std::uint64_t>;

// Order of a Rényi entropy: an exact non-negative rational or infinity.
// Exactness keeps alpha == 1 (Shannon) unambiguous.
class Alpha {
 public:
  constexpr Alpha() = default;
  constexpr Alpha(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den) {
    normalize();
  }

  static constexpr Alpha infinity() {
    Alpha a;
    a.infinite_ = true;
    return a;
  }

  // Accepts "inf", an integer, a fraction "p/q", or a decimal "0.25".
  static Alpha parse(std::string_view text) {
    if (text == "inf" || text == "infinity" || text == "oo") return infinity();
    auto parse_int = [&](std::string_view s) -> std::int64_t {
      if (s.empty()) throw ParseError("bad alpha '" + std::string(text) + "'");
      std::int64_t v = 0;
      for (char c : s) {
        if (c < '0' || c > '9')
          throw ParseError("bad alpha '" + std::string(text) + "'");
        v = v * 10 + (c - '0');
        if (v > (std::int64_t{1} << 40))
          throw ParseError("alpha too large '" + std::string(text) + "'");
      }
      return v;
    };
    if (!text.empty() && text.front() == '-')
      throw PreconditionError("alpha must be non-negative");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      const auto den = parse_int(text.substr(slash + 1));
      if (den == 0) throw ParseError("alpha has zero denominator");
      return Alpha(parse_int(text.substr(0, slash)), den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
      const auto frac = text.substr(dot + 1);
      if (frac.size() > 9) throw ParseError("alpha has too many decimals");
      std::int64_t den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      const auto whole = dot == 0 ? 0 : parse_int(text.substr(0, dot));
      return Alpha(whole * den + (frac.empty() ? 0 : parse_int(frac)), den);
    }
    return Alpha(parse_int(text));
  }

  constexpr bool is_infinite() const noexcept { return infinite_; }
  constexpr bool is_zero() const noexcept { return !infinite_ && num_ == 0; }
  constexpr bool is_one() const noexcept { return !infinite_ && num_ == den_; }
  constexpr std::int64_t numerator() const noexcept { return num_; }
  constexpr std::int64_t denominator() const noexcept { return den_; }

  double value() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity()
                     : static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string to_string() const {
    if (infinite_) return "inf";
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend constexpr bool operator==(const Alpha& a, const Alpha& b) {
    return a.infinite_ == b.infinite_ &&
           (a.infinite_ || (a.num_ == b.num_ && a.den_ == b.den_));
  }
  friend bool operator<(const Alpha& a, const Alpha& b) {
    if (a.infinite_ || b.infinite_) return !a.infinite_ && b.infinite_;
    return a.num_ * b.den_ < b.num_ * a.den_;
  }

 private:
  constexpr void normalize() {
    if (den_ <= 0 || num_ < 0) {
      num_ = 0;
      den_ = 1;
      throw PreconditionError("alpha must be a non-negative rational");
    }
    const auto g = std::gcd(num_, den_);
    num_ /= g;
    den_ /= g;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  bool infinite_ = false;
};

namespace detail {

inline double log_sum_exp(const std::vector<double>& xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  double hi = xs.front();
  for (double x : xs) hi = std::max(hi, x);
  double s = 0.0;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s);
}

}  // namespace detail

// H_alpha of the output of a map A^k -> A^r under uniform input, in log-q
// units, from its multiplicity histogram.
inline double renyi_from_histogram(const Histogram& hist, int k, int q,
                                   const Alpha& alpha) {
  if (hist.empty()) throw PreconditionError("empty histogram");
  const double ln_q = std::log(static_cast<double>(q));
  if (alpha.is_zero()) {
    std::uint64_t image = 0;
    for (const auto& [m, c] : hist) image += c;
    return std::log(static_cast<double>(image)) / ln_q;
  }
  if (alpha.is_infinite()) {
    return k - std::log(static_cast<double>(hist.rbegin()->first)) / ln_q;
  }
  if (alpha.is_one()) {
    // k - E[log_q |pre(b)|]
    long double acc = 0.0L;
    for (const auto& [m, c] : hist)
      acc += static_cast<long double>(c) * static_cast<long double>(m) *
             std::log(static_cast<long double>(m));
    const long double total = std::pow(static_cast<long double>(q), k);
    return static_cast<double>(k - acc / total / std::log(static_cast<long double>(q)));
  }
  const double a = alpha.value();
  std::vector<double> terms;
  terms.reserve(hist.size());
  for (const auto& [m, c] : hist)
    terms.push_back(std::log(static_cast<double>(c)) + a * std::log(static_cast<double>(m)));
  const double log_sum = detail::log_sum_exp(terms) / ln_q;  // log_q sum |pre|^a
  return (log_sum - a * k) / (1.0 - a);
}

// Rényi entropy of an explicit probability vector in log-`base` units.
inline double distribution_entropy(std::span<const double> probs,
                                   const Alpha& alpha, double base) {
  if (base <= 1.0) throw PreconditionError("entropy base must exceed 1");
  if (probs.empty()) throw PreconditionError("empty distribution");
  // Neumaier summation keeps long vectors of tiny masses within tolerance.
  double total = 0.0, carry = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || p > 1.0)
      throw PreconditionError("probabilities must lie in [0, 1]");
    const double t = total + p;
    carry += std::abs(total) >= p ? (total - t) + p : (p - t) + total;
    total = t;
  }
  if (std::abs(total + carry - 1.0) > 1e-12)
    throw PreconditionError("probabilities must sum to 1");

  const double ln_b = std::log(base);
  if (alpha.is_zero()) {
    std::size_t support = 0;
    for (double p : probs) support += p > 0.0;
    return std::log(static_cast<double>(support)) / ln_b;
  }
  if (alpha.is_infinite()) {
    double hi = 0.0;
    for (double p : probs) hi = std::max(hi, p);
    return -std::log(hi) / ln_b;
  }
  if (alpha.is_one()) {
    double h = 0.0;
    for (double p : probs)
      if (p > 0.0) h -= p * std::log(p);
    return h / ln_b;
  }
  const double a = alpha.value();
  std::vector<double> terms;
  for (double p : probs)
    if (p > 0.0) terms.push_back(a * std::log(p));
  return detail::log_sum_exp(terms) / ln_b / (1.0 - a);
}

}  // namespace termnet
