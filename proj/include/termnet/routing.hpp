#pragma once

// Routing schemes that forward variables along vertex-disjoint paths, and
// the header-carrying dynamic variants that work without diversification.

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "termnet/interpretation.hpp"
#include "termnet/mincut.hpp"

namespace termnet {

struct PathAssignment {
  std::vector<std::vector<int>> paths;  // vertex lists from a certificate
  std::vector<int> source_of;           // path -> signature variable index
  std::vector<int> path_of;             // vertex -> path, or -1
  std::vector<int> forward_arg;         // vertex -> argument carrying the path, or -1
  std::vector<char> off_path_variable;  // vertex is a variable starting no path

  int rho() const noexcept { return static_cast<int>(paths.size()); }
};

inline PathAssignment assign_paths(const TermDag& dag, const CutCertificate& cert) {
  const int n = static_cast<int>(dag.vertex_count());
  PathAssignment pa;
  pa.paths = cert.paths;
  pa.path_of.assign(n, -1);
  pa.forward_arg.assign(n, -1);
  pa.off_path_variable.assign(n, 0);
  for (std::size_t p = 0; p < pa.paths.size(); ++p) {
    const auto& path = pa.paths[p];
    if (path.empty()) throw PreconditionError("empty path in certificate");
    for (std::size_t i = 0; i < path.size(); ++i) {
      const int v = path[i];
      if (v < 0 || v >= n || pa.path_of[v] >= 0)
        throw PreconditionError("certificate paths are not vertex-disjoint");
      pa.path_of[v] = static_cast<int>(p);
      if (i == 0) continue;
      const auto& kids = dag.index[v].children;
      auto it = std::find(kids.begin(), kids.end(), path[i - 1]);
      if (it == kids.end()) throw PreconditionError("certificate path uses a non-edge");
      pa.forward_arg[v] = static_cast<int>(it - kids.begin());
    }
    const auto& src = dag.index[path.front()].term;
    if (!src.is_variable()) throw PreconditionError("path does not start at a variable");
    const auto& srcs = dag.sources;
    pa.source_of.push_back(
        static_cast<int>(std::find(srcs.begin(), srcs.end(), path.front()) - srcs.begin()));
  }
  for (int s : dag.sources)
    if (pa.path_of[s] < 0) pa.off_path_variable[s] = 1;
  return pa;
}

inline PathAssignment assign_paths(const TermSet& ts) {
  const auto dag = build_dag(ts);
  return assign_paths(dag, min_cut(dag));
}

namespace detail {

// g_v on argument values `args` (marker = 0), per the plain or one-to-one rule.
inline int route_value(const TermDag& dag, const PathAssignment& pa, int v,
                       std::span<const int> args, bool one_to_one) {
  const int j = pa.forward_arg[v];
  if (j < 0) return 0;
  if (one_to_one) {
    const auto& kids = dag.index[v].children;
    for (std::size_t i = 0; i < kids.size(); ++i)
      if (pa.off_path_variable[kids[i]] && args[i] != 0) return 0;
  }
  return args[j];
}

inline constexpr std::uint64_t kTabulateLimit = std::uint64_t{1} << 22;

inline Interpretation build_routing_impl(const TermSet& ts_div, const PathAssignment& pa,
                                         int q, bool one_to_one) {
  if (!is_diversified(ts_div))
    throw PreconditionError("routing needs a diversified term set");
  auto dag = std::make_shared<const TermDag>(build_dag(ts_div));
  if (pa.path_of.size() != dag->vertex_count())
    throw PreconditionError("path assignment belongs to a different term set");
  auto shared_pa = std::make_shared<const PathAssignment>(pa);
  Interpretation interp(q);
  for (std::size_t v = 0; v < dag->vertex_count(); ++v) {
    const auto& t = dag->index[v].term;
    if (!t.is_application()) continue;
    const int d = static_cast<int>(t.args.size());
    auto rule = [dag, shared_pa, v = static_cast<int>(v), one_to_one](std::span<const int> a) {
      return route_value(*dag, *shared_pa, v, a, one_to_one);
    };
    const auto size = checked_pow(q, d);
    if (size && *size <= kTabulateLimit)
      interp.set(CodingTable::tabulate(t.name, d, q, rule));
    else
      interp.set(CodingTable::from_rule(t.name, d, q, rule));
  }
  return interp;
}

}  // namespace detail

inline Interpretation build_routing(const TermSet& ts_div, const PathAssignment& pa, int q) {
  return detail::build_routing_impl(ts_div, pa, q, false);
}

inline Interpretation build_one_to_one_routing(const TermSet& ts_div,
                                               const PathAssignment& pa, int q) {
  return detail::build_routing_impl(ts_div, pa, q, true);
}

// ---------------------------------------------------------------------------
// Dynamic routing

// A = (Γ_sub x B) ∪ R with (u, b) encoded as u * B + b; R fills the top of
// the alphabet and its first element reports errors.
struct DynamicAlphabet {
  int q = 0;
  int s = 0;
  int B_size = 0;
  int R_size = 0;
  int error_element = 0;

  static DynamicAlphabet make(int q, int s) {
    if (s < 1) throw PreconditionError("term set has no subterms");
    if (q <= s)
      throw PreconditionError("dynamic routing needs an alphabet larger than the " +
                              std::to_string(s) + " subterms, got " + std::to_string(q));
    DynamicAlphabet a;
    a.q = q;
    a.s = s;
    a.B_size = (q - 1) / s;
    a.R_size = q - s * a.B_size;
    a.error_element = s * a.B_size;
    return a;
  }

  int encode(int u, int b) const noexcept { return u * B_size + b; }
  bool is_header(int a) const noexcept { return a < s * B_size; }
  int header(int a) const noexcept { return a / B_size; }
  int data(int a) const noexcept { return a % B_size; }
};

namespace detail {

struct DynamicContext {
  TermDag dag;
  PathAssignment pa;
  DynamicAlphabet alpha;
  bool one_to_one = false;
  std::map<std::pair<std::string, std::vector<int>>, int> by_shape;  // (symbol, children) -> vertex

  int apply(const std::string& symbol, std::span<const int> args) const {
    std::vector<int> heads(args.size());
    std::vector<int> data(args.size());
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (!alpha.is_header(args[i])) return alpha.error_element;
      heads[i] = alpha.header(args[i]);
      data[i] = alpha.data(args[i]);
    }
    auto it = by_shape.find({symbol, heads});
    if (it == by_shape.end()) return alpha.error_element;
    const int v = it->second;
    return alpha.encode(v, route_value(dag, pa, v, data, one_to_one));
  }
};

}  // namespace detail

struct DynamicRouting {
  Interpretation interpretation;
  DynamicAlphabet alphabet;
  PathAssignment paths;
  std::vector<std::string> codebook;  // header index -> subterm text

  // Correctly formatted input: variable j carries header x_j and data b_j.
  std::vector<int> format_input(const TermDag& dag, std::span<const int> data) const {
    std::vector<int> in(data.size());
    for (std::size_t j = 0; j < data.size(); ++j)
      in[j] = alphabet.encode(dag.sources[j], data[j]);
    return in;
  }
};

inline DynamicRouting build_dynamic_routing(const TermSet& ts, int q, bool one_to_one) {
  auto ctx = std::make_shared<detail::DynamicContext>();
  ctx->dag = build_dag(ts);
  if (ctx->dag.index.zero_vertex() >= 0)
    throw PreconditionError("dynamic routing does not support the constant 0");
  ctx->alpha = DynamicAlphabet::make(q, static_cast<int>(ctx->dag.vertex_count()));
  ctx->pa = assign_paths(ctx->dag, min_cut(ctx->dag));
  ctx->one_to_one = one_to_one;
  for (std::size_t v = 0; v < ctx->dag.vertex_count(); ++v) {
    const auto& node = ctx->dag.index[v];
    if (node.term.is_application())
      ctx->by_shape.emplace(std::make_pair(node.term.name, node.children), static_cast<int>(v));
  }

  DynamicRouting out{Interpretation(q), ctx->alpha, ctx->pa, {}};
  for (const auto& node : ctx->dag.index.nodes()) out.codebook.push_back(node.text);
  std::shared_ptr<const detail::DynamicContext> shared = ctx;
  for (const auto& f : ts.signature().functions) {
    auto rule = [shared, name = f.name](std::span<const int> a) {
      return shared->apply(name, a);
    };
    const auto size = checked_pow(q, f.arity);
    if (size && *size <= detail::kTabulateLimit)
      out.interpretation.set(CodingTable::tabulate(f.name, f.arity, q, rule));
    else
      out.interpretation.set(CodingTable::from_rule(f.name, f.arity, q, rule));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Alphabet-size thresholds

struct ThresholdParams {
  int rho = 0;
  int k = 0;
  int s = 0;
  double epsilon = 0.0;
  std::optional<Alpha> alpha;
  double n1 = 0.0;
  std::optional<double> n2;    // only when epsilon < rho / (1 + log_s 2)
  std::optional<double> n3;    // only when 0 < alpha < 1
  std::optional<double> beta;
};

// n3 uses the exponent beta/epsilon required by the proof's final step,
// log_|A|(2s) <= epsilon / beta.
inline ThresholdParams thresholds(int rho, int k, int s, double epsilon,
                                  std::optional<Alpha> alpha = std::nullopt) {
  if (rho < 1 || k < rho || s < 2)
    throw PreconditionError("thresholds need 1 <= rho <= k and at least 2 subterms");
  if (!(epsilon > 0.0) || !(epsilon < rho))
    throw PreconditionError("epsilon must lie in (0, rho)");
  ThresholdParams t;
  t.rho = rho;
  t.k = k;
  t.s = s;
  t.epsilon = epsilon;
  t.alpha = alpha;
  const double e = rho / epsilon;
  const double sd = s;
  t.n1 = std::pow(sd, e) * std::pow(1.0 - std::pow(sd, 1.0 - e), -e);
  if (epsilon < rho / (1.0 + std::log(2.0) / std::log(sd)))
    t.n2 = std::pow(sd, e) * std::pow(1.0 - 2.0 * std::pow(sd, 1.0 - e), -e);
  if (alpha) {
    if (alpha->is_zero() || alpha->is_infinite() || !(alpha->value() < 1.0))
      throw PreconditionError("the n3 threshold needs 0 < alpha < 1");
    const double a = alpha->value();
    t.beta = rho + a / (1.0 - a) * k;
    t.n3 = std::pow(2.0 * sd, *t.beta / epsilon);
  }
  return t;
}

}  // namespace termnet
