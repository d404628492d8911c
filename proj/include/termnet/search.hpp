#pragma once

// Exhaustive (or seeded-sample) search for the best interpretation inside a
// structured class of coding functions.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "termnet/algebra.hpp"
#include "termnet/interpretation.hpp"

namespace termnet {

struct FunctionClass {
  enum class Kind { all_functions, scalar_linear, matrix_linear, ring_linear, group_mult, explicit_list };

  Kind kind = Kind::all_functions;
  std::optional<AlgebraSpec> algebra;
  std::map<std::string, std::vector<std::vector<int>>> explicit_tables;

  static FunctionClass all() { return {}; }
  static FunctionClass scalar_linear(AlgebraSpec field) {
    if (!field.is_field()) throw PreconditionError("scalar linear maps need a field");
    return {Kind::scalar_linear, std::move(field), {}};
  }
  static FunctionClass matrix_linear(AlgebraSpec space) {
    if (space.kind() != AlgebraKind::vector_space)
      throw PreconditionError("matrix linear maps need a vector space over F2");
    return {Kind::matrix_linear, std::move(space), {}};
  }
  static FunctionClass ring_linear(AlgebraSpec ring) {
    if (!ring.has_multiplication()) throw PreconditionError("ring linear maps need a ring");
    return {Kind::ring_linear, std::move(ring), {}};
  }
  static FunctionClass group_mult(AlgebraSpec group) {
    if (group.kind() != AlgebraKind::finite_group)
      throw PreconditionError("group class needs a group");
    return {Kind::group_mult, std::move(group), {}};
  }
  static FunctionClass explicit_list(std::map<std::string, std::vector<std::vector<int>>> t) {
    return {Kind::explicit_list, std::nullopt, std::move(t)};
  }
};

inline std::string to_string(FunctionClass::Kind k) {
  switch (k) {
    case FunctionClass::Kind::all_functions: return "all";
    case FunctionClass::Kind::scalar_linear: return "scalar_linear";
    case FunctionClass::Kind::matrix_linear: return "matrix_linear";
    case FunctionClass::Kind::ring_linear: return "ring_linear";
    case FunctionClass::Kind::group_mult: return "group_mult";
    case FunctionClass::Kind::explicit_list: return "explicit";
  }
  return "?";
}

struct Objective {
  enum class Kind { dispersion, one_to_one, renyi };
  Kind kind = Kind::dispersion;
  Alpha alpha;

  static Objective dispersion() { return {}; }
  static Objective one_to_one() { return {Kind::one_to_one, {}}; }
  static Objective renyi(Alpha a) { return {Kind::renyi, a}; }

  std::string to_string() const {
    switch (kind) {
      case Kind::dispersion: return "dispersion";
      case Kind::one_to_one: return "one_to_one";
      case Kind::renyi: return "renyi(" + alpha.to_string() + ")";
    }
    return "?";
  }
};

struct SearchOptions {
  std::uint64_t budget = 10'000'000'000ULL;  // term evaluations over the whole search
  unsigned threads = 1;
  std::optional<std::uint64_t> sample;  // evaluate this many seeded random members
  std::uint64_t seed = 0;
  bool linear_fast_path = true;
};

struct SearchResult {
  Objective objective;
  std::uint64_t best_count = 0;  // image or one-to-one image size
  double best_value = 0.0;       // log of best_count, or H_alpha
  bool best_is_neg_infinity = false;
  Interpretation best_tables;
  std::uint64_t best_index = 0;
  std::uint64_t explored = 0;
  std::uint64_t class_size = 0;
  bool exhaustive = true;
  EvaluationReport best_report;
};

namespace detail {

// Candidate tables of one symbol, addressed by index.
struct SymbolSpace {
  std::string name;
  int arity = 0;
  std::uint64_t count = 0;
  std::function<void(std::uint64_t, std::vector<int>&)> fill;
};

inline void tuple_loop(int q, int d, const std::function<void(std::uint64_t, const std::vector<int>&)>& f) {
  std::vector<int> args(d, 0);
  const std::uint64_t n = *checked_pow(q, d);
  for (std::uint64_t i = 0; i < n; ++i) {
    f(i, args);
    next_tuple(args, q);
  }
}

inline std::vector<std::vector<int>> matrices_for(std::uint64_t idx, int d, int m) {
  std::vector<std::vector<int>> mats(d, std::vector<int>(m));
  const std::uint64_t per = std::uint64_t{1} << (m * m);
  for (int j = d; j-- > 0;) {
    std::uint64_t mi = idx % per;
    idx /= per;
    for (int r = 0; r < m; ++r) mats[j][r] = static_cast<int>((mi >> (r * m)) & ((1u << m) - 1));
  }
  return mats;
}

inline std::vector<SymbolSpace> symbol_spaces(const Signature& sig, int q, const FunctionClass& cls) {
  using K = FunctionClass::Kind;
  if (cls.algebra && cls.algebra->size() != q)
    throw PreconditionError("class algebra " + cls.algebra->name() + " has size " +
                            std::to_string(cls.algebra->size()) + ", alphabet is " + std::to_string(q));
  std::vector<SymbolSpace> out;
  for (const auto& f : sig.functions) {
    SymbolSpace s;
    s.name = f.name;
    s.arity = f.arity;
    const int d = f.arity;
    const auto entries = checked_pow(q, d);
    switch (cls.kind) {
      case K::all_functions: {
        const auto count = entries && *entries < 64 ? checked_pow(q, *entries) : std::nullopt;
        if (!count) throw BudgetExceeded("all functions of arity " + std::to_string(d) + " is too large a class");
        s.count = *count;
        s.fill = [q, n = *entries](std::uint64_t idx, std::vector<int>& t) {
          t.resize(n);
          for (std::uint64_t j = n; j-- > 0;) {
            t[j] = static_cast<int>(idx % q);
            idx /= q;
          }
        };
        break;
      }
      case K::scalar_linear:
      case K::ring_linear: {
        s.count = *checked_pow(q, d);
        const AlgebraSpec alg = *cls.algebra;
        s.fill = [alg, q, d](std::uint64_t idx, std::vector<int>& t) {
          std::vector<int> coef(d);
          for (int j = d; j-- > 0;) {
            coef[j] = static_cast<int>(idx % q);
            idx /= q;
          }
          t.assign(*checked_pow(q, d), 0);
          tuple_loop(q, d, [&](std::uint64_t i, const std::vector<int>& a) {
            int v = 0;
            for (int j = 0; j < d; ++j) v = alg.add(v, alg.mul(coef[j], a[j]));
            t[i] = v;
          });
        };
        break;
      }
      case K::matrix_linear: {
        const AlgebraSpec alg = *cls.algebra;
        const int m = alg.dimension();
        const auto count = checked_pow(2, static_cast<std::uint64_t>(m) * m * d);
        if (!count || m * m * d >= 63) throw BudgetExceeded("matrix class too large");
        s.count = *count;
        s.fill = [alg, q, d, m](std::uint64_t idx, std::vector<int>& t) {
          const auto mats = matrices_for(idx, d, m);
          t.assign(*checked_pow(q, d), 0);
          tuple_loop(q, d, [&](std::uint64_t i, const std::vector<int>& a) {
            int v = 0;
            for (int j = 0; j < d; ++j) v ^= alg.apply_matrix(mats[j], a[j]);
            t[i] = v;
          });
        };
        break;
      }
      case K::group_mult: {
        if (d != 2) throw PreconditionError("group class needs binary symbols, " + f.name + " has arity " + std::to_string(d));
        s.count = 1;
        const AlgebraSpec alg = *cls.algebra;
        s.fill = [alg, q](std::uint64_t, std::vector<int>& t) {
          t.assign(static_cast<std::size_t>(q) * q, 0);
          for (int a = 0; a < q; ++a)
            for (int b = 0; b < q; ++b) t[a * q + b] = alg.op(a, b);
        };
        break;
      }
      case K::explicit_list: {
        auto it = cls.explicit_tables.find(f.name);
        if (it == cls.explicit_tables.end() || it->second.empty())
          throw PreconditionError("no candidate tables for " + f.name);
        for (const auto& t : it->second) CodingTable(f.name, d, q, t);  // validates
        s.count = it->second.size();
        s.fill = [list = it->second](std::uint64_t idx, std::vector<int>& t) { t = list[idx]; };
        break;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::uint64_t class_size(const std::vector<SymbolSpace>& spaces) {
  std::uint64_t total = 1;
  for (const auto& s : spaces) {
    if (s.count && total > std::numeric_limits<std::uint64_t>::max() / s.count)
      throw BudgetExceeded("class size overflows 64 bits");
    total *= s.count;
  }
  return total;
}

inline void split_index(std::uint64_t idx, const std::vector<SymbolSpace>& spaces,
                        std::vector<std::uint64_t>& parts) {
  parts.resize(spaces.size());
  for (std::size_t j = spaces.size(); j-- > 0;) {
    parts[j] = idx % spaces[j].count;
    idx /= spaces[j].count;
  }
}

// Induced map of a matrix-linear interpretation over F_2^m as rows of bit
// masks over the k*m input bits; image size is 2^rank.
class Gf2LinearModel {
 public:
  Gf2LinearModel(const TermSet& ts, int m) : m_(m), index_(ts) {
    k_ = static_cast<int>(ts.variables().size());
    if (k_ * m > 64) throw PreconditionError("too many input bits for the rank path");
    sig_ = ts.signature();
  }

  // mats[symbol][arg][row] as row bitmasks.
  int rank(const std::vector<std::vector<std::vector<int>>>& mats) {
    rows_.assign(index_.size(), std::vector<std::uint64_t>(m_, 0));
    for (std::size_t v = 0; v < index_.size(); ++v) {
      const auto& t = index_[v].term;
      auto& out = rows_[v];
      if (t.is_variable()) {
        const int j = sig_.variable_index(t.name);
        for (int b = 0; b < m_; ++b) out[b] = std::uint64_t{1} << (j * m_ + b);
      } else if (t.is_application()) {
        int sym = 0;
        while (sig_.functions[sym].name != t.name) ++sym;
        const auto& kids = index_[v].children;
        for (std::size_t a = 0; a < kids.size(); ++a)
          for (int r = 0; r < m_; ++r)
            for (int s = 0; s < m_; ++s)
              if ((mats[sym][a][r] >> s) & 1) out[r] ^= rows_[kids[a]][s];
      }
    }
    std::vector<std::uint64_t> stack;
    for (int v : index_.term_vertices())
      for (int b = 0; b < m_; ++b) stack.push_back(rows_[v][b]);
    int rank = 0;
    for (int bit = 0; bit < 64 && rank < static_cast<int>(stack.size()); ++bit) {
      const std::uint64_t mask = std::uint64_t{1} << bit;
      std::size_t piv = rank;
      while (piv < stack.size() && !(stack[piv] & mask)) ++piv;
      if (piv == stack.size()) continue;
      std::swap(stack[rank], stack[piv]);
      for (std::size_t i = 0; i < stack.size(); ++i)
        if (i != static_cast<std::size_t>(rank) && (stack[i] & mask)) stack[i] ^= stack[rank];
      ++rank;
    }
    return rank;
  }

  int input_bits() const noexcept { return k_ * m_; }

 private:
  int m_;
  int k_ = 0;
  SubtermIndex index_;
  Signature sig_;
  std::vector<std::vector<std::uint64_t>> rows_;
};

struct Score {
  std::uint64_t count = 0;
  double value = 0.0;
};

inline Score score_of(const EvaluationReport& rep, const Objective& obj) {
  switch (obj.kind) {
    case Objective::Kind::dispersion: return {rep.image_size, dispersion(rep).log_value};
    case Objective::Kind::one_to_one: return {rep.one_image_size, one_to_one_dispersion(rep).log_value};
    case Objective::Kind::renyi: return {rep.image_size, renyi_entropy(rep, obj.alpha)};
  }
  return {};
}

inline bool better(const Score& a, const Score& b, const Objective& obj) {
  if (obj.kind == Objective::Kind::renyi) return a.value > b.value;
  return a.count > b.count;
}

}  // namespace detail

// Visits class members in index order (first symbol most significant).
// The callback returns false to stop early.
inline std::uint64_t for_each_interpretation(
    const TermSet& ts, int q, const FunctionClass& cls,
    const std::function<bool(std::uint64_t, const Interpretation&)>& visit) {
  const auto spaces = detail::symbol_spaces(ts.signature(), q, cls);
  const auto total = detail::class_size(spaces);
  std::vector<std::uint64_t> parts;
  std::vector<int> table;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    detail::split_index(idx, spaces, parts);
    Interpretation interp(q);
    for (std::size_t j = 0; j < spaces.size(); ++j) {
      spaces[j].fill(parts[j], table);
      interp.set(spaces[j].name, spaces[j].arity, table);
    }
    if (!visit(idx, interp)) return idx + 1;
  }
  return total;
}

inline Interpretation interpretation_at(const TermSet& ts, int q, const FunctionClass& cls,
                                        std::uint64_t idx) {
  const auto spaces = detail::symbol_spaces(ts.signature(), q, cls);
  if (idx >= detail::class_size(spaces)) throw PreconditionError("class index out of range");
  std::vector<std::uint64_t> parts;
  detail::split_index(idx, spaces, parts);
  Interpretation interp(q);
  std::vector<int> table;
  for (std::size_t j = 0; j < spaces.size(); ++j) {
    spaces[j].fill(parts[j], table);
    interp.set(spaces[j].name, spaces[j].arity, table);
  }
  return interp;
}

inline SearchResult exhaustive_search(const TermSet& ts, int q, const FunctionClass& cls,
                                      const Objective& objective, const SearchOptions& opt = {}) {
  const auto spaces = detail::symbol_spaces(ts.signature(), q, cls);
  const std::uint64_t total = detail::class_size(spaces);
  const int k = static_cast<int>(ts.variable_count());
  const int r = static_cast<int>(ts.term_count());

  const bool rank_path = opt.linear_fast_path && cls.kind == FunctionClass::Kind::matrix_linear &&
                         k * cls.algebra->dimension() <= 64;
  const std::uint64_t members = opt.sample ? std::min(*opt.sample, total) : total;
  std::uint64_t per_member;
  if (rank_path) {
    per_member = std::max<std::uint64_t>(1, SubtermIndex(ts).size());
  } else {
    const auto inputs = checked_pow(q, k);
    if (!inputs) throw BudgetExceeded("input space overflows");
    per_member = *inputs * std::max(r, 1);
  }
  if (members > opt.budget / per_member)
    throw BudgetExceeded("searching " + std::to_string(members) + " interpretations exceeds the budget of " +
                         std::to_string(opt.budget) + " term evaluations");

  std::vector<std::uint64_t> order;
  if (opt.sample && *opt.sample < total) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
    order.resize(members);
    for (auto& o : order) o = pick(rng);
  }
  auto member = [&](std::uint64_t i) { return order.empty() ? i : order[i]; };

  struct Local {
    bool have = false;
    detail::Score score;
    std::uint64_t index = 0;
  };

  auto run = [&](std::uint64_t lo, std::uint64_t hi, Local& best) {
    std::vector<std::vector<int>> tables(spaces.size());
    std::vector<std::uint64_t> parts, current(spaces.size(), ~std::uint64_t{0});
    Evaluator ev(ts, q);
    std::optional<detail::Gf2LinearModel> model;
    if (rank_path) model.emplace(ts, cls.algebra->dimension());
    std::vector<std::vector<std::vector<int>>> mats(spaces.size());
    for (std::uint64_t i = lo; i < hi; ++i) {
      const std::uint64_t idx = member(i);
      detail::split_index(idx, spaces, parts);
      detail::Score sc;
      if (rank_path) {
        for (std::size_t j = 0; j < spaces.size(); ++j)
          mats[j] = detail::matrices_for(parts[j], spaces[j].arity, cls.algebra->dimension());
        const int rank = model->rank(mats);
        const int bits = model->input_bits();
        Histogram h{{std::uint64_t{1} << (bits - rank), std::uint64_t{1} << rank}};
        sc = detail::score_of(EvaluationReport::from_histogram(k, r, q, h), objective);
      } else {
        for (std::size_t j = 0; j < spaces.size(); ++j)
          if (parts[j] != current[j]) {
            spaces[j].fill(parts[j], tables[j]);
            ev.bind_raw(static_cast<int>(j), tables[j].data());
            current[j] = parts[j];
          }
        EvaluationOptions eo;
        eo.budget = std::numeric_limits<std::uint64_t>::max();
        sc = detail::score_of(preimage_histogram(ev, eo), objective);
      }
      if (!best.have || detail::better(sc, best.score, objective)) {
        best.have = true;
        best.score = sc;
        best.index = idx;
      }
    }
  };

  const unsigned threads = std::max(1u, opt.threads);
  std::vector<Local> locals(threads);
  if (threads == 1 || members < 2 * threads) {
    run(0, members, locals[0]);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::uint64_t chunk = (members + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          const std::uint64_t lo = std::min(members, t * chunk);
          run(lo, std::min(members, lo + chunk), locals[t]);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  // Chunks are in enumeration order, so a strict improvement keeps the
  // earliest maximizer.
  Local best;
  for (const auto& l : locals)
    if (l.have && (!best.have || detail::better(l.score, best.score, objective))) best = l;
  if (!best.have) throw PreconditionError("empty function class");

  SearchResult res;
  res.objective = objective;
  res.best_index = best.index;
  res.explored = members;
  res.class_size = total;
  res.exhaustive = order.empty();
  res.best_tables = interpretation_at(ts, q, cls, best.index);
  const auto inputs = checked_pow(q, k);
  if (inputs && *inputs <= opt.budget / std::max(r, 1)) {
    EvaluationOptions eo;
    eo.budget = opt.budget;
    res.best_report = preimage_histogram(res.best_tables, ts, eo);
    const auto check = detail::score_of(res.best_report, objective);
    if (check.count != best.score.count ||
        (objective.kind == Objective::Kind::renyi && check.value != best.score.value))
      throw Error("search winner failed re-verification");
  }
  const DispersionValue dv = DispersionValue::of_count(best.score.count, q);
  res.best_count = best.score.count;
  if (objective.kind == Objective::Kind::renyi) {
    res.best_value = best.score.value;
  } else {
    res.best_value = dv.log_value;
    res.best_is_neg_infinity = dv.is_neg_infinity;
  }
  return res;
}

}  // namespace termnet
