#pragma once

// Interpretations: concrete coding functions for every symbol of a term set,
// exhaustive evaluation of the induced mapping A^k -> A^r, and the measures
// derived from its pre-image histogram.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "termnet/errors.hpp"
#include "termnet/renyi.hpp"
#include "termnet/term_model.hpp"

namespace termnet {

inline constexpr std::uint64_t kDefaultBudget = 100'000'000;

inline std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base)
      return std::nullopt;
    r *= base;
  }
  return r;
}

// A map A^d -> A. Either an explicit row-major table (first argument most
// significant) or a rule evaluated on demand, for arities where q^d entries
// would not fit in memory.
class CodingTable {
 public:
  using Rule = std::function<int(std::span<const int>)>;

  CodingTable() = default;

  CodingTable(std::string symbol, int arity, int q, std::vector<int> outputs)
      : symbol_(std::move(symbol)), arity_(arity), q_(q), outputs_(std::move(outputs)) {
    if (arity_ < 0) throw PreconditionError("negative arity for " + symbol_);
    if (q_ < 2) throw PreconditionError("alphabet size must be at least 2");
    const auto size = checked_pow(q_, arity_);
    if (!size || *size != outputs_.size())
      throw PreconditionError("table for " + symbol_ + " must have " +
                              (size ? std::to_string(*size) : std::string("q^d")) +
                              " entries, got " + std::to_string(outputs_.size()));
    for (int v : outputs_)
      if (v < 0 || v >= q_)
        throw PreconditionError("table for " + symbol_ + " has entry " +
                                std::to_string(v) + " outside the alphabet");
  }

  static CodingTable from_rule(std::string symbol, int arity, int q, Rule rule) {
    if (q < 2) throw PreconditionError("alphabet size must be at least 2");
    CodingTable t;
    t.symbol_ = std::move(symbol);
    t.arity_ = arity;
    t.q_ = q;
    t.rule_ = std::move(rule);
    return t;
  }

  // Tabulates f(args) for every argument tuple.
  static CodingTable tabulate(std::string symbol, int arity, int q,
                              const std::function<int(std::span<const int>)>& f) {
    const auto size = checked_pow(q, arity);
    if (!size || *size > (std::uint64_t{1} << 28))
      throw BudgetExceeded("table for " + symbol + " is too large to tabulate");
    std::vector<int> out(*size);
    std::vector<int> args(arity, 0);
    for (std::uint64_t i = 0; i < *size; ++i) {
      out[i] = f(args);
      for (int j = arity - 1; j >= 0; --j) {
        if (++args[j] < q) break;
        args[j] = 0;
      }
    }
    return CodingTable(std::move(symbol), arity, q, std::move(out));
  }

  const std::string& symbol() const noexcept { return symbol_; }
  int arity() const noexcept { return arity_; }
  int alphabet_size() const noexcept { return q_; }
  bool tabulated() const noexcept { return !rule_; }
  const std::vector<int>& outputs() const noexcept { return outputs_; }
  const Rule& rule() const noexcept { return rule_; }

  int operator()(std::span<const int> args) const {
    if (rule_) {
      const int v = rule_(args);
      if (v < 0 || v >= q_)
        throw PreconditionError("rule for " + symbol_ + " left the alphabet");
      return v;
    }
    std::uint64_t idx = 0;
    for (int a : args) idx = idx * q_ + a;
    return outputs_[idx];
  }

  CodingTable materialized() const {
    if (!rule_) return *this;
    return tabulate(symbol_, arity_, q_, rule_);
  }

  CodingTable renamed(std::string symbol) const {
    CodingTable t = *this;
    t.symbol_ = std::move(symbol);
    return t;
  }

  friend bool operator==(const CodingTable& a, const CodingTable& b) {
    return a.symbol_ == b.symbol_ && a.arity_ == b.arity_ && a.q_ == b.q_ &&
           !a.rule_ && !b.rule_ && a.outputs_ == b.outputs_;
  }

 private:
  std::string symbol_;
  int arity_ = 0;
  int q_ = 2;
  std::vector<int> outputs_;
  Rule rule_;
};

// Element 0 of the alphabet interprets the constant 0 and doubles as the
// routing marker.
class Interpretation {
 public:
  static constexpr int zero_value = 0;

  explicit Interpretation(int q = 2) : q_(q) {
    if (q < 2) throw PreconditionError("alphabet size must be at least 2");
  }

  int alphabet_size() const noexcept { return q_; }

  void set(CodingTable table) {
    if (table.alphabet_size() != q_)
      throw PreconditionError("table for " + table.symbol() +
                              " uses a different alphabet");
    auto name = table.symbol();
    tables_.insert_or_assign(std::move(name), std::move(table));
  }

  void set(std::string symbol, int arity, std::vector<int> outputs) {
    set(CodingTable(std::move(symbol), arity, q_, std::move(outputs)));
  }

  const CodingTable* find(std::string_view symbol) const {
    auto it = tables_.find(std::string(symbol));
    return it == tables_.end() ? nullptr : &it->second;
  }

  const CodingTable& at(std::string_view symbol) const {
    if (const auto* t = find(symbol)) return *t;
    throw PreconditionError("no table for symbol " + std::string(symbol));
  }

  const std::map<std::string, CodingTable>& tables() const noexcept { return tables_; }

  void check_covers(const Signature& sig) const {
    for (const auto& f : sig.functions) {
      const auto& t = at(f.name);
      if (t.arity() != f.arity)
        throw PreconditionError("table for " + f.name + " has arity " +
                                std::to_string(t.arity()) + ", symbol has arity " +
                                std::to_string(f.arity));
    }
  }

  bool operator==(const Interpretation& o) const {
    return q_ == o.q_ && tables_ == o.tables_;
  }

 private:
  int q_;
  std::map<std::string, CodingTable> tables_;
};

// ---------------------------------------------------------------------------
// Evaluation

// The induced mapping compiled over the shared subterm DAG; each distinct
// subterm is computed once per input. Tables are bound by pointer, so bound
// tables must outlive the evaluator.
class Evaluator {
 public:
  Evaluator(const TermSet& ts, int q) : q_(q), sig_(ts.signature()) {
    if (q < 2) throw PreconditionError("alphabet size must be at least 2");
    const SubtermIndex index(ts);
    nodes_.reserve(index.size());
    for (const auto& sub : index.nodes()) {
      Node n;
      n.first_child = static_cast<int>(children_.size());
      n.arity = static_cast<int>(sub.children.size());
      switch (sub.term.kind) {
        case Term::Kind::variable:
          n.kind = Node::variable;
          n.ref = sig_.variable_index(sub.term.name);
          break;
        case Term::Kind::zero:
          n.kind = Node::zero;
          break;
        case Term::Kind::application:
          n.kind = Node::application;
          n.ref = slot(sub.term.name);
          break;
      }
      children_.insert(children_.end(), sub.children.begin(), sub.children.end());
      nodes_.push_back(n);
    }
    outputs_ = index.term_vertices();
    slots_.resize(sig_.functions.size());
    values_.resize(nodes_.size());
    int widest = 0;
    for (const auto& n : nodes_) widest = std::max(widest, n.arity);
    scratch_.resize(widest);
  }

  Evaluator(const TermSet& ts, const Interpretation& interp)
      : Evaluator(ts, interp.alphabet_size()) {
    bind(interp);
  }

  int alphabet_size() const noexcept { return q_; }
  int k() const noexcept { return static_cast<int>(sig_.variables.size()); }
  int r() const noexcept { return static_cast<int>(outputs_.size()); }
  const Signature& signature() const noexcept { return sig_; }

  int slot(std::string_view name) const {
    for (std::size_t i = 0; i < sig_.functions.size(); ++i)
      if (sig_.functions[i].name == name) return static_cast<int>(i);
    throw PreconditionError("unknown function symbol " + std::string(name));
  }

  void bind(int slot, const CodingTable& table) {
    const auto& f = sig_.functions.at(slot);
    if (table.arity() != f.arity)
      throw PreconditionError("table for " + f.name + " has the wrong arity");
    if (table.alphabet_size() != q_)
      throw PreconditionError("table for " + f.name + " uses a different alphabet");
    slots_[slot].table = &table;
    slots_[slot].outputs = table.tabulated() ? table.outputs().data() : nullptr;
  }

  // Hot-path rebinding used by search; `outputs` must hold q^arity entries.
  void bind_raw(int slot, const int* outputs) noexcept {
    slots_[slot].table = nullptr;
    slots_[slot].outputs = outputs;
  }

  void bind(const Interpretation& interp) {
    if (interp.alphabet_size() != q_)
      throw PreconditionError("interpretation alphabet differs from evaluator");
    for (std::size_t i = 0; i < sig_.functions.size(); ++i)
      bind(static_cast<int>(i), interp.at(sig_.functions[i].name));
  }

  bool complete() const noexcept {
    return std::all_of(slots_.begin(), slots_.end(), [](const Slot& s) {
      return s.outputs != nullptr || s.table != nullptr;
    });
  }

  void evaluate(const int* input, int* output) noexcept(false) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      switch (n.kind) {
        case Node::variable:
          values_[i] = input[n.ref];
          break;
        case Node::zero:
          values_[i] = Interpretation::zero_value;
          break;
        case Node::application: {
          const Slot& s = slots_[n.ref];
          const int* c = children_.data() + n.first_child;
          if (s.outputs) {
            std::uint64_t idx = 0;
            for (int j = 0; j < n.arity; ++j) idx = idx * q_ + values_[c[j]];
            values_[i] = s.outputs[idx];
          } else {
            for (int j = 0; j < n.arity; ++j) scratch_[j] = values_[c[j]];
            values_[i] = (*s.table)(std::span<const int>(scratch_.data(), n.arity));
          }
          break;
        }
      }
    }
    for (std::size_t j = 0; j < outputs_.size(); ++j) output[j] = values_[outputs_[j]];
  }

  std::vector<int> evaluate(std::span<const int> input) {
    if (static_cast<int>(input.size()) != k())
      throw PreconditionError("input has " + std::to_string(input.size()) +
                              " values, expected " + std::to_string(k()));
    for (int a : input)
      if (a < 0 || a >= q_) throw PreconditionError("input value outside the alphabet");
    if (!complete()) throw PreconditionError("interpretation does not cover every symbol");
    std::vector<int> out(outputs_.size());
    evaluate(input.data(), out.data());
    return out;
  }

  // q^r, when it fits in 64 bits.
  std::optional<std::uint64_t> output_space() const { return checked_pow(q_, r()); }

  std::uint64_t encode(const int* output) const noexcept {
    std::uint64_t code = 0;
    for (int j = 0; j < r(); ++j) code = code * q_ + output[j];
    return code;
  }

 private:
  struct Node {
    enum Kind : std::uint8_t { variable, zero, application } kind = variable;
    int ref = -1;  // variable index or function slot
    int first_child = 0;
    int arity = 0;
  };
  struct Slot {
    const CodingTable* table = nullptr;
    const int* outputs = nullptr;
  };

  int q_;
  Signature sig_;
  std::vector<Node> nodes_;
  std::vector<int> children_;
  std::vector<int> outputs_;
  std::vector<Slot> slots_;
  std::vector<int> values_;
  std::vector<int> scratch_;
};

// Advances a base-q counter whose first digit is most significant. Returns
// false after the last tuple.
inline bool next_tuple(std::span<int> digits, int q) noexcept {
  for (std::size_t j = digits.size(); j-- > 0;) {
    if (++digits[j] < q) return true;
    digits[j] = 0;
  }
  return false;
}

inline std::vector<int> evaluate(const Interpretation& interp, const TermSet& ts,
                                 std::span<const int> input) {
  interp.check_covers(ts.signature());
  Evaluator ev(ts, interp);
  return ev.evaluate(input);
}

struct EvaluationReport {
  int k = 0;
  int r = 0;
  int q = 2;
  Histogram histogram;
  std::uint64_t image_size = 0;
  std::uint64_t one_image_size = 0;

  static EvaluationReport from_histogram(int k, int r, int q, Histogram hist) {
    EvaluationReport rep;
    rep.k = k;
    rep.r = r;
    rep.q = q;
    for (const auto& [m, c] : hist) rep.image_size += c;
    auto it = hist.find(1);
    rep.one_image_size = it == hist.end() ? 0 : it->second;
    rep.histogram = std::move(hist);
    return rep;
  }

  // Sum of m * histogram[m]; equals q^k on a complete enumeration.
  std::uint64_t total_inputs() const {
    std::uint64_t total = 0;
    for (const auto& [m, c] : histogram) total += m * c;
    return total;
  }

  bool operator==(const EvaluationReport&) const = default;
};

struct EvaluationOptions {
  std::uint64_t budget = kDefaultBudget;  // term evaluations, q^k * r
  unsigned threads = 1;
};

namespace detail {

inline std::uint64_t check_budget(int q, int k, int r, std::uint64_t budget) {
  const auto inputs = checked_pow(q, k);
  const std::uint64_t per = static_cast<std::uint64_t>(std::max(r, 1));
  if (!inputs || *inputs > budget / per)
    throw BudgetExceeded("enumerating " + std::to_string(q) + "^" + std::to_string(k) +
                         " inputs x " + std::to_string(per) +
                         " terms exceeds the budget of " + std::to_string(budget));
  return *inputs;
}

// Multiplicity per output code: dense counters when the code space is small
// relative to the work, otherwise sort and run-length.
class OutputCounter {
 public:
  OutputCounter(std::optional<std::uint64_t> space, std::uint64_t expected) {
    if (space && *space <= (std::uint64_t{1} << 26) &&
        *space <= std::max<std::uint64_t>(std::uint64_t{1} << 20, 2 * expected)) {
      dense_.assign(*space, 0);
    } else {
      codes_.reserve(expected);
    }
  }

  void add(std::uint64_t code) {
    if (!dense_.empty())
      ++dense_[code];
    else
      codes_.push_back(code);
  }

  Histogram finish() {
    Histogram hist;
    if (!dense_.empty()) {
      for (std::uint32_t m : dense_)
        if (m) ++hist[m];
      return hist;
    }
    std::sort(codes_.begin(), codes_.end());
    for (std::size_t i = 0; i < codes_.size();) {
      std::size_t j = i;
      while (j < codes_.size() && codes_[j] == codes_[i]) ++j;
      ++hist[j - i];
      i = j;
    }
    return hist;
  }

 private:
  std::vector<std::uint32_t> dense_;
  std::vector<std::uint64_t> codes_;
};

inline Histogram histogram_wide(Evaluator& ev, std::uint64_t inputs) {
  std::map<std::vector<int>, std::uint64_t> seen;
  std::vector<int> in(ev.k(), 0), out(ev.r());
  for (std::uint64_t i = 0; i < inputs; ++i) {
    ev.evaluate(in.data(), out.data());
    ++seen[out];
    next_tuple(in, ev.alphabet_size());
  }
  Histogram hist;
  for (const auto& [o, m] : seen) ++hist[m];
  return hist;
}

inline void digits_of(std::uint64_t index, int q, std::span<int> digits) {
  for (std::size_t j = digits.size(); j-- > 0;) {
    digits[j] = static_cast<int>(index % q);
    index /= q;
  }
}

}  // namespace detail

// Exact pre-image histogram by full enumeration of A^k with a bound evaluator.
inline EvaluationReport preimage_histogram(Evaluator& ev, const EvaluationOptions& opt = {}) {
  if (!ev.complete()) throw PreconditionError("interpretation does not cover every symbol");
  const int q = ev.alphabet_size(), k = ev.k(), r = ev.r();
  const std::uint64_t inputs = detail::check_budget(q, k, r, opt.budget);
  const auto space = ev.output_space();
  if (!space) return EvaluationReport::from_histogram(k, r, q, detail::histogram_wide(ev, inputs));

  detail::OutputCounter counter(space, inputs);
  const unsigned threads = std::max(1u, opt.threads);
  if (threads == 1 || inputs < 4096 || inputs > (std::uint64_t{1} << 25)) {
    std::vector<int> in(k, 0), out(r);
    for (std::uint64_t i = 0; i < inputs; ++i) {
      ev.evaluate(in.data(), out.data());
      counter.add(ev.encode(out.data()));
      next_tuple(in, q);
    }
  } else {
    std::vector<std::uint64_t> codes(inputs);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::uint64_t chunk = (inputs + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t, worker = ev]() mutable {
        try {
          const std::uint64_t lo = t * chunk, hi = std::min(inputs, lo + chunk);
          std::vector<int> in(k), out(r);
          detail::digits_of(lo, q, in);
          for (std::uint64_t i = lo; i < hi; ++i) {
            worker.evaluate(in.data(), out.data());
            codes[i] = worker.encode(out.data());
            next_tuple(in, q);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (auto c : codes) counter.add(c);
  }
  return EvaluationReport::from_histogram(k, r, q, counter.finish());
}

inline EvaluationReport preimage_histogram(const Interpretation& interp, const TermSet& ts,
                                           const EvaluationOptions& opt = {}) {
  interp.check_covers(ts.signature());
  Evaluator ev(ts, interp);
  return preimage_histogram(ev, opt);
}

// ---------------------------------------------------------------------------
// Measures

struct DispersionValue {
  std::uint64_t exact_count = 0;
  double log_value = 0.0;  // -inf exactly when is_neg_infinity
  bool is_neg_infinity = false;

  static DispersionValue of_count(std::uint64_t count, int q) {
    DispersionValue d;
    d.exact_count = count;
    if (count == 0) {
      d.is_neg_infinity = true;
      d.log_value = -std::numeric_limits<double>::infinity();
    } else {
      d.log_value = std::log(static_cast<double>(count)) / std::log(static_cast<double>(q));
    }
    return d;
  }
};

inline DispersionValue dispersion(const EvaluationReport& rep) {
  return DispersionValue::of_count(rep.image_size, rep.q);
}

inline DispersionValue one_to_one_dispersion(const EvaluationReport& rep) {
  return DispersionValue::of_count(rep.one_image_size, rep.q);
}

inline double renyi_entropy(const EvaluationReport& rep, const Alpha& alpha) {
  return renyi_from_histogram(rep.histogram, rep.k, rep.q, alpha);
}

// ---------------------------------------------------------------------------
// Conditional dispersion

enum class ConditionMode { worst, average };

// Image size of each slice of A^k obtained by fixing the variables outside
// `free_vars`; slices are listed in lexicographic order of the fixed values.
inline std::vector<std::uint64_t> conditional_slices(const Interpretation& interp,
                                                     const TermSet& ts,
                                                     const std::vector<std::string>& free_vars,
                                                     const EvaluationOptions& opt = {}) {
  interp.check_covers(ts.signature());
  const auto& vars = ts.variables();
  std::vector<char> is_free(vars.size(), 0);
  for (const auto& v : free_vars) {
    auto it = std::find(vars.begin(), vars.end(), v);
    if (it == vars.end()) throw PreconditionError("unknown variable " + v);
    is_free[it - vars.begin()] = 1;
  }
  Evaluator ev(ts, interp);
  const int q = ev.alphabet_size();
  detail::check_budget(q, ev.k(), ev.r(), opt.budget);

  std::vector<int> fixed_pos, free_pos;
  for (std::size_t i = 0; i < vars.size(); ++i)
    (is_free[i] ? free_pos : fixed_pos).push_back(static_cast<int>(i));

  const auto space = ev.output_space();
  std::vector<int> in(vars.size(), 0), out(ev.r());
  std::vector<int> fixed(fixed_pos.size(), 0), free(free_pos.size(), 0);
  std::vector<std::uint64_t> codes;
  std::vector<std::vector<int>> wide;
  std::vector<std::uint64_t> images;
  do {
    for (std::size_t i = 0; i < fixed_pos.size(); ++i) in[fixed_pos[i]] = fixed[i];
    std::fill(free.begin(), free.end(), 0);
    codes.clear();
    wide.clear();
    do {
      for (std::size_t i = 0; i < free_pos.size(); ++i) in[free_pos[i]] = free[i];
      ev.evaluate(in.data(), out.data());
      if (space)
        codes.push_back(ev.encode(out.data()));
      else
        wide.push_back(out);
    } while (next_tuple(free, q));
    if (space) {
      std::sort(codes.begin(), codes.end());
      images.push_back(std::unique(codes.begin(), codes.end()) - codes.begin());
    } else {
      std::sort(wide.begin(), wide.end());
      images.push_back(std::unique(wide.begin(), wide.end()) - wide.begin());
    }
  } while (next_tuple(fixed, q));
  return images;
}

inline double conditional_dispersion(const Interpretation& interp, const TermSet& ts,
                                     const std::vector<std::string>& free_vars,
                                     ConditionMode mode,
                                     const EvaluationOptions& opt = {}) {
  const auto images = conditional_slices(interp, ts, free_vars, opt);
  const double ln_q = std::log(static_cast<double>(interp.alphabet_size()));
  if (mode == ConditionMode::worst) {
    const auto lo = *std::min_element(images.begin(), images.end());
    return std::log(static_cast<double>(lo)) / ln_q;
  }
  double sum = 0.0;
  for (auto m : images) sum += std::log(static_cast<double>(m)) / ln_q;
  return sum / static_cast<double>(images.size());
}

// ---------------------------------------------------------------------------
// Decodability

// True iff the received tuple determines the value of `variable`.
inline bool decodable(const Interpretation& interp, const TermSet& ts,
                      std::string_view variable, const EvaluationOptions& opt = {}) {
  interp.check_covers(ts.signature());
  const int v = ts.signature().variable_index(variable);
  if (v < 0) throw PreconditionError("unknown variable " + std::string(variable));
  Evaluator ev(ts, interp);
  const int q = ev.alphabet_size();
  const std::uint64_t inputs = detail::check_budget(q, ev.k(), ev.r(), opt.budget);
  const auto space = ev.output_space();

  std::vector<int> in(ev.k(), 0), out(ev.r());
  if (space && *space <= (std::uint64_t{1} << 26)) {
    std::vector<int> seen(*space, -1);
    for (std::uint64_t i = 0; i < inputs; ++i, next_tuple(in, q)) {
      ev.evaluate(in.data(), out.data());
      int& slot = seen[ev.encode(out.data())];
      if (slot < 0)
        slot = in[v];
      else if (slot != in[v])
        return false;
    }
    return true;
  }
  std::map<std::vector<int>, int> seen;
  for (std::uint64_t i = 0; i < inputs; ++i, next_tuple(in, q)) {
    ev.evaluate(in.data(), out.data());
    auto [it, fresh] = seen.emplace(out, in[v]);
    if (!fresh && it->second != in[v]) return false;
  }
  return true;
}

}  // namespace termnet
