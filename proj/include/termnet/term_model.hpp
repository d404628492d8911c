#pragma once

// Symbolic terms over variables and function symbols, term sets with their
// requirement, the line-oriented term-set DSL, subterm closure,
// diversification and variable restriction.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "termnet/errors.hpp"

namespace termnet {

struct Term {
  enum class Kind : std::uint8_t { variable, zero, application };

  Kind kind = Kind::variable;
  std::string name;  // empty for the constant 0
  std::vector<Term> args;

  static Term var(std::string name) {
    return Term{Kind::variable, std::move(name), {}};
  }
  static Term zero() { return Term{Kind::zero, {}, {}}; }
  static Term apply(std::string symbol, std::vector<Term> args) {
    return Term{Kind::application, std::move(symbol), std::move(args)};
  }

  bool is_variable() const noexcept { return kind == Kind::variable; }
  bool is_zero() const noexcept { return kind == Kind::zero; }
  bool is_application() const noexcept { return kind == Kind::application; }

  bool operator==(const Term&) const = default;
};

inline void write_term(std::string& out, const Term& t) {
  switch (t.kind) {
    case Term::Kind::variable:
      out += t.name;
      return;
    case Term::Kind::zero:
      out += '0';
      return;
    case Term::Kind::application:
      out += t.name;
      out += '(';
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += ',';
        write_term(out, t.args[i]);
      }
      out += ')';
      return;
  }
}

// Canonical rendering; two terms are structurally equal iff their renderings
// are equal.
inline std::string to_string(const Term& t) {
  std::string out;
  write_term(out, t);
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Term& t) {
  return os << to_string(t);
}

// u is a subterm of t (reflexive).
inline bool is_subterm(const Term& u, const Term& t) {
  if (u == t) return true;
  for (const auto& a : t.args)
    if (is_subterm(u, a)) return true;
  return false;
}

struct FunctionSymbol {
  std::string name;
  int arity = 0;
  bool operator==(const FunctionSymbol&) const = default;
};

struct Signature {
  std::vector<FunctionSymbol> functions;  // order of first occurrence
  std::vector<std::string> variables;     // order of first occurrence
  bool has_zero = false;

  int variable_index(std::string_view v) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
      if (variables[i] == v) return static_cast<int>(i);
    return -1;
  }
  const FunctionSymbol* function(std::string_view f) const {
    for (const auto& s : functions)
      if (s.name == f) return &s;
    return nullptr;
  }

  bool operator==(const Signature&) const = default;
};

namespace detail {

inline void collect_signature(const Term& t, Signature& sig,
                              std::set<std::string>& vars,
                              std::map<std::string, int>& arity) {
  switch (t.kind) {
    case Term::Kind::variable:
      if (arity.count(t.name))
        throw PreconditionError("identifier '" + t.name +
                                "' used both as variable and function symbol");
      if (vars.insert(t.name).second) sig.variables.push_back(t.name);
      return;
    case Term::Kind::zero:
      sig.has_zero = true;
      return;
    case Term::Kind::application: {
      if (t.args.empty())
        throw PreconditionError("function symbol '" + t.name +
                                "' applied to no arguments");
      if (vars.count(t.name))
        throw PreconditionError("identifier '" + t.name +
                                "' used both as variable and function symbol");
      const int d = static_cast<int>(t.args.size());
      auto [it, inserted] = arity.emplace(t.name, d);
      if (inserted) {
        sig.functions.push_back({t.name, d});
      } else if (it->second != d) {
        throw PreconditionError("arity conflict for '" + t.name + "': " +
                                std::to_string(it->second) + " vs " +
                                std::to_string(d));
      }
      for (const auto& a : t.args) collect_signature(a, sig, vars, arity);
      return;
    }
  }
}

}  // namespace detail

// An ordered list of terms (the coordinates of the induced mapping) plus the
// subset of variables the receiver requires.
class TermSet {
 public:
  TermSet() = default;

  explicit TermSet(std::vector<Term> terms) : terms_(std::move(terms)) {
    build_signature();
    required_ = signature_.variables;
  }

  TermSet(std::vector<Term> terms, std::vector<std::string> required)
      : terms_(std::move(terms)), required_(std::move(required)) {
    build_signature();
    std::set<std::string> seen;
    for (const auto& v : required_) {
      if (signature_.variable_index(v) < 0)
        throw PreconditionError("required variable '" + v +
                                "' does not occur in any term");
      if (!seen.insert(v).second)
        throw PreconditionError("variable '" + v + "' required twice");
    }
  }

  const Signature& signature() const noexcept { return signature_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  const std::vector<std::string>& required() const noexcept {
    return required_;
  }
  const std::vector<std::string>& variables() const noexcept {
    return signature_.variables;
  }

  std::size_t variable_count() const noexcept {
    return signature_.variables.size();
  }
  std::size_t term_count() const noexcept { return terms_.size(); }
  bool requires_all() const {
    return required_.size() == signature_.variables.size();
  }

  bool operator==(const TermSet&) const = default;

 private:
  void build_signature() {
    std::set<std::string> vars;
    std::map<std::string, int> arity;
    for (const auto& t : terms_)
      detail::collect_signature(t, signature_, vars, arity);
  }

  Signature signature_;
  std::vector<Term> terms_;
  std::vector<std::string> required_;
};

// ---------------------------------------------------------------------------
// DSL

namespace detail {

class TermParser {
 public:
  TermParser(std::string_view text, int line, int column_offset)
      : text_(text), line_(line), offset_(column_offset) {}

  Term parse_all() {
    Term t = parse_term();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return t;
  }

 private:
  static bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '\'';
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_, offset_ + static_cast<int>(pos_) + 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
      ++pos_;
  }

  Term parse_term() {
    skip_space();
    if (pos_ >= text_.size()) fail("expected a term");
    const char c = text_[pos_];
    if (c == '0') {
      ++pos_;
      if (pos_ < text_.size() && ident_char(text_[pos_]))
        fail("identifiers cannot start with a digit");
      return Term::zero();
    }
    if (!ident_start(c)) fail(std::string("unexpected character '") + c + "'");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != '(') return Term::var(name);
    ++pos_;
    std::vector<Term> args;
    args.push_back(parse_term());
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated argument list");
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      if (text_[pos_] != ',') fail("expected ',' or ')'");
      ++pos_;
      args.push_back(parse_term());
    }
    return Term::apply(std::move(name), std::move(args));
  }

  std::string_view text_;
  int line_;
  int offset_;
  std::size_t pos_ = 0;
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline Term parse_term(std::string_view text) {
  return detail::TermParser(detail::trim(text), 1, 0).parse_all();
}

// Parses the term-set DSL:
//   term <term>         one coordinate of the channel (duplicates allowed)
//   require <v> <v>...  required variables (default: all)
//   # comment
inline TermSet parse_term_set(std::string_view text) {
  std::vector<Term> terms;
  std::vector<int> term_lines;
  std::optional<std::vector<std::string>> required;
  int require_line = 0;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const std::size_t lead = raw.find_first_not_of(" \t\r");
    if (lead == std::string_view::npos) continue;
    std::string_view line = detail::trim(raw);
    if (line.front() == '#') continue;

    auto keyword_end = line.find_first_of(" \t");
    std::string_view keyword = line.substr(0, keyword_end);
    std::string_view rest =
        keyword_end == std::string_view::npos ? std::string_view{}
                                              : line.substr(keyword_end);
    const int rest_col = static_cast<int>(lead + (rest.data() - line.data()));
    if (keyword == "term") {
      if (detail::trim(rest).empty())
        throw ParseError("'term' needs a term", line_no, rest_col + 1);
      terms.push_back(detail::TermParser(rest, line_no, rest_col).parse_all());
      term_lines.push_back(line_no);
    } else if (keyword == "require") {
      if (required)
        throw ParseError("duplicate 'require' statement", line_no, 1);
      required.emplace();
      require_line = line_no;
      std::istringstream is{std::string(rest)};
      std::string id;
      while (is >> id) {
        for (std::size_t i = 0; i < id.size(); ++i) {
          const char c = id[i];
          const bool ok = i == 0 ? (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
                                 : (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'');
          if (!ok)
            throw ParseError("invalid identifier '" + id + "' in require",
                             line_no, 1);
        }
        required->push_back(id);
      }
      if (required->empty())
        throw ParseError("'require' needs at least one variable", line_no, 1);
    } else {
      throw ParseError("unknown statement '" + std::string(keyword) + "'",
                       line_no, static_cast<int>(lead) + 1);
    }
  }

  // Re-run signature construction term by term so errors carry a line.
  {
    std::vector<Term> prefix;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      prefix.push_back(terms[i]);
      try {
        TermSet probe(prefix);
      } catch (const PreconditionError& e) {
        throw ParseError(e.what(), term_lines[i], 1);
      }
    }
  }
  try {
    if (required) return TermSet(std::move(terms), std::move(*required));
    return TermSet(std::move(terms));
  } catch (const PreconditionError& e) {
    throw ParseError(e.what(), require_line, 1);
  }
}

// Inverse of parse_term_set up to whitespace and comments.
inline std::string to_dsl(const TermSet& ts) {
  std::string out;
  for (const auto& t : ts.terms()) {
    out += "term ";
    write_term(out, t);
    out += '\n';
  }
  if (ts.required() != ts.variables()) {
    out += "require";
    for (const auto& v : ts.required()) {
      out += ' ';
      out += v;
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subterm closure

struct Subterm {
  Term term;
  std::string text;
  std::vector<int> children;  // direct subterms in argument order
};

// The deduplicated subterms of a term set in post-order of first occurrence,
// so every direct subterm precedes its superterms.
class SubtermIndex {
 public:
  SubtermIndex() = default;

  explicit SubtermIndex(const TermSet& ts) {
    for (const auto& t : ts.terms()) term_vertices_.push_back(insert(t));
    for (const auto& v : ts.variables()) variable_vertices_.push_back(find(Term::var(v)));
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  const Subterm& operator[](std::size_t i) const { return nodes_[i]; }
  const std::vector<Subterm>& nodes() const noexcept { return nodes_; }

  int find(const Term& t) const { return find(to_string(t)); }
  int find(const std::string& text) const {
    auto it = by_text_.find(text);
    return it == by_text_.end() ? -1 : it->second;
  }

  // Vertex of each term of the term set, in term order (may repeat).
  const std::vector<int>& term_vertices() const noexcept {
    return term_vertices_;
  }
  // Vertex of each signature variable, in signature order.
  const std::vector<int>& variable_vertices() const noexcept {
    return variable_vertices_;
  }
  int zero_vertex() const { return find(Term::zero()); }

 private:
  int insert(const Term& t) {
    std::vector<int> children;
    children.reserve(t.args.size());
    for (const auto& a : t.args) children.push_back(insert(a));
    std::string text = to_string(t);
    auto it = by_text_.find(text);
    if (it != by_text_.end()) return it->second;
    const int id = static_cast<int>(nodes_.size());
    by_text_.emplace(text, id);
    nodes_.push_back({t, std::move(text), std::move(children)});
    return id;
  }

  std::vector<Subterm> nodes_;
  std::unordered_map<std::string, int> by_text_;
  std::vector<int> term_vertices_;
  std::vector<int> variable_vertices_;
};

inline SubtermIndex subterm_closure(const TermSet& ts) {
  return SubtermIndex(ts);
}

// ---------------------------------------------------------------------------
// Diversification

// Gives every non-variable subterm its own principal symbol of the same arity.
// Symbols that already label a single subterm keep their name; shared symbols
// are numbered in subterm order (f -> f1, f2, ...).
inline TermSet diversify(const TermSet& ts) {
  const SubtermIndex index(ts);

  std::map<std::string, int> uses;
  for (const auto& node : index.nodes())
    if (node.term.is_application()) ++uses[node.term.name];

  std::set<std::string> taken(ts.variables().begin(), ts.variables().end());
  for (const auto& f : ts.signature().functions) taken.insert(f.name);

  std::map<std::string, int> counter;
  std::vector<std::string> new_name(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const Term& t = index[i].term;
    if (!t.is_application()) continue;
    if (uses[t.name] == 1) {
      new_name[i] = t.name;
      continue;
    }
    const int n = ++counter[t.name];
    std::string candidate = t.name + std::to_string(n);
    if (taken.count(candidate)) candidate = t.name + "_d" + std::to_string(n);
    while (taken.count(candidate)) candidate += '\'';
    taken.insert(candidate);
    new_name[i] = std::move(candidate);
  }

  std::vector<Term> rebuilt(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto& node = index[i];
    if (!node.term.is_application()) {
      rebuilt[i] = node.term;
      continue;
    }
    std::vector<Term> args;
    args.reserve(node.children.size());
    for (int c : node.children) args.push_back(rebuilt[c]);
    rebuilt[i] = Term::apply(new_name[i], std::move(args));
  }

  std::vector<Term> terms;
  for (int v : index.term_vertices()) terms.push_back(rebuilt[v]);
  return TermSet(std::move(terms), ts.required());
}

// True when no function symbol is the principal symbol of two distinct
// subterms.
inline bool is_diversified(const TermSet& ts) {
  const SubtermIndex index(ts);
  std::set<std::string> seen;
  for (const auto& node : index.nodes())
    if (node.term.is_application() && !seen.insert(node.term.name).second)
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// Restriction to a variable subset

namespace detail {

inline Term substitute_zero(const Term& t, const std::set<std::string>& keep) {
  switch (t.kind) {
    case Term::Kind::variable:
      return keep.count(t.name) ? t : Term::zero();
    case Term::Kind::zero:
      return t;
    case Term::Kind::application: {
      std::vector<Term> args;
      args.reserve(t.args.size());
      for (const auto& a : t.args) args.push_back(substitute_zero(a, keep));
      return Term::apply(t.name, std::move(args));
    }
  }
  return t;
}

}  // namespace detail

// Replaces every variable outside `keep` by the constant 0.
inline TermSet restrict_to_variables(const TermSet& ts,
                                     const std::vector<std::string>& keep) {
  std::set<std::string> keep_set;
  for (const auto& v : keep) {
    if (ts.signature().variable_index(v) < 0)
      throw PreconditionError("unknown variable '" + v + "'");
    keep_set.insert(v);
  }
  std::vector<Term> terms;
  terms.reserve(ts.term_count());
  for (const auto& t : ts.terms())
    terms.push_back(detail::substitute_zero(t, keep_set));
  std::vector<std::string> required;
  for (const auto& v : ts.required())
    if (keep_set.count(v)) required.push_back(v);
  return TermSet(std::move(terms), std::move(required));
}

// ---------------------------------------------------------------------------
// Term cuts

// `in_cut[v]` marks candidate vertices of `index`. Every term must be
// syntactically expressible from the candidates (and from 0 when
// `allow_zero`).
inline bool is_term_cut(const SubtermIndex& index,
                        const std::vector<bool>& in_cut, bool allow_zero) {
  std::vector<char> expressible(index.size(), 0);
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto& node = index[i];
    if (in_cut[i]) {
      expressible[i] = 1;
    } else if (node.term.is_zero()) {
      expressible[i] = allow_zero;
    } else if (node.term.is_variable()) {
      expressible[i] = 0;
    } else {
      bool all = true;
      for (int c : node.children) all = all && expressible[c];
      expressible[i] = all;
    }
  }
  for (int t : index.term_vertices())
    if (!expressible[t]) return false;
  return true;
}

// With `restrict_to` given, the check is made on the restricted term set and
// the constant 0 is freely available.
inline bool is_term_cut(
    const TermSet& ts, const std::vector<Term>& candidate,
    const std::optional<std::vector<std::string>>& restrict_to = std::nullopt) {
  const TermSet target = restrict_to ? restrict_to_variables(ts, *restrict_to) : ts;
  const SubtermIndex index(target);
  std::vector<bool> in_cut(index.size(), false);
  for (const auto& c : candidate) {
    const int v = index.find(c);
    if (v < 0)
      throw PreconditionError("'" + to_string(c) + "' is not a subterm");
    in_cut[v] = true;
  }
  return is_term_cut(index, in_cut, restrict_to.has_value());
}

}  // namespace termnet
