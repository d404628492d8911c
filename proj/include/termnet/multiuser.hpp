#pragma once

// Multi-user networks: per-user channels as term sets, their disjoint union,
// and solvability as simultaneous decodability.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "termnet/interpretation.hpp"
#include "termnet/mincut.hpp"
#include "termnet/search.hpp"

namespace termnet {

struct NetworkNode {
  enum class Kind { source, inner, user };
  std::string name;
  Kind kind = Kind::inner;
  std::vector<std::string> in;                 // argument order
  std::optional<std::vector<std::string>> require;  // users only; default all sources
};

struct NetworkInstance {
  std::vector<NetworkNode> nodes;  // topological order after validation

  std::vector<std::string> sources() const {
    std::vector<std::string> out;
    for (const auto& n : nodes)
      if (n.kind == NetworkNode::Kind::source) out.push_back(n.name);
    return out;
  }
  std::vector<std::string> users() const {
    std::vector<std::string> out;
    for (const auto& n : nodes)
      if (n.kind == NetworkNode::Kind::user) out.push_back(n.name);
    return out;
  }
};

namespace detail {

inline bool valid_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  });
}

}  // namespace detail

// Checks roles and references, then reorders nodes topologically (stable
// with respect to file order).
inline NetworkInstance validate_network(NetworkInstance net) {
  using K = NetworkNode::Kind;
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    const auto& n = net.nodes[i];
    if (!detail::valid_identifier(n.name)) throw ParseError("invalid node name '" + n.name + "'");
    if (!pos.emplace(n.name, i).second) throw ParseError("duplicate node " + n.name);
  }
  for (const auto& n : net.nodes) {
    if (n.kind == K::source && !n.in.empty()) throw PreconditionError("source " + n.name + " has inputs");
    if (n.kind != K::source && n.in.empty())
      throw PreconditionError(std::string(n.kind == K::user ? "user " : "node ") + n.name + " has no inputs");
    if (n.kind != K::user && n.require) throw PreconditionError("only users may carry requirements");
    for (const auto& a : n.in) {
      auto it = pos.find(a);
      if (it == pos.end()) throw PreconditionError(n.name + " reads unknown node " + a);
      if (net.nodes[it->second].kind == K::user) throw PreconditionError("user " + a + " has an outgoing edge");
    }
  }
  std::vector<int> indeg(net.nodes.size(), 0);
  std::vector<std::vector<std::size_t>> out(net.nodes.size());
  for (std::size_t i = 0; i < net.nodes.size(); ++i)
    for (const auto& a : std::set<std::string>(net.nodes[i].in.begin(), net.nodes[i].in.end())) {
      out[pos[a]].push_back(i);
      ++indeg[i];
    }
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < indeg.size(); ++i)
    if (!indeg[i]) ready.insert(i);
  std::vector<NetworkNode> sorted;
  while (!ready.empty()) {
    const auto i = *ready.begin();
    ready.erase(ready.begin());
    sorted.push_back(net.nodes[i]);
    for (auto j : out[i])
      if (--indeg[j] == 0) ready.insert(j);
  }
  if (sorted.size() != net.nodes.size()) throw PreconditionError("network contains a cycle");
  net.nodes = std::move(sorted);
  return net;
}

inline NetworkInstance parse_network(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("network file: ") + e.what());
  }
  NetworkInstance net;
  try {
    for (const auto& jn : j.at("nodes")) {
      NetworkNode n;
      n.name = jn.at("name").get<std::string>();
      const auto kind = jn.at("kind").get<std::string>();
      if (kind == "source") n.kind = NetworkNode::Kind::source;
      else if (kind == "inner") n.kind = NetworkNode::Kind::inner;
      else if (kind == "user") n.kind = NetworkNode::Kind::user;
      else throw ParseError("unknown node kind '" + kind + "'");
      if (jn.contains("in")) n.in = jn.at("in").get<std::vector<std::string>>();
      if (jn.contains("require")) n.require = jn.at("require").get<std::vector<std::string>>();
      net.nodes.push_back(std::move(n));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("network file: ") + e.what());
  }
  return validate_network(std::move(net));
}

inline std::string network_to_json(const NetworkInstance& net) {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : net.nodes) {
    nlohmann::ordered_json jn;
    jn["name"] = n.name;
    jn["kind"] = n.kind == NetworkNode::Kind::source ? "source"
                 : n.kind == NetworkNode::Kind::inner ? "inner" : "user";
    if (!n.in.empty()) jn["in"] = n.in;
    if (n.require) jn["require"] = *n.require;
    j["nodes"].push_back(std::move(jn));
  }
  return j.dump(2) + "\n";
}

struct UserChannel {
  std::string user;
  TermSet terms;
  bool trivial = false;  // every required variable is received verbatim
};

// Sources become variables and inner nodes function symbols, both under the
// node's own name.
inline std::vector<UserChannel> network_to_user_channels(const NetworkInstance& net,
                                                         bool include_trivial = false) {
  std::map<std::string, Term> term_of;
  std::vector<UserChannel> out;
  const auto all_sources = net.sources();
  for (const auto& n : net.nodes) {
    std::vector<Term> args;
    for (const auto& a : n.in) {
      auto it = term_of.find(a);
      if (it == term_of.end()) throw PreconditionError("network is not topologically ordered at " + n.name);
      args.push_back(it->second);
    }
    switch (n.kind) {
      case NetworkNode::Kind::source: term_of.emplace(n.name, Term::var(n.name)); break;
      case NetworkNode::Kind::inner: term_of.emplace(n.name, Term::apply(n.name, std::move(args))); break;
      case NetworkNode::Kind::user: {
        TermSet any(args);
        const auto req = n.require.value_or(all_sources);
        for (const auto& v : req)
          if (any.signature().variable_index(v) < 0)
            throw PreconditionError("user " + n.name + " cannot receive source " + v);
        UserChannel ch{n.name, TermSet(args, req), false};
        ch.trivial = std::all_of(req.begin(), req.end(), [&](const std::string& v) {
          return std::find(args.begin(), args.end(), Term::var(v)) != args.end();
        });
        if (include_trivial || !ch.trivial) out.push_back(std::move(ch));
        break;
      }
    }
  }
  return out;
}

namespace detail {

inline Term rename_variables(const Term& t, const std::string& suffix) {
  switch (t.kind) {
    case Term::Kind::variable: return Term::var(t.name + suffix);
    case Term::Kind::zero: return t;
    case Term::Kind::application: {
      std::vector<Term> args;
      for (const auto& a : t.args) args.push_back(rename_variables(a, suffix));
      return Term::apply(t.name, std::move(args));
    }
  }
  return t;
}

}  // namespace detail

// Disjoint union with variable v of channel j renamed v_j (1-based).
inline TermSet combine_channels(const std::vector<TermSet>& channels) {
  std::vector<Term> terms;
  std::vector<std::string> required;
  for (std::size_t j = 0; j < channels.size(); ++j) {
    const std::string suffix = "_" + std::to_string(j + 1);
    for (const auto& t : channels[j].terms()) terms.push_back(detail::rename_variables(t, suffix));
    for (const auto& v : channels[j].required()) required.push_back(v + suffix);
  }
  // requirement list follows the union's variable order
  const TermSet probe(terms);
  std::vector<std::string> ordered;
  for (const auto& v : probe.variables())
    if (std::find(required.begin(), required.end(), v) != required.end()) ordered.push_back(v);
  return TermSet(std::move(terms), std::move(ordered));
}

inline TermSet combine_channels(const std::vector<UserChannel>& channels) {
  std::vector<TermSet> sets;
  for (const auto& c : channels) sets.push_back(c.terms);
  return combine_channels(sets);
}

// ---------------------------------------------------------------------------
// Solvability

enum class Verdict { yes, no, unknown };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "true";
    case Verdict::no: return "false";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

struct Solvability {
  Verdict verdict = Verdict::unknown;
  std::optional<Interpretation> witness;
  std::uint64_t explored = 0;
  std::string method;  // "witness" or "exhaustive"
};

namespace detail {

// True iff the received tuple determines every required variable.
inline bool channel_decodes(Evaluator& ev, const TermSet& ts) {
  const int q = ev.alphabet_size();
  std::vector<int> req;
  for (const auto& v : ts.required()) req.push_back(ts.signature().variable_index(v));
  const std::uint64_t inputs = *checked_pow(q, ev.k());
  std::map<std::vector<int>, std::vector<int>> seen;
  std::vector<int> in(ev.k(), 0), out(ev.r()), want(req.size());
  for (std::uint64_t i = 0; i < inputs; ++i, next_tuple(in, q)) {
    ev.evaluate(in.data(), out.data());
    for (std::size_t j = 0; j < req.size(); ++j) want[j] = in[req[j]];
    auto [it, fresh] = seen.emplace(out, want);
    if (!fresh && it->second != want) return false;
  }
  return true;
}

}  // namespace detail

inline bool all_users_decode(const std::vector<UserChannel>& channels, const Interpretation& interp,
                             std::uint64_t budget = kDefaultBudget) {
  for (const auto& ch : channels) {
    interp.check_covers(ch.terms.signature());
    Evaluator ev(ch.terms, interp);
    detail::check_budget(interp.alphabet_size(), ev.k(), ev.r(), budget);
    if (!detail::channel_decodes(ev, ch.terms)) return false;
  }
  return true;
}

struct SolveOptions {
  std::uint64_t budget = 10'000'000'000ULL;
};

// With a witness the answer is yes or unknown; without one the search over
// all coding functions is exhaustive, so a miss means no.
inline Solvability solvable(const NetworkInstance& net, int q,
                            const std::optional<Interpretation>& witness = std::nullopt,
                            const SolveOptions& opt = {}) {
  const auto channels = network_to_user_channels(net);
  Solvability res;
  if (witness) {
    res.method = "witness";
    res.explored = 1;
    if (witness->alphabet_size() != q) throw PreconditionError("witness alphabet differs from q");
    if (all_users_decode(channels, *witness, opt.budget)) {
      res.verdict = Verdict::yes;
      res.witness = witness;
    }
    return res;
  }
  res.method = "exhaustive";
  if (channels.empty()) {
    res.verdict = Verdict::yes;
    res.witness = Interpretation(q);
    return res;
  }
  const TermSet combined = combine_channels(channels);
  std::uint64_t per = 0;
  for (const auto& ch : channels) {
    const auto inputs = checked_pow(q, ch.terms.variable_count());
    if (!inputs) return res;
    per += *inputs * std::max<std::uint64_t>(1, ch.terms.term_count());
  }
  std::uint64_t total = 0;
  try {
    total = detail::class_size(detail::symbol_spaces(combined.signature(), q, FunctionClass::all()));
  } catch (const BudgetExceeded&) {
    return res;
  }
  if (total > opt.budget / per) return res;

  res.explored = for_each_interpretation(combined, q, FunctionClass::all(),
                                         [&](std::uint64_t, const Interpretation& interp) {
                                           if (!all_users_decode(channels, interp)) return true;
                                           res.witness = interp;
                                           return false;
                                         });
  res.verdict = res.witness ? Verdict::yes : Verdict::no;
  return res;
}

}  // namespace termnet
