#pragma once

// The graph G_Γ of a term set and exact minimum vertex cuts separating the
// variables from the terms, with vertex-disjoint path certificates.

#include <algorithm>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "termnet/term_model.hpp"

namespace termnet {

struct TermDag {
  SubtermIndex index;
  std::vector<std::pair<int, int>> edges;    // (direct subterm, superterm)
  std::vector<std::vector<int>> successors;  // ascending vertex order
  std::vector<int> sources;                  // variable vertices
  std::vector<int> targets;                  // distinct term vertices

  std::size_t vertex_count() const noexcept { return index.size(); }
  bool is_source(int v) const {
    return std::find(sources.begin(), sources.end(), v) != sources.end();
  }
  bool is_target(int v) const {
    return std::find(targets.begin(), targets.end(), v) != targets.end();
  }
  bool has_edge(int from, int to) const {
    const auto& s = successors[from];
    return std::binary_search(s.begin(), s.end(), to);
  }
};

inline TermDag build_dag(const TermSet& ts) {
  TermDag dag;
  dag.index = SubtermIndex(ts);
  const std::size_t n = dag.index.size();
  dag.successors.resize(n);
  std::set<std::pair<int, int>> seen;
  for (std::size_t v = 0; v < n; ++v) {
    for (int c : dag.index[v].children) {
      if (seen.emplace(c, static_cast<int>(v)).second) {
        dag.edges.emplace_back(c, static_cast<int>(v));
        dag.successors[c].push_back(static_cast<int>(v));
      }
    }
  }
  for (auto& s : dag.successors) std::sort(s.begin(), s.end());
  for (int v : dag.index.variable_vertices()) dag.sources.push_back(v);
  for (int t : dag.index.term_vertices())
    if (!dag.is_target(t)) dag.targets.push_back(t);
  return dag;
}

struct CutCertificate {
  int value = 0;
  std::vector<int> cut_vertices;         // ascending
  std::vector<std::vector<int>> paths;   // vertex lists, source first

  bool operator==(const CutCertificate&) const = default;
};

namespace detail {

// Dinic's blocking-flow algorithm. Arc order is insertion order, which keeps
// every traversal deterministic.
class FlowNetwork {
 public:
  static constexpr int kInfinite = std::numeric_limits<int>::max() / 4;

  struct Arc {
    int to;
    int rev;
    int cap;
    int original;
  };

  explicit FlowNetwork(int n) : arcs_(n), level_(n), next_(n) {}

  void add_arc(int from, int to, int cap) {
    arcs_[from].push_back({to, static_cast<int>(arcs_[to].size()), cap, cap});
    arcs_[to].push_back({from, static_cast<int>(arcs_[from].size()) - 1, 0, 0});
  }

  int max_flow(int s, int t) {
    int flow = 0;
    while (build_levels(s, t)) {
      std::fill(next_.begin(), next_.end(), 0);
      while (int pushed = augment(s, t, kInfinite)) flow += pushed;
    }
    return flow;
  }

  std::vector<char> residual_reachable(int s) const {
    std::vector<char> seen(arcs_.size(), 0);
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const auto& a : arcs_[u])
        if (a.cap > 0 && !seen[a.to]) {
          seen[a.to] = 1;
          q.push(a.to);
        }
    }
    return seen;
  }

  std::vector<std::vector<Arc>>& arcs() { return arcs_; }

 private:
  bool build_levels(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const auto& a : arcs_[u])
        if (a.cap > 0 && level_[a.to] < 0) {
          level_[a.to] = level_[u] + 1;
          q.push(a.to);
        }
    }
    return level_[t] >= 0;
  }

  int augment(int u, int t, int limit) {
    if (u == t) return limit;
    for (int& i = next_[u]; i < static_cast<int>(arcs_[u].size()); ++i) {
      Arc& a = arcs_[u][i];
      if (a.cap <= 0 || level_[a.to] != level_[u] + 1) continue;
      if (int pushed = augment(a.to, t, std::min(limit, a.cap))) {
        a.cap -= pushed;
        arcs_[a.to][a.rev].cap += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<std::vector<Arc>> arcs_;
  std::vector<int> level_;
  std::vector<int> next_;
};

}  // namespace detail

// Each vertex v becomes in(v) -> out(v) with capacity 1; a variable that is
// also a term yields a single-vertex path. The reported cut is the canonical
// one closest to the sources.
inline CutCertificate min_cut(const TermDag& dag) {
  const int n = static_cast<int>(dag.vertex_count());
  const int source = 2 * n;
  const int sink = 2 * n + 1;
  auto in = [](int v) { return 2 * v; };
  auto out = [](int v) { return 2 * v + 1; };

  detail::FlowNetwork net(2 * n + 2);
  std::vector<char> target(n, 0);
  for (int t : dag.targets) target[t] = 1;
  for (int v = 0; v < n; ++v) {
    net.add_arc(in(v), out(v), 1);
    if (target[v]) net.add_arc(out(v), sink, detail::FlowNetwork::kInfinite);
    for (int w : dag.successors[v])
      net.add_arc(out(v), in(w), detail::FlowNetwork::kInfinite);
  }
  for (int s : dag.sources)
    net.add_arc(source, in(s), detail::FlowNetwork::kInfinite);

  CutCertificate cert;
  cert.value = net.max_flow(source, sink);

  const auto reach = net.residual_reachable(source);
  for (int v = 0; v < n; ++v)
    if (reach[in(v)] && !reach[out(v)]) cert.cut_vertices.push_back(v);

  auto& arcs = net.arcs();
  for (auto& start : arcs[source]) {
    // flow on an arc is original - cap; consuming a unit restores one cap
    if (start.original - start.cap <= 0) continue;
    ++start.cap;
    std::vector<int> path;
    int node = start.to;
    while (node != sink) {
      if (node % 2 == 0) {
        path.push_back(node / 2);
        node = out(node / 2);
        continue;
      }
      bool moved = false;
      for (auto& a : arcs[node]) {
        if (a.original - a.cap > 0) {
          ++a.cap;
          node = a.to;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    cert.paths.push_back(std::move(path));
  }
  return cert;
}

inline CutCertificate min_cut(const TermSet& ts) { return min_cut(build_dag(ts)); }

// Min-cut of the term set with every variable outside `keep` replaced by 0.
// The constant is never a source and never enters a cut.
inline CutCertificate min_cut_wrt(const TermSet& ts,
                                  const std::vector<std::string>& keep) {
  return min_cut(build_dag(restrict_to_variables(ts, keep)));
}

struct CertificateCheck {
  bool valid = true;
  std::vector<std::string> reasons;
  explicit operator bool() const noexcept { return valid; }
};

// Re-checks a certificate by direct traversal of the DAG, without touching
// the flow code.
inline CertificateCheck verify_certificate(const TermDag& dag,
                                           const CutCertificate& cert) {
  CertificateCheck check;
  auto fail = [&](std::string why) {
    check.valid = false;
    check.reasons.push_back(std::move(why));
  };
  const int n = static_cast<int>(dag.vertex_count());

  if (cert.value < 0) fail("negative value");
  if (static_cast<int>(cert.cut_vertices.size()) != cert.value)
    fail("cut size differs from value");
  if (static_cast<int>(cert.paths.size()) != cert.value)
    fail("path count differs from value");

  std::vector<char> in_cut(n, 0);
  for (int v : cert.cut_vertices) {
    if (v < 0 || v >= n) {
      fail("cut vertex out of range");
      return check;
    }
    if (in_cut[v]) fail("duplicate cut vertex " + dag.index[v].text);
    in_cut[v] = 1;
  }

  std::vector<int> owner(n, -1);
  for (std::size_t p = 0; p < cert.paths.size(); ++p) {
    const auto& path = cert.paths[p];
    const std::string label = "path " + std::to_string(p);
    if (path.empty()) {
      fail(label + " is empty");
      continue;
    }
    bool in_range = true;
    for (int v : path) in_range = in_range && v >= 0 && v < n;
    if (!in_range) {
      fail(label + " has a vertex out of range");
      continue;
    }
    if (!dag.is_source(path.front())) fail(label + " does not start at a variable");
    if (!dag.is_target(path.back())) fail(label + " does not end at a term");
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      if (!dag.has_edge(path[i], path[i + 1]))
        fail(label + " uses a missing edge");
    int hits = 0;
    for (int v : path) {
      if (owner[v] >= 0)
        fail(label + " overlaps path " + std::to_string(owner[v]) + " at " +
             dag.index[v].text);
      owner[v] = static_cast<int>(p);
      hits += in_cut[v];
    }
    if (hits != 1)
      fail(label + " contains " + std::to_string(hits) + " cut vertices");
  }

  std::vector<char> seen(n, 0);
  std::vector<int> stack;
  for (int s : dag.sources)
    if (!in_cut[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    if (dag.is_target(u)) {
      fail("removing the cut leaves a path to " + dag.index[u].text);
      break;
    }
    for (int w : dag.successors[u])
      if (!in_cut[w] && !seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  return check;
}

// True when removing `removed` leaves no directed path from a variable to a
// term (a variable that is itself a term counts as a path).
inline bool is_vertex_cut(const TermDag& dag, const std::vector<bool>& removed) {
  std::vector<char> seen(dag.vertex_count(), 0);
  std::vector<int> stack;
  for (int s : dag.sources)
    if (!removed[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    if (dag.is_target(u)) return false;
    for (int w : dag.successors[u])
      if (!removed[w] && !seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  return true;
}

inline std::vector<std::string> describe_path(const TermDag& dag,
                                              const std::vector<int>& path) {
  std::vector<std::string> out;
  out.reserve(path.size());
  for (int v : path) out.push_back(dag.index[v].text);
  return out;
}

}  // namespace termnet
