#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "termnet/catalog.hpp"
#include "termnet/multiuser.hpp"
#include "termnet/routing.hpp"

using namespace termnet;

namespace {

// Variables renamed v0, v1, ... in order of first appearance.
std::vector<Term> canonical(const TermSet& ts) {
  std::map<std::string, std::string> names;
  std::function<Term(const Term&)> walk = [&](const Term& t) -> Term {
    if (t.kind == Term::Kind::variable) {
      auto [it, fresh] = names.emplace(t.name, "v" + std::to_string(names.size()));
      return Term::var(it->second);
    }
    if (t.kind == Term::Kind::zero) return t;
    std::vector<Term> args;
    for (const auto& a : t.args) args.push_back(walk(a));
    return Term::apply(t.name, std::move(args));
  };
  std::vector<Term> out;
  for (const auto& t : ts.terms()) out.push_back(walk(t));
  return out;
}

Interpretation binary(int q, const char* name, std::function<int(int, int)> f) {
  Interpretation I(q);
  I.set(CodingTable::tabulate(name, 2, q, [&](std::span<const int> a) { return f(a[0], a[1]); }));
  return I;
}

Interpretation storage_witness(int q, int b) {
  Interpretation I(q);
  I.set(CodingTable::tabulate("f", 2, q, [q](std::span<const int> a) { return (a[0] + a[1]) % q; }));
  I.set(CodingTable::tabulate("g", 2, q, [q, b](std::span<const int> a) { return (a[0] + b * a[1]) % q; }));
  return I;
}

const char* kChain = R"({"nodes": [
  {"name": "x", "kind": "source"},
  {"name": "g", "kind": "inner", "in": ["x"]},
  {"name": "u", "kind": "user", "in": ["g"]}]})";

}  // namespace

TEST(Network, ParseAndOrder) {
  // listed out of order on purpose
  const auto net = parse_network(R"({"nodes": [
    {"name": "u", "kind": "user", "in": ["f", "y"]},
    {"name": "f", "kind": "inner", "in": ["x", "y"]},
    {"name": "x", "kind": "source"},
    {"name": "y", "kind": "source"}]})");
  ASSERT_EQ(net.nodes.size(), 4u);
  EXPECT_EQ(net.sources(), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(net.users(), std::vector<std::string>{"u"});
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < net.nodes.size(); ++i) pos[net.nodes[i].name] = i;
  for (const auto& n : net.nodes)
    for (const auto& a : n.in) EXPECT_LT(pos[a], pos[n.name]);
  EXPECT_EQ(parse_network(network_to_json(net)).nodes.size(), 4u);
}

TEST(Network, Rejects) {
  EXPECT_THROW(parse_network("{nodes"), ParseError);
  EXPECT_THROW(parse_network(R"({"nodes": [{"name": "x", "kind": "sink"}]})"), ParseError);
  // cycle
  EXPECT_THROW(parse_network(R"({"nodes": [{"name": "x", "kind": "source"},
    {"name": "a", "kind": "inner", "in": ["x", "b"]}, {"name": "b", "kind": "inner", "in": ["a"]}]})"),
               PreconditionError);
  // source with inputs
  EXPECT_THROW(parse_network(R"({"nodes": [{"name": "x", "kind": "source", "in": ["x"]}]})"),
               PreconditionError);
  // user without inputs
  EXPECT_THROW(parse_network(R"({"nodes": [{"name": "x", "kind": "source"}, {"name": "u", "kind": "user"}]})"),
               PreconditionError);
  // a user is read by another node
  EXPECT_THROW(parse_network(R"({"nodes": [{"name": "x", "kind": "source"},
    {"name": "u", "kind": "user", "in": ["x"]}, {"name": "v", "kind": "user", "in": ["u"]}]})"),
               PreconditionError);
  // unknown neighbour, duplicate name
  EXPECT_THROW(parse_network(R"({"nodes": [{"name": "u", "kind": "user", "in": ["z"]}]})"), PreconditionError);
  EXPECT_THROW(parse_network(R"({"nodes": [{"name": "x", "kind": "source"}, {"name": "x", "kind": "source"}]})"),
               ParseError);
}

TEST(Channels, Butterfly) {
  const auto ch = network_to_user_channels(build::butterfly_network());
  ASSERT_EQ(ch.size(), 2u);
  EXPECT_EQ(to_dsl(ch[0].terms), "term x\nterm f(x,y)\n");
  EXPECT_EQ(to_dsl(ch[1].terms), "term f(x,y)\nterm y\n");
  for (const auto& c : ch) EXPECT_EQ(c.terms.required(), (std::vector<std::string>{"x", "y"}));
}

TEST(Channels, StorageDropsTheTrivialUser) {
  const auto net = build::storage_network();
  const auto all = network_to_user_channels(net, true);
  ASSERT_EQ(all.size(), 6u);
  EXPECT_TRUE(all[0].trivial);
  const auto ch = network_to_user_channels(net);
  ASSERT_EQ(ch.size(), 5u);
  const std::vector<std::string> expect{
      "term x\nterm f(x,y)\n", "term y\nterm f(x,y)\n", "term x\nterm g(x,y)\n",
      "term y\nterm g(x,y)\n", "term f(x,y)\nterm g(x,y)\n"};
  for (std::size_t j = 0; j < ch.size(); ++j) {
    EXPECT_FALSE(ch[j].trivial);
    EXPECT_EQ(to_dsl(ch[j].terms).substr(0, expect[j].size()), expect[j]) << j;
  }
}

TEST(Channels, Chain) {
  const auto ch = network_to_user_channels(parse_network(kChain));
  ASSERT_EQ(ch.size(), 1u);
  EXPECT_EQ(ch[0].terms.term_count(), 1u);
  EXPECT_EQ(to_string(ch[0].terms.terms()[0]), "g(x)");
}

TEST(Channels, RequirementMustBeReachable) {
  EXPECT_THROW(network_to_user_channels(parse_network(R"({"nodes": [
    {"name": "x", "kind": "source"}, {"name": "y", "kind": "source"},
    {"name": "u", "kind": "user", "in": ["x"], "require": ["y"]}]})")),
               PreconditionError);
}

TEST(Combine, MatchesTheNamedSets) {
  const auto bf = combine_channels(network_to_user_channels(build::butterfly_network()));
  EXPECT_EQ(canonical(bf), canonical(build::butterfly()));
  EXPECT_EQ(bf.variables(), (std::vector<std::string>{"x_1", "y_1", "x_2", "y_2"}));
  EXPECT_TRUE(bf.requires_all());
  const auto st = combine_channels(network_to_user_channels(build::storage_network()));
  EXPECT_EQ(canonical(st), canonical(build::storage()));
  EXPECT_EQ(min_cut(st).value, 10);
}

TEST(Combine, SingleChannelIsARenamedCopy) {
  const auto g = build::gamma1();
  const auto c = combine_channels(std::vector<TermSet>{g});
  EXPECT_EQ(canonical(c), canonical(g));
  for (const auto& v : c.variables()) EXPECT_EQ(v.substr(v.size() - 2), "_1");
}

TEST(Combine, MinCutIsAdditive) {
  const std::vector<TermSet> parts{build::gamma1(), build::case_study(), build::gamma_k(2)};
  const auto c = combine_channels(parts);
  int sum = 0;
  for (const auto& p : parts) sum += min_cut(p).value;
  EXPECT_EQ(min_cut(c).value, sum);
}

TEST(Combine, DispersionIsAdditive) {
  const auto channels = network_to_user_channels(build::storage_network());
  const auto combined = combine_channels(channels);
  std::mt19937 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const int q = 2 + trial % 2;
    Interpretation I(q);
    for (const char* s : {"f", "g"}) {
      std::vector<int> table(q * q);
      for (auto& v : table) v = static_cast<int>(rng() % q);
      I.set(s, 2, table);
    }
    double parts = 0.0;
    for (const auto& ch : channels) parts += dispersion(preimage_histogram(I, ch.terms)).log_value;
    EXPECT_NEAR(dispersion(preimage_histogram(I, combined)).log_value, parts, 1e-9);
  }
}

TEST(Solvable, Butterfly) {
  const auto net = build::butterfly_network();
  const auto xor2 = binary(2, "f", [](int a, int b) { return a ^ b; });
  EXPECT_EQ(solvable(net, 2, xor2).verdict, Verdict::yes);
  const auto search = solvable(net, 2);
  EXPECT_EQ(search.verdict, Verdict::yes);
  ASSERT_TRUE(search.witness.has_value());
  EXPECT_EQ(search.method, "exhaustive");
  const auto first = binary(2, "f", [](int a, int) { return a; });
  EXPECT_EQ(solvable(net, 2, first).verdict, Verdict::unknown);
}

TEST(Solvable, StorageNeedsOrthogonalSquares) {
  const auto net = build::storage_network();
  const auto two = solvable(net, 2);
  EXPECT_EQ(two.verdict, Verdict::no);
  EXPECT_EQ(two.explored, 256u);

  const auto w = storage_witness(3, 2);
  EXPECT_EQ(solvable(net, 3, w).verdict, Verdict::yes);
  const auto combined = combine_channels(network_to_user_channels(net));
  const auto rep = preimage_histogram(w, combined);
  EXPECT_EQ(rep.image_size, 59049u);
  EXPECT_NEAR(dispersion(rep).log_value, 10.0, 1e-12);
  // the same squares with b = 1 coincide
  EXPECT_EQ(solvable(net, 3, storage_witness(3, 1)).verdict, Verdict::unknown);
}

TEST(Solvable, BudgetGivesUnknown) {
  SolveOptions tiny;
  tiny.budget = 10;
  EXPECT_EQ(solvable(build::storage_network(), 3, std::nullopt, tiny).verdict, Verdict::unknown);
  EXPECT_EQ(to_string(Verdict::unknown), "unknown");
  EXPECT_EQ(to_string(Verdict::no), "false");
}

// Full dispersion over the combined set is the same as every user decoding.
TEST(Solvable, DecodingMatchesFullDispersion) {
  const auto net = build::butterfly_network();
  const auto channels = network_to_user_channels(net);
  const auto combined = combine_channels(channels);
  for_each_interpretation(combined, 2, FunctionClass::all(), [&](std::uint64_t, const Interpretation& I) {
    const auto rep = preimage_histogram(I, combined);
    const bool full = rep.image_size == 16u && rep.one_image_size == 16u;
    EXPECT_EQ(all_users_decode(channels, I), full);
    return true;
  });
}

// Dynamic routing on the combined butterfly: every user's dispersion
// approaches its own min-cut as the alphabet grows.
TEST(MultiUser, DynamicRoutingApproachesEveryCut) {
  const auto channels = network_to_user_channels(build::butterfly_network());
  const auto combined = combine_channels(channels);
  const int s = static_cast<int>(subterm_closure(combined).size());
  double prev = 1e9;
  for (int q : {13, 25, 49}) {
    const auto dr = build_dynamic_routing(combined, q, false);
    double worst = 0.0;
    for (std::size_t j = 0; j < channels.size(); ++j) {
      std::vector<TermSet> only{channels[j].terms};
      const auto part = combine_channels(only);
      // evaluate the user's terms under the combined tables, renamed per user
      std::vector<Term> terms;
      for (std::size_t t = 2 * j; t < 2 * j + 2; ++t) terms.push_back(combined.terms()[t]);
      const TermSet user(terms);
      const double deficit = min_cut(part).value - dispersion(preimage_histogram(dr.interpretation, user)).log_value;
      EXPECT_GE(deficit, -1e-12);
      EXPECT_LE(deficit, 2 * std::log(static_cast<double>(s) * q / (q - s)) / std::log(q) + 1e-12) << q;
      worst = std::max(worst, deficit);
    }
    EXPECT_LT(worst, prev);
    prev = worst;
  }
}

// All one-to-one points of dynamic routing on the butterfly have x1 != x3.
TEST(MultiUser, DynamicRoutingCaveat) {
  const auto combined = combine_channels(network_to_user_channels(build::butterfly_network()));
  const int q = 13;
  const auto dr = build_dynamic_routing(combined, q, true);
  std::map<std::vector<int>, std::pair<int, std::vector<int>>> seen;
  std::vector<int> in(4, 0);
  do {
    auto& slot = seen[evaluate(dr.interpretation, combined, in)];
    if (slot.first++ == 0) slot.second = in;
  } while (next_tuple(in, q));
  int ones = 0;
  for (const auto& [out, v] : seen) {
    if (v.first != 1) continue;
    ++ones;
    EXPECT_NE(v.second[0], v.second[2]);
  }
  EXPECT_GT(ones, 0);
}

TEST(MultiUser, DiversifiedRoutingIsFull) {
  const auto combined = combine_channels(network_to_user_channels(build::butterfly_network()));
  const auto div = diversify(combined);
  for (int q : {2, 3}) {
    const auto rep = preimage_histogram(build_routing(div, assign_paths(div), q), div);
    EXPECT_EQ(rep.image_size, static_cast<std::uint64_t>(q * q * q * q));
  }
}
