#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "termnet/mincut.hpp"
#include "termnet/multiuser.hpp"
#include "termnet/routing.hpp"
#include "termnet/search.hpp"

using namespace termnet;

namespace {

constexpr int kInstances = 120;

const std::vector<Alpha>& alpha_grid() {
  static const std::vector<Alpha> grid{Alpha(0),    Alpha(1, 4), Alpha(1, 2), Alpha(9, 10), Alpha(1),
                                       Alpha(11, 10), Alpha(3, 2), Alpha(2),    Alpha(3),     Alpha(5),
                                       Alpha::infinity()};
  return grid;
}

struct Instance {
  TermSet ts;
  Interpretation interp;
  EvaluationReport rep;
};

Instance random_instance(std::mt19937& rng) {
  auto ts = sample::random_term_set(rng);
  const int q = 2 + static_cast<int>(rng() % 3);
  auto I = sample::random_interpretation(ts.signature(), q, rng);
  auto rep = preimage_histogram(I, ts);
  return {std::move(ts), std::move(I), std::move(rep)};
}

}  // namespace

// A set of subterms is a term cut exactly when it is a vertex cut of the graph.
TEST(Properties, TermCutsAreVertexCuts) {
  std::mt19937 rng(101);
  for (int n = 0; n < 200; ++n) {
    const auto dag = build_dag(sample::random_term_set(rng));
    const std::size_t m = dag.vertex_count();
    ASSERT_LE(m, 12u);
    std::vector<bool> in(m);
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
      for (std::size_t i = 0; i < m; ++i) in[i] = (mask >> i) & 1u;
      ASSERT_EQ(is_term_cut(dag.index, in, false), is_vertex_cut(dag, in)) << n << " mask " << mask;
    }
  }
}

TEST(Properties, MengerAndBounds) {
  std::mt19937 rng(102);
  for (int n = 0; n < kInstances; ++n) {
    const auto ts = sample::random_term_set(rng);
    const auto dag = build_dag(ts);
    const auto cert = min_cut(dag);
    EXPECT_EQ(static_cast<int>(cert.paths.size()), cert.value);
    EXPECT_EQ(static_cast<int>(cert.cut_vertices.size()), cert.value);
    EXPECT_LE(cert.value, static_cast<int>(ts.variable_count()));
    EXPECT_LE(cert.value, static_cast<int>(ts.term_count()));
    EXPECT_TRUE(verify_certificate(dag, cert).valid);
    EXPECT_EQ(min_cut(diversify(ts)).value, cert.value);
  }
}

TEST(Properties, Conservation) {
  std::mt19937 rng(103);
  for (int n = 0; n < kInstances; ++n) {
    const auto in = random_instance(rng);
    std::uint64_t mass = 0, image = 0;
    for (const auto& [m, c] : in.rep.histogram) {
      mass += m * c;
      image += c;
    }
    EXPECT_EQ(mass, *checked_pow(in.rep.q, in.rep.k));
    EXPECT_EQ(image, in.rep.image_size);
  }
}

TEST(Properties, OneToOneBelowDispersionBelowCut) {
  std::mt19937 rng(104);
  for (int n = 0; n < kInstances; ++n) {
    const auto in = random_instance(rng);
    const int rho = min_cut(in.ts).value;
    const auto g = dispersion(in.rep);
    const auto g1 = one_to_one_dispersion(in.rep);
    if (!g1.is_neg_infinity) EXPECT_LE(g1.log_value, g.log_value + 1e-12);
    EXPECT_LE(g.log_value, rho + 1e-12);
    if (rho < in.rep.k) EXPECT_LE(in.rep.one_image_size, *checked_pow(in.rep.q, rho) - 1);
  }
}

TEST(Properties, RenyiNonIncreasing) {
  std::mt19937 rng(105);
  for (int n = 0; n < kInstances; ++n) {
    const auto in = random_instance(rng);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& a : alpha_grid()) {
      const double h = renyi_entropy(in.rep, a);
      EXPECT_LE(h, prev + 1e-12) << a.to_string();
      prev = h;
    }
  }
}

TEST(Properties, HartleyIsDispersion) {
  std::mt19937 rng(106);
  for (int n = 0; n < kInstances; ++n) {
    const auto in = random_instance(rng);
    EXPECT_NEAR(renyi_entropy(in.rep, Alpha(0)), dispersion(in.rep).log_value, 1e-12);
  }
}

// Scalar linear maps: integer dispersion, flat histogram, and one-to-one
// dispersion either k (then gamma = rho = k) or minus infinity.
TEST(Properties, ScalarLinearIntegrality) {
  std::mt19937 rng(107);
  for (int n = 0; n < kInstances; ++n) {
    const auto ts = sample::random_term_set(rng);
    const int p = std::vector<int>{2, 3, 5}[rng() % 3];
    const auto cls = FunctionClass::scalar_linear(AlgebraSpec::prime_field(p));
    const auto size = detail::class_size(detail::symbol_spaces(ts.signature(), p, cls));
    const auto I = interpretation_at(ts, p, cls, rng() % size);
    const auto rep = preimage_histogram(I, ts);
    const double g = dispersion(rep).log_value;
    EXPECT_NEAR(g, std::round(g), 1e-9);
    ASSERT_EQ(rep.histogram.size(), 1u);
    for (const auto& a : alpha_grid()) EXPECT_NEAR(renyi_entropy(rep, a), g, 1e-9);
    const int rho = min_cut(ts).value;
    const int k = static_cast<int>(ts.variable_count());
    const auto g1 = one_to_one_dispersion(rep);
    if (!g1.is_neg_infinity) {
      EXPECT_NEAR(g1.log_value, k, 1e-9);
      EXPECT_EQ(rho, k);
      EXPECT_NEAR(g, k, 1e-9);
    } else {
      EXPECT_GT(rep.histogram.begin()->first, 1u);
    }
  }
}

TEST(Properties, ComponentAdditivity) {
  std::mt19937 rng(108);
  for (int n = 0; n < kInstances; ++n) {
    const int parts = 2 + static_cast<int>(rng() % 2);
    std::vector<TermSet> sets;
    for (int j = 0; j < parts; ++j) sets.push_back(sample::random_term_set(rng, 8, 3, 3, 2));
    const auto combined = combine_channels(sets);
    const int q = parts == 2 ? 3 : 2;
    const auto I = sample::random_interpretation(combined.signature(), q, rng);
    double sum = 0.0;
    for (const auto& s : sets) {
      // a part may miss symbols the union has; the tables are shared
      sum += dispersion(preimage_histogram(I, s)).log_value;
    }
    EXPECT_NEAR(dispersion(preimage_histogram(I, combined)).log_value, sum, 1e-9);
    int cuts = 0;
    for (const auto& s : sets) cuts += min_cut(s).value;
    EXPECT_EQ(min_cut(combined).value, cuts);
  }
}

// Routing on a diversified set is flat with multiplicity q^(k - rho).
TEST(Properties, RoutingIsFlat) {
  std::mt19937 rng(109);
  for (int n = 0; n < kInstances; ++n) {
    const auto div = diversify(sample::random_term_set(rng));
    const int q = 2 + static_cast<int>(rng() % 2);
    const auto pa = assign_paths(div);
    const auto rep = preimage_histogram(build_routing(div, pa, q), div);
    const int k = static_cast<int>(div.variable_count());
    EXPECT_EQ(rep.histogram, (Histogram{{*checked_pow(q, k - pa.rho()), *checked_pow(q, pa.rho())}}));
  }
}

// One-to-one routing reaches (q-1)^rho one-to-one points only when every
// off-path variable is a term or a direct argument of a path vertex. An
// off-path variable that feeds nothing but off-path vertices is never seen,
// so every output then has q or more pre-images.
TEST(Properties, OneToOneRoutingBound) {
  std::mt19937 rng(110);
  int hidden_cases = 0;
  for (int n = 0; n < kInstances; ++n) {
    const auto div = diversify(sample::random_term_set(rng));
    const int q = 2 + static_cast<int>(rng() % 2);
    const auto dag = build_dag(div);
    const auto pa = assign_paths(dag, min_cut(dag));
    bool visible = true;
    for (std::size_t v = 0; v < dag.vertex_count(); ++v) {
      if (!pa.off_path_variable[v]) continue;
      bool seen = dag.is_target(static_cast<int>(v));
      for (int w : dag.successors[v]) seen = seen || pa.path_of[w] >= 0;
      visible = visible && seen;
    }
    const auto one = preimage_histogram(build_one_to_one_routing(div, pa, q), div);
    if (visible) {
      EXPECT_GE(one.one_image_size, *checked_pow(q - 1, pa.rho())) << to_dsl(div);
    } else {
      ++hidden_cases;
      EXPECT_EQ(one.one_image_size, 0u) << to_dsl(div);
    }
  }
  EXPECT_GT(hidden_cases, 0);
  EXPECT_LT(hidden_cases, kInstances);
}
