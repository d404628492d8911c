#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "termnet/builders.hpp"
#include "termnet/search.hpp"

using namespace termnet;

namespace {

double log_q(double v, int q) { return std::log(v) / std::log(static_cast<double>(q)); }

EvaluationReport eval(const Interpretation& I, const TermSet& ts) { return preimage_histogram(I, ts); }

}  // namespace

TEST(Algebra, Construction) {
  EXPECT_TRUE(AlgebraSpec::prime_field(5).is_field());
  EXPECT_FALSE(AlgebraSpec::modular_ring(6).is_field());
  EXPECT_THROW(AlgebraSpec::prime_field(4), PreconditionError);
  const auto f4 = AlgebraSpec::f4();
  EXPECT_EQ(f4.size(), 4);
  EXPECT_TRUE(f4.is_field());
  for (int a = 1; a < 4; ++a) {
    ASSERT_TRUE(f4.inverse(a).has_value());
    EXPECT_EQ(f4.mul(a, *f4.inverse(a)), 1);
  }
  EXPECT_EQ(AlgebraSpec::vector_space_f2(2).size(), 4);
  EXPECT_EQ(AlgebraSpec::symmetric_group_s3().size(), 6);
}

TEST(Algebra, RejectsBadTables) {
  // not associative: a - b over Z3
  OpTable sub(3, std::vector<int>(3));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) sub[a][b] = ((a - b) % 3 + 3) % 3;
  EXPECT_THROW(AlgebraSpec::group_from_table(sub), PreconditionError);
  // no identity
  EXPECT_THROW(AlgebraSpec::group_from_table({{0, 0}, {0, 0}}), PreconditionError);
  // Z4 is not a field
  const auto z4 = AlgebraSpec::modular_ring(4);
  EXPECT_THROW(AlgebraSpec::field_from_tables(z4.add_table(), z4.mul_table()), PreconditionError);
}

TEST(Algebra, ClassesNeedMatchingStructure) {
  EXPECT_THROW(FunctionClass::scalar_linear(AlgebraSpec::modular_ring(4)), PreconditionError);
  EXPECT_THROW(FunctionClass::group_mult(AlgebraSpec::prime_field(3)), PreconditionError);
  EXPECT_THROW(exhaustive_search(build::case_study(), 3, FunctionClass::ring_linear(AlgebraSpec::modular_ring(4)),
                                 Objective::dispersion()),
               PreconditionError);
}

TEST(Search, CaseStudyBinary) {
  const auto res = exhaustive_search(build::case_study(), 2, FunctionClass::all(), Objective::dispersion());
  EXPECT_EQ(res.class_size, 16u);
  EXPECT_EQ(res.best_count, 10u);
  EXPECT_NEAR(res.best_value, log_q(10, 2), 1e-12);
  EXPECT_EQ(eval(build::product_f2(), build::case_study()).image_size, 10u);
  EXPECT_EQ(eval(res.best_tables, build::case_study()).image_size, 10u);
}

TEST(Search, CaseStudyTernary) {
  const auto res = exhaustive_search(build::case_study(), 3, FunctionClass::all(), Objective::dispersion());
  EXPECT_EQ(res.class_size, 19683u);
  EXPECT_EQ(res.best_count, 51u);
}

// The upper bound on the image, q^4 - 2q^3 + 3q^2 - q, is tight for q = 2, 3.
TEST(Search, ImageBoundIsTightForSmallAlphabets) {
  for (int q : {2, 3}) {
    const auto res = exhaustive_search(build::case_study(), q, FunctionClass::all(), Objective::dispersion());
    EXPECT_EQ(res.best_count, static_cast<std::uint64_t>(q * q * q * q - 2 * q * q * q + 3 * q * q - q));
  }
}

TEST(Search, RingLinear) {
  const auto z2 = AlgebraSpec::modular_ring(2);
  EXPECT_EQ(eval(build::ring_linear_interp(z2, 1, 1), build::case_study()).image_size, 8u);
  for (int n : {2, 3, 4, 5, 6}) {
    const auto res = exhaustive_search(build::case_study(), n, FunctionClass::ring_linear(AlgebraSpec::modular_ring(n)),
                                       Objective::dispersion());
    EXPECT_EQ(res.best_count, static_cast<std::uint64_t>(n * n * n)) << n;
  }
}

TEST(Search, Deterministic) {
  const auto ts = build::case_study();
  SearchOptions one, many;
  many.threads = 4;
  const auto a = exhaustive_search(ts, 2, FunctionClass::all(), Objective::one_to_one(), one);
  const auto b = exhaustive_search(ts, 2, FunctionClass::all(), Objective::one_to_one(), many);
  const auto c = exhaustive_search(ts, 2, FunctionClass::all(), Objective::one_to_one(), one);
  EXPECT_EQ(a.best_index, b.best_index);
  EXPECT_EQ(a.best_index, c.best_index);
  EXPECT_EQ(a.best_count, b.best_count);
  EXPECT_EQ(a.best_tables, b.best_tables);
}

TEST(Search, FirstMaximizerWins) {
  const auto ts = build::case_study();
  const auto res = exhaustive_search(ts, 2, FunctionClass::all(), Objective::dispersion());
  for_each_interpretation(ts, 2, FunctionClass::all(), [&](std::uint64_t idx, const Interpretation& I) {
    if (idx >= res.best_index) return false;
    EXPECT_LT(eval(I, ts).image_size, res.best_count);
    return true;
  });
}

TEST(Search, BudgetAndSampling) {
  SearchOptions tight;
  tight.budget = 1000;
  EXPECT_THROW(exhaustive_search(build::case_study(), 3, FunctionClass::all(), Objective::dispersion(), tight),
               BudgetExceeded);
  SearchOptions sampled;
  sampled.sample = 500;
  sampled.seed = 7;
  const auto a = exhaustive_search(build::case_study(), 3, FunctionClass::all(), Objective::dispersion(), sampled);
  const auto b = exhaustive_search(build::case_study(), 3, FunctionClass::all(), Objective::dispersion(), sampled);
  EXPECT_FALSE(a.exhaustive);
  EXPECT_EQ(a.explored, 500u);
  EXPECT_EQ(a.best_index, b.best_index);
  EXPECT_LE(a.best_count, 51u);
}

TEST(Search, RenyiObjective) {
  const auto res = exhaustive_search(build::case_study(), 2, FunctionClass::all(), Objective::renyi(Alpha(2)));
  EXPECT_NEAR(res.best_value, renyi_entropy(eval(res.best_tables, build::case_study()), Alpha(2)), 1e-12);
  EXPECT_LE(res.best_value, 4.0);
}

TEST(Psi, SmallPrimesAgainstClosedForm) {
  const std::map<int, Histogram> expected{
      {3, {{1, 36}, {2, 12}, {7, 3}}},
      {5, {{1, 240}, {2, 80}, {4, 40}, {13, 5}}},
      {7, {{1, 756}, {2, 504}, {6, 84}, {19, 7}}},
  };
  for (const auto& [p, hist] : expected) {
    const auto rep = eval(build::case_study_interp(p), build::case_study());
    EXPECT_EQ(rep.histogram, hist) << p;
    const auto c = build::psi_p_closed_form(p, Alpha(2));
    EXPECT_EQ(c.image, rep.image_size);
    EXPECT_EQ(c.s1, hist.at(1));
    EXPECT_EQ(c.s2, p == 3 ? 0u : hist.at(2));
    EXPECT_EQ(c.s_pm1, hist.at(p - 1));
    EXPECT_EQ(c.s_3pm2, hist.at(3 * p - 2));
    EXPECT_NEAR(c.gamma, dispersion(rep).log_value, 1e-12);
    EXPECT_NEAR(c.gamma_one, one_to_one_dispersion(rep).log_value, 1e-12);
    for (const auto& a : {Alpha(1, 2), Alpha(1), Alpha(2), Alpha(3), Alpha::infinity()})
      EXPECT_NEAR(build::psi_p_closed_form(p, a).h_alpha, renyi_entropy(rep, a), 1e-12) << p << " " << a.to_string();
  }
}

TEST(Psi, ThreeIsTheOptimum) {
  const auto rep = eval(build::case_study_interp(3), build::case_study());
  EXPECT_EQ(rep.image_size, 51u);
  EXPECT_EQ(rep.one_image_size, 36u);
  EXPECT_NEAR(build::psi_p_closed_form(3, Alpha(1)).gamma_one, log_q(36, 3), 1e-12);
}

TEST(Psi, DegenerateCases) {
  // over Z2 the polynomial is identically zero
  const auto rep = eval(build::case_study_interp(2), build::case_study());
  EXPECT_EQ(rep.histogram, (Histogram{{16, 1}}));
  EXPECT_THROW(build::case_study_interp(1), PreconditionError);
  EXPECT_THROW(build::psi_p_closed_form(9, Alpha(2)), PreconditionError);
}

TEST(Psi, Limits) {
  EXPECT_EQ(build::psi_limit(Alpha::infinity()), 3.0);
  EXPECT_EQ(build::psi_limit(Alpha(1, 2)), 4.0);
  EXPECT_EQ(build::psi_limit(Alpha(2)), 4.0);
  EXPECT_NEAR(build::psi_limit(Alpha(3)), 3.5, 1e-15);
}

TEST(Group, CaseStudyDispersionIsThree) {
  const auto ts = build::case_study();
  EXPECT_EQ(eval(build::group_interp(AlgebraSpec::cyclic_group(3)), ts).image_size, 27u);
  EXPECT_EQ(eval(build::group_interp(AlgebraSpec::cyclic_group(2)), ts).image_size, 8u);
  const auto s3 = eval(build::group_interp(AlgebraSpec::symmetric_group_s3()), ts);
  EXPECT_EQ(s3.image_size, 216u);
  EXPECT_NEAR(dispersion(s3).log_value, 3.0, 1e-12);
  const auto res = exhaustive_search(ts, 6, FunctionClass::group_mult(AlgebraSpec::symmetric_group_s3()),
                                     Objective::dispersion());
  EXPECT_EQ(res.best_count, 216u);
}

// For alpha > k/(k-1) no interpretation of gamma_k beats
// ((2k-1) alpha - k) / (alpha - 1).
TEST(GammaK, RenyiBound) {
  const auto ts = build::gamma_k(2);
  for (const auto& a : {Alpha(3), Alpha(4), Alpha(5, 2)}) {
    const double bound = (3.0 * a.value() - 2.0) / (a.value() - 1.0);
    const auto res = exhaustive_search(ts, 2, FunctionClass::all(), Objective::renyi(a));
    EXPECT_LE(res.best_value, bound + 1e-12) << a.to_string();
  }
  EXPECT_EQ(min_cut(build::gamma_k(3)).value, 9);
}

TEST(GammaPrime, MatrixLinearAtMostTwo) {
  const auto ts = build::gamma_prime(2);
  EXPECT_EQ(min_cut(ts).value, 3);
  const auto res = exhaustive_search(ts, 4, FunctionClass::matrix_linear(AlgebraSpec::vector_space_f2(2)),
                                     Objective::dispersion());
  EXPECT_TRUE(res.exhaustive);
  EXPECT_EQ(res.class_size, 16u * 16 * 16 * 16 * 16 * 16);
  EXPECT_LE(res.best_value, 2.0 + 1e-12);
  EXPECT_NEAR(res.best_value, 2.0, 1e-12);
}

TEST(GammaPrime, RankPathAgreesWithEvaluation) {
  const auto ts = build::gamma_prime(2);
  const auto cls = FunctionClass::matrix_linear(AlgebraSpec::vector_space_f2(2));
  SearchOptions fast, slow;
  fast.sample = slow.sample = 300;
  fast.seed = slow.seed = 5;
  slow.linear_fast_path = false;
  const auto a = exhaustive_search(ts, 4, cls, Objective::dispersion(), fast);
  const auto b = exhaustive_search(ts, 4, cls, Objective::dispersion(), slow);
  EXPECT_EQ(a.best_count, b.best_count);
  EXPECT_EQ(a.best_index, b.best_index);
}

TEST(NonlinearFamily, SolutionsReachK) {
  EXPECT_EQ(build::prop8_min_alphabet(1), 43);
  const auto ts1 = build::prop8_gamma(1);
  const auto r1 = eval(build::prop8_solution(1, 43), ts1);
  EXPECT_EQ(r1.image_size, 43u);
  EXPECT_THROW(build::prop8_solution(1, 42), PreconditionError);

  EXPECT_EQ(build::prop8_min_alphabet(2), 739);
  const auto ts2 = build::prop8_gamma(2);
  const auto r2 = eval(build::prop8_solution(2, 739), ts2);
  EXPECT_EQ(r2.image_size, 739u * 739u);
  EXPECT_NEAR(dispersion(r2).log_value, 2.0, 1e-12);
}

TEST(Example12, FourElementSolution) {
  const auto f4 = AlgebraSpec::f4();
  const auto sol = build::example12_solution(f4);
  const auto rep = eval(sol.interpretation, build::example12());
  EXPECT_EQ(rep.image_size, 16u);
  EXPECT_NEAR(dispersion(rep).log_value, 2.0, 1e-12);
  EXPECT_EQ(min_cut(build::example12()).value, 2);
  EXPECT_NE(f4.add(sol.tau, f4.pow(sol.tau, 2)), 0);
}

TEST(Example12, ScalarLinearFailsInCharacteristicTwo) {
  const auto res = exhaustive_search(build::example12(), 4, FunctionClass::scalar_linear(AlgebraSpec::f4()),
                                     Objective::dispersion());
  EXPECT_EQ(res.class_size, 256u);
  EXPECT_LE(res.best_value, 1.0 + 1e-12);
}

TEST(Example12, NoBinarySolution) {
  const auto res = exhaustive_search(build::example12(), 2, FunctionClass::all(), Objective::dispersion());
  EXPECT_EQ(res.class_size, 256u);
  EXPECT_EQ(res.best_count, 3u);
}

TEST(Linear, FlatHistogramsAndIntegerDispersion) {
  std::mt19937 rng(17);
  const auto ts = build::case_study();
  for (int p : {2, 3, 5}) {
    const auto cls = FunctionClass::scalar_linear(AlgebraSpec::prime_field(p));
    const auto spaces = detail::symbol_spaces(ts.signature(), p, cls);
    const auto total = detail::class_size(spaces);
    for (int trial = 0; trial < 20; ++trial) {
      const auto I = interpretation_at(ts, p, cls, rng() % total);
      const auto rep = eval(I, ts);
      ASSERT_EQ(rep.histogram.size(), 1u);
      const double g = dispersion(rep).log_value;
      EXPECT_NEAR(g, std::round(g), 1e-9);
      // flat, so every entropy equals the dispersion
      for (const auto& a : {Alpha(1, 2), Alpha(1), Alpha::infinity()})
        EXPECT_NEAR(renyi_entropy(rep, a), g, 1e-9);
      // injective exactly when the kernel is trivial
      if (rep.histogram.begin()->first == 1)
        EXPECT_EQ(rep.one_image_size, rep.image_size);
      else
        EXPECT_EQ(rep.one_image_size, 0u);
    }
  }
}

// k = 3 against l = 2: the prop8_gamma family is solved by a nonlinear scheme,
// while matrix linear maps stay at 2. Both sides are sampled.
TEST(LinearGap, SampledSmokeInstance) {
  const int k = 3;
  const auto ts = build::prop8_gamma(k);
  const int q = build::prop8_min_alphabet(k);
  const auto I = build::prop8_solution(k, q);
  std::mt19937_64 rng(41);
  std::map<std::vector<int>, std::vector<int>> seen;
  std::vector<int> in(k);
  for (int n = 0; n < 3000; ++n) {
    for (auto& v : in) v = static_cast<int>(rng() % q);
    const auto out = evaluate(I, ts, in);
    auto [it, fresh] = seen.emplace(out, in);
    EXPECT_TRUE(fresh || it->second == in);
  }

  // the class has 2^80 members, so draw matrices symbol by symbol
  const auto space = AlgebraSpec::vector_space_f2(2);
  std::uint64_t best = 0;
  for (int n = 0; n < 3000; ++n) {
    Interpretation L(4);
    for (const auto& f : ts.signature().functions) {
      const auto mats = detail::matrices_for(rng() % checked_pow(16, f.arity).value(), f.arity, 2);
      L.set(CodingTable::tabulate(f.name, f.arity, 4, [&](std::span<const int> a) {
        int v = 0;
        for (int i = 0; i < f.arity; ++i) v ^= space.apply_matrix(mats[i], a[i]);
        return v;
      }));
    }
    best = std::max(best, eval(L, ts).image_size);
  }
  EXPECT_LE(best, 16u);
  EXPECT_EQ(min_cut(ts).value, k);
}
