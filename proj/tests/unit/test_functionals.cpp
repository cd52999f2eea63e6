#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "copulacov/copula_model.hpp"
#include "copulacov/empirical.hpp"
#include "copulacov/error.hpp"
#include "copulacov/functionals.hpp"
#include "copulacov/process_covariance.hpp"

using namespace copulacov;

namespace {

constexpr Functional kAll[] = {Functional::T1Blomqvist, Functional::T2Footrule,   Functional::T3SpearmanRho,
                               Functional::T4Gini,      Functional::T5NonMonotone, Functional::KendallTau};

PairSample raw_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = z(gen);
    pairs.push_back({a, -0.3 * a + z(gen)});
  }
  return PairSample(std::move(pairs), MarginKind::Raw);
}

// (concordant - discordant) over all pairs, counted one pair at a time.
Rational quadratic_tau(const PairSample& s) {
  std::int64_t score = 0;
  const auto n = static_cast<std::int64_t>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const double p = (s[i].x - s[j].x) * (s[i].y - s[j].y);
      score += p > 0 ? 1 : -1;
    }
  }
  return Rational(score, n * (n - 1) / 2);
}

}  // namespace

TEST(Functional, Names) {
  for (auto f : kAll) EXPECT_EQ(parse_functional(to_string(f)), f);
  EXPECT_EQ(parse_functional("T3"), Functional::T3SpearmanRho);
  EXPECT_THROW(parse_functional("t6"), Error);
  EXPECT_EQ(parse_estimator_kind("rank"), EstimatorKind::RankBased);
}

TEST(EvaluateModel, ClosedFormsForFgm) {
  EXPECT_EQ(evaluate(Functional::T1Blomqvist, CopulaModel::independence()), 0.0);
  EXPECT_DOUBLE_EQ(evaluate(Functional::T3SpearmanRho, CopulaModel::fgm(1.0)), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(evaluate(Functional::T2Footrule, CopulaModel::fgm(0.5)), 0.1);
  EXPECT_DOUBLE_EQ(evaluate(Functional::KendallTau, CopulaModel::fgm(0.9)), 0.2);
}

TEST(EvaluateModel, GaussianOrthantProbabilities) {
  for (double rho : {-0.8, -0.3, 0.25, 0.75}) {
    const auto m = CopulaModel::gaussian(rho);
    const double pi = std::numbers::pi;
    EXPECT_NEAR(evaluate(Functional::T1Blomqvist, m), 2 / pi * std::asin(rho), 1e-14);
    EXPECT_NEAR(evaluate(Functional::T3SpearmanRho, m), 6 / pi * std::asin(rho / 2), 1e-9);
    EXPECT_NEAR(evaluate(Functional::KendallTau, m), 2 / pi * std::asin(rho), 1e-9);
    // ∫C(t,t) = P(X<=Z, Y<=Z) and ∫C(t,1-t) = P(X<=Z, Y<=-Z), trivariate orthants.
    const double foot = -0.5 + 3 / pi * std::asin((1 + rho) / 2);
    EXPECT_NEAR(evaluate(Functional::T2Footrule, m), foot, 1e-9);
    EXPECT_NEAR(evaluate(Functional::T5NonMonotone, m), foot, 1e-9);
    EXPECT_NEAR(evaluate(Functional::T4Gini, m), 2 / pi * (std::asin((1 + rho) / 2) - std::asin((1 - rho) / 2)),
                1e-9);
  }
}

TEST(EvaluateModel, ClaytonKendall) {
  for (double th : {0.5, 2.0, 5.0}) {
    EXPECT_NEAR(evaluate(Functional::KendallTau, CopulaModel::clayton(th)), th / (th + 2), 1e-9);
  }
}

TEST(EvaluateModel, AdaptivePathVanishesAtZeroCorrelation) {
  for (auto f : kAll) EXPECT_NEAR(evaluate(f, CopulaModel::gaussian(0.0)), 0.0, 1e-10);
}

TEST(KendallTau, MergeCountMatchesPairCount) {
  for (std::size_t n : {2, 3, 17, 100, 500}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto s = raw_sample(n, seed * 1000 + n);
      EXPECT_EQ(kendall_tau_exact(s), quadratic_tau(s));
      EXPECT_EQ(kendall_tau(s), quadratic_tau(s).to_double());
    }
  }
}

TEST(KendallTau, Extremes) {
  std::vector<Pair> up;
  for (int i = 0; i < 50; ++i) up.push_back({double(i), double(i * i)});
  EXPECT_EQ(kendall_tau(PairSample(up, MarginKind::Raw)), 1.0);
  EXPECT_EQ(kendall_tau(PairSample({{1, 2}, {2, 1}}, MarginKind::Raw)), -1.0);
  EXPECT_THROW(kendall_tau(PairSample({{1, 2}}, MarginKind::Raw)), Error);
  try {
    kendall_tau(PairSample({{1, 2}, {1, 3}}, MarginKind::Raw));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TiesPresent);
  }
}

TEST(KendallTau, InvariantUnderRankTransform) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = raw_sample(300, seed);
    EXPECT_EQ(kendall_tau_exact(s), kendall_tau_exact(pseudo_observations(s)));
    EXPECT_EQ(kendall_tau(s), evaluate(Functional::KendallTau, empirical_copula(s)));
  }
  const auto u = CopulaModel::clayton(1.0).sample(300, 4);
  EXPECT_EQ(evaluate(Functional::KendallTau, known_margin_empirical(u)),
            evaluate(Functional::KendallTau, empirical_copula(u)));
}

TEST(EvaluateGrid, KnownMarginClosedForms) {
  const auto s = CopulaModel::gaussian(0.4).sample(250, 12);
  const auto f = known_margin_empirical(s);
  double smax = 0, su = 0, sv = 0;
  for (const Pair& p : s.pairs()) {
    smax += std::max(p.x, p.y);
    su += p.x;
    sv += p.y;
  }
  const double n = 250;
  EXPECT_NEAR(evaluate(Functional::T2Footrule, f), 4 - 6 / n * smax, 1e-12);
  EXPECT_NEAR(evaluate(Functional::T5NonMonotone, f), 1 - 6 / n * smax + 3 / n * su + 3 / n * sv, 1e-12);
  std::size_t below = 0;
  for (const Pair& p : s.pairs()) below += p.x <= 0.5 && p.y <= 0.5;
  EXPECT_EQ(evaluate(Functional::T1Blomqvist, f), -1 + 4 * (below / n));
}

TEST(EvaluateGrid, RankGapBetweenT5AndT2IsThreeOverN) {
  for (std::size_t n : {1, 2, 10, 57, 500}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto f = empirical_copula(raw_sample(n, seed));
      const Rational gap = evaluate_exact(Functional::T5NonMonotone, f) - evaluate_exact(Functional::T2Footrule, f);
      EXPECT_EQ(gap, Rational(3, static_cast<std::int64_t>(n)));
      EXPECT_NEAR(evaluate(Functional::T5NonMonotone, f) - evaluate(Functional::T2Footrule, f), 3.0 / n, 1e-12);
    }
  }
}

TEST(EvaluateGrid, CheckerboardT5EqualsT2) {
  for (std::size_t n : {1, 2, 9, 300}) {
    const auto k = checkerboard(empirical_copula(raw_sample(n, n)));
    EXPECT_EQ(evaluate_exact(Functional::T5NonMonotone, k), evaluate_exact(Functional::T2Footrule, k));
    EXPECT_NEAR(evaluate(Functional::T5NonMonotone, k), evaluate(Functional::T2Footrule, k), 1e-12);
    EXPECT_THROW(evaluate(Functional::KendallTau, k), Error);
  }
}

TEST(EvaluateGrid, BlomqvistIsTheCentreValue) {
  for (std::size_t n : {1, 2, 7, 8, 101}) {
    const auto c = empirical_copula(raw_sample(n, 3 * n));
    const auto k = checkerboard(c);
    EXPECT_NEAR(evaluate(Functional::T1Blomqvist, c), -1 + 4 * c(0.5, 0.5), 1e-15);
    EXPECT_NEAR(evaluate(Functional::T1Blomqvist, k), -1 + 4 * k(0.5, 0.5), 1e-14);
  }
}

TEST(EvaluateGrid, SpearmanOnRanksIsTheClassicalFormula) {
  // 12 ∬Ĉ - 3 = 12/n³ Σ(n-R)(n-S) - 3, i.e. rho_S up to O(1/n) terms.
  const std::size_t n = 200;
  const auto s = raw_sample(n, 5);
  const auto f = empirical_copula(s);
  const auto rx = f.ranks_x();
  const auto ry = f.ranks_y();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += double(n - rx[i]) * double(n - ry[i]);
  EXPECT_NEAR(evaluate(Functional::T3SpearmanRho, f), 12.0 * acc / (double(n) * n * n) - 3.0, 1e-13);
}

TEST(EvaluateGrid, PluginConsistencyForFgm) {
  const auto m = CopulaModel::fgm(1.0);
  const std::size_t n = 100000;
  const auto f = empirical_copula(m.sample(n, 2024));
  for (auto fn : {Functional::T1Blomqvist, Functional::T2Footrule, Functional::T3SpearmanRho, Functional::T4Gini}) {
    const double var = asymptotic_variance(fn, m, EstimatorKind::RankBased).variance;
    EXPECT_LE(std::abs(evaluate(fn, f) - evaluate(fn, m)), 4 * std::sqrt(var / n)) << to_string(fn);
  }
}

TEST(AsymptoticVariance, FgmClosedForms) {
  for (double th : {0.0, 0.3, 1.0}) {
    const auto m = CopulaModel::fgm(th);
    const auto v = [&](Functional f, EstimatorKind k) { return asymptotic_variance(f, m, k); };
    EXPECT_EQ(v(Functional::T1Blomqvist, EstimatorKind::RankBased).variance, (1 + th / 4) * (1 - th / 4));
    EXPECT_EQ(v(Functional::T1Blomqvist, EstimatorKind::KnownMargin).variance, (1 + th / 4) * (3 - th / 4));
    EXPECT_NEAR(v(Functional::T2Footrule, EstimatorKind::RankBased).variance,
                2.0 / 5 + 3 * th / 70 - 11 * th * th / 150, 1e-15);
    EXPECT_NEAR(v(Functional::T2Footrule, EstimatorKind::KnownMargin).variance, 2 + 2 * th / 5 - th * th / 25, 1e-15);
    EXPECT_NEAR(v(Functional::T5NonMonotone, EstimatorKind::KnownMargin).variance, 0.5 - th / 10 - th * th / 25,
                1e-15);
    EXPECT_EQ(v(Functional::T2Footrule, EstimatorKind::RankBased).method, VarianceMethod::ClosedFormFGM);
    EXPECT_FALSE(v(Functional::T2Footrule, EstimatorKind::RankBased).error_bound.has_value());
  }
  const auto ind = asymptotic_variance(Functional::T1Blomqvist, CopulaModel::independence(), EstimatorKind::KnownMargin);
  EXPECT_EQ(ind.variance, 3.0);
}

TEST(AsymptoticVariance, QuadratureReproducesClosedForms) {
  VarianceOptions numeric;
  numeric.prefer_closed_form = false;
  for (double th : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const auto m = CopulaModel::fgm(th);
    for (auto f : {Functional::T1Blomqvist, Functional::T2Footrule, Functional::T5NonMonotone}) {
      for (auto k : {EstimatorKind::RankBased, EstimatorKind::KnownMargin}) {
        const auto q = asymptotic_variance(f, m, k, numeric);
        const auto c = asymptotic_variance(f, m, k);
        EXPECT_EQ(q.method, VarianceMethod::Quadrature);
        ASSERT_TRUE(q.error_bound.has_value());
        EXPECT_LT(*q.error_bound, 1e-10);
        EXPECT_NEAR(q.variance, c.variance, 1e-10) << to_string(f) << ' ' << to_string(k) << ' ' << th;
      }
    }
  }
}

TEST(AsymptoticVariance, BlomqvistIsSixteenTimesCentreVariance) {
  VarianceOptions numeric;
  numeric.prefer_closed_form = false;
  const auto m = CopulaModel::clayton(2.0);
  EXPECT_EQ(asymptotic_variance(Functional::T1Blomqvist, m, EstimatorKind::RankBased, numeric).variance,
            16 * cov_process_Chat(m, 0.5, 0.5, 0.5, 0.5).cov_chat);
  EXPECT_EQ(asymptotic_variance(Functional::T1Blomqvist, m, EstimatorKind::KnownMargin, numeric).variance,
            16 * cov_process_C(m, 0.5, 0.5, 0.5, 0.5));
}

TEST(AsymptoticVariance, IndependenceEfficiencyRatios) {
  VarianceOptions numeric;
  numeric.prefer_closed_form = false;
  const auto m = CopulaModel::independence();
  const auto ratio = [&](Functional f) {
    return asymptotic_variance(f, m, EstimatorKind::KnownMargin, numeric).variance /
           asymptotic_variance(f, m, EstimatorKind::RankBased, numeric).variance;
  };
  EXPECT_NEAR(ratio(Functional::T2Footrule), 5.0, 1e-9);
  EXPECT_NEAR(ratio(Functional::T4Gini), 5.0, 1e-9);
  EXPECT_NEAR(ratio(Functional::T3SpearmanRho), 7.0, 1e-9);
  // Spearman's rho at independence: rank-based variance 1.
  EXPECT_NEAR(asymptotic_variance(Functional::T3SpearmanRho, m, EstimatorKind::RankBased).variance, 1.0, 1e-10);
}

TEST(AsymptoticVariance, RankBasedNeverWorseForLtdModels) {
  for (const auto& m : {CopulaModel::fgm(0.5), CopulaModel::clayton(2.0), CopulaModel::gaussian(0.5)}) {
    for (auto f : {Functional::T1Blomqvist, Functional::T2Footrule, Functional::T3SpearmanRho, Functional::T4Gini}) {
      const double rank = asymptotic_variance(f, m, EstimatorKind::RankBased).variance;
      const double known = asymptotic_variance(f, m, EstimatorKind::KnownMargin).variance;
      EXPECT_LE(rank, known) << m.name() << ' ' << to_string(f);
      EXPECT_GE(rank, 0.0);
    }
  }
}

TEST(AsymptoticVariance, NonMonotoneFunctionalCanGoEitherWay) {
  const auto v = [](double th, EstimatorKind k) {
    return asymptotic_variance(Functional::T5NonMonotone, CopulaModel::fgm(th), k).variance;
  };
  EXPECT_LT(v(0.0, EstimatorKind::RankBased), v(0.0, EstimatorKind::KnownMargin));
  EXPECT_GT(v(1.0, EstimatorKind::RankBased), v(1.0, EstimatorKind::KnownMargin));
}

TEST(AsymptoticVariance, KendallIsNotSupported) {
  try {
    asymptotic_variance(Functional::KendallTau, CopulaModel::fgm(0.5), EstimatorKind::RankBased);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainError);
  }
}

TEST(AsymptoticVariance, TooStrictToleranceFails) {
  VarianceOptions strict;
  strict.prefer_closed_form = false;
  strict.max_error_bound = 1e-14;
  strict.nodes_2d = 4;
  try {
    asymptotic_variance(Functional::T2Footrule, CopulaModel::gaussian(0.5), EstimatorKind::KnownMargin, strict);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::QuadratureFailure);
  }
}

TEST(VarianceResult, SerializesToJson) {
  const auto r = asymptotic_variance(Functional::T1Blomqvist, CopulaModel::fgm(0.0), EstimatorKind::RankBased);
  const nlohmann::json j = r;
  EXPECT_EQ(j["functional"], "t1");
  EXPECT_EQ(j["estimator_kind"], "rank");
  EXPECT_EQ(j["variance"].get<double>(), 1.0);
  EXPECT_EQ(j["method"], "closed_form_fgm");
  EXPECT_TRUE(j["error_bound"].is_null());
}
