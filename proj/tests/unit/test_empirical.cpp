#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "copulacov/copula_model.hpp"
#include "copulacov/empirical.hpp"
#include "copulacov/error.hpp"
#include "copulacov/pair_sample.hpp"

using namespace copulacov;

namespace {

PairSample raw_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = z(gen);
    pairs.push_back({std::exp(a), 0.6 * a + 0.8 * z(gen)});
  }
  return PairSample(std::move(pairs), MarginKind::Raw);
}

// O(n) rank by counting, the obvious way.
std::vector<std::size_t> naive_ranks(const std::vector<double>& xs) {
  std::vector<std::size_t> r(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    r[i] = 1;
    for (double x : xs) r[i] += x < xs[i];
  }
  return r;
}

struct Naive {
  std::vector<std::size_t> r, s;
  std::size_t n;
  explicit Naive(const PairSample& sample) : n(sample.size()) {
    std::vector<double> xs, ys;
    for (const Pair& p : sample.pairs()) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
    r = naive_ranks(xs);
    s = naive_ranks(ys);
  }
  double empirical(double u, double v) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += (r[i] <= u * n + 1e-12) && (s[i] <= v * n + 1e-12);
    return static_cast<double>(c) / n;
  }
  // Each observation spreads its mass uniformly over its rank cell.
  double checkerboard(double u, double v) const {
    const auto frac = [&](double x, std::size_t rank) {
      return std::clamp(x * n - static_cast<double>(rank - 1), 0.0, 1.0);
    };
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += frac(u, r[i]) * frac(v, s[i]);
    return sum / n;
  }
};

template <class F>
double midpoint_1d(F&& f, int m) {
  double sum = 0.0;
  for (int i = 0; i < m; ++i) sum += f((i + 0.5) / m);
  return sum / m;
}

}  // namespace

TEST(Ranks, OneBasedAndTieChecked) {
  const std::vector<double> xs{3.0, -1.0, 2.5, 10.0};
  EXPECT_EQ(ranks(xs), (std::vector<std::uint32_t>{3, 1, 2, 4}));
  const std::vector<double> tied{1.0, 2.0, 1.0};
  try {
    ranks(tied);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TiesPresent);
  }
  const auto a = ranks(tied, TieMode::RandomBreak, 11);
  EXPECT_EQ(a, ranks(tied, TieMode::RandomBreak, 11));
  EXPECT_EQ(a[1], 3u);
  EXPECT_EQ(a[0] + a[2], 3u);
}

TEST(PseudoObservations, AreScaledRanks) {
  const auto s = raw_sample(50, 3);
  const auto p = pseudo_observations(s);
  const Naive naive(s);
  EXPECT_EQ(p.kind(), MarginKind::Uniform);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(p[i].x, static_cast<double>(naive.r[i]) / 50.0);
    EXPECT_EQ(p[i].y, static_cast<double>(naive.s[i]) / 50.0);
  }
}

TEST(EmpiricalCopula, MatchesBruteForceCounts) {
  for (std::size_t n : {1, 2, 7, 64, 301}) {
    const auto s = raw_sample(n, n);
    const auto f = empirical_copula(s);
    const Naive naive(s);
    EXPECT_EQ(f.kind(), GridKind::EmpiricalCopula);
    std::mt19937_64 gen(n + 1);
    std::uniform_real_distribution<double> U;
    for (int k = 0; k < 300; ++k) {
      const double u = U(gen), v = U(gen);
      EXPECT_DOUBLE_EQ(f(u, v), naive.empirical(u, v));
    }
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j <= n; j += std::max<std::size_t>(1, n / 13)) {
        const double u = static_cast<double>(i) / n, v = static_cast<double>(j) / n;
        EXPECT_DOUBLE_EQ(f(u, v), naive.empirical(u, v));
        EXPECT_EQ(f.lattice_count(i, j), static_cast<std::size_t>(std::lround(naive.empirical(u, v) * n)));
      }
    }
  }
}

TEST(KnownMarginEmpirical, CountsUniformPairs) {
  const auto s = CopulaModel::clayton(1.0).sample(200, 8);
  const auto f = known_margin_empirical(s);
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> U;
  for (int k = 0; k < 300; ++k) {
    const double u = U(gen), v = U(gen);
    std::size_t c = 0;
    for (const Pair& p : s.pairs()) c += p.x <= u && p.y <= v;
    EXPECT_EQ(f(u, v), static_cast<double>(c) / 200.0);
  }
  EXPECT_EQ(f(1.0, 1.0), 1.0);
  EXPECT_EQ(f(0.0, 0.7), 0.0);
  try {
    known_margin_empirical(raw_sample(5, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MarginKindMismatch);
  }
}

TEST(Checkerboard, IsTheCellSpreadOfTheRanks) {
  for (std::size_t n : {1, 2, 5, 40, 333}) {
    const auto s = raw_sample(n, 100 + n);
    const auto k = checkerboard(empirical_copula(s));
    const Naive naive(s);
    std::mt19937_64 gen(n);
    std::uniform_real_distribution<double> U;
    for (int i = 0; i < 300; ++i) {
      const double u = U(gen), v = U(gen);
      EXPECT_NEAR(k(u, v), naive.checkerboard(u, v), 1e-12);
    }
  }
}

TEST(Checkerboard, HasUniformMargins) {
  for (std::size_t n : {1, 2, 10, 37}) {
    const auto k = checkerboard(empirical_copula(raw_sample(n, 4)));
    for (int i = 0; i <= 200; ++i) {
      const double t = i / 200.0;
      EXPECT_NEAR(k(t, 1.0), t, 1e-14);
      EXPECT_NEAR(k(1.0, t), t, 1e-14);
      EXPECT_EQ(k(t, 0.0), 0.0);
    }
    EXPECT_THROW(checkerboard(k), Error);
  }
}

TEST(Checkerboard, NoCopulaIsWithinOneOverNOfACountermonotonePair) {
  // Chat is 0 just below (1, 1) while every copula exceeds u + v - 1 there.
  const PairSample s({{0.0, 1.0}, {1.0, 0.0}}, MarginKind::Raw);
  const auto c = empirical_copula(s);
  const auto k = checkerboard(c);
  EXPECT_EQ(c(0.995, 0.995), 0.0);
  EXPECT_GE(k(0.995, 0.995), 0.99);
  EXPECT_GT(k(0.995, 0.995) - c(0.995, 0.995), 1.0 / 2.0);
}

TEST(Checkerboard, SharpDistanceToEmpiricalIsBelowTwoOverN) {
  // Inside a cell only the point in its row and the point in its column
  // differ, each by at most 1/n, so the gap approaches 2/n near the upper corner.
  const std::size_t n = 37;
  const auto c = empirical_copula(raw_sample(n, 4));
  const auto k = checkerboard(c);
  double sup = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    for (int j = 0; j <= 1000; ++j) {
      const double u = i / 1000.0, v = j / 1000.0;
      const double d = c(u, v) - k(u, v);
      EXPECT_LE(d, 1e-14);
      sup = std::max(sup, -d);
    }
  }
  EXPECT_LT(sup, 2.0 / n);
  EXPECT_GT(sup, 1.0 / n);
}

TEST(GridFunction, RejectsPointsOutsideSquare) {
  const auto f = empirical_copula(raw_sample(5, 1));
  EXPECT_THROW(f(1.2, 0.5), Error);
  EXPECT_THROW(f(0.5, -0.1), Error);
  EXPECT_THROW(f(std::nan(""), 0.5), Error);
}

TEST(Integrals, RankKindsMatchRiemannSums) {
  const std::size_t n = 23;
  const auto s = raw_sample(n, 9);
  for (const auto& f : {empirical_copula(s), checkerboard(empirical_copula(s))}) {
    const int m = 200000;
    EXPECT_NEAR(integrate_diag(f), midpoint_1d([&](double t) { return f(t, t); }, m), 2e-5);
    EXPECT_NEAR(integrate_antidiag(f), midpoint_1d([&](double t) { return f(t, 1.0 - t); }, m), 2e-5);
    EXPECT_NEAR(integrate_margin_u(f), midpoint_1d([&](double t) { return f(t, 1.0); }, m), 2e-5);
    EXPECT_NEAR(integrate_margin_v(f), midpoint_1d([&](double t) { return f(1.0, t); }, m), 2e-5);
    const int q = 800;
    double full = 0.0;
    for (int i = 0; i < q; ++i) {
      for (int j = 0; j < q; ++j) full += f((i + 0.5) / q, (j + 0.5) / q);
    }
    EXPECT_NEAR(integrate_full(f), full / (q * q), 1e-4);
    EXPECT_EQ(integrate_diag(f), exact_integrate_diag(f).to_double());
    EXPECT_EQ(integrate_full(f), exact_integrate_full(f).to_double());
  }
}

TEST(Integrals, RankClosedFormsByHand) {
  // Ranks (1,2), (2,1): Ĉ(t,t) = 0 for t < 1, so every diagonal integral is 0.
  const PairSample s({{0.1, 0.9}, {0.2, 0.8}}, MarginKind::Raw);
  const auto f = empirical_copula(s);
  EXPECT_EQ(exact_integrate_diag(f), Rational(0));
  // ∫Ĉ(t,1) = Σ(n - R)/n² = (1 + 0)/4.
  EXPECT_EQ(exact_integrate_margin_u(f), Rational(1, 4));
  // Neither point lies on or below the antidiagonal.
  EXPECT_EQ(exact_integrate_antidiag(f), Rational(0));
  // ∬Ĉ = Σ(n-R)(n-S)/n³ = (1·0 + 0·1)/8 = 0.
  EXPECT_EQ(exact_integrate_full(f), Rational(0));
  const auto k = checkerboard(f);
  // Mass 1/2 uniform on each off-diagonal cell: ∬K = E(1-X)(1-Y) = 2 · ½ · ¾ · ¼.
  EXPECT_EQ(exact_integrate_margin_u(k), Rational(1, 2));
  EXPECT_EQ(exact_integrate_full(k), Rational(3, 16));
}

TEST(Integrals, MarginIdentityIsExact) {
  for (std::size_t n : {1, 2, 3, 10, 99}) {
    const auto f = empirical_copula(raw_sample(n, n));
    EXPECT_EQ(exact_integrate_margin_u(f), Rational(static_cast<std::int64_t>(n) - 1, 2 * n));
    EXPECT_EQ(exact_integrate_margin_v(f), Rational(static_cast<std::int64_t>(n) - 1, 2 * n));
    const auto k = checkerboard(f);
    EXPECT_EQ(exact_integrate_margin_u(k), Rational(1, 2));
    EXPECT_EQ(exact_integrate_margin_v(k), Rational(1, 2));
  }
}

TEST(Integrals, KnownMarginClosedForms) {
  const auto s = CopulaModel::gaussian(0.3).sample(400, 2);
  const auto f = known_margin_empirical(s);
  double dmax = 0.0, anti = 0.0, full = 0.0, mu = 0.0;
  for (const Pair& p : s.pairs()) {
    dmax += 1.0 - std::max(p.x, p.y);
    anti += std::max(0.0, 1.0 - p.x - p.y);
    full += (1.0 - p.x) * (1.0 - p.y);
    mu += 1.0 - p.x;
  }
  EXPECT_NEAR(integrate_diag(f), dmax / 400, 1e-13);
  EXPECT_NEAR(integrate_antidiag(f), anti / 400, 1e-13);
  EXPECT_NEAR(integrate_full(f), full / 400, 1e-13);
  EXPECT_NEAR(integrate_margin_u(f), mu / 400, 1e-13);
  EXPECT_NEAR(integrate_diag(f), midpoint_1d([&](double t) { return f(t, t); }, 400000), 1e-5);
  try {
    exact_integrate_diag(f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KindMismatch);
  }
}

TEST(LatticeCsv, WritesHeaderCommentsAndGrid) {
  const auto f = empirical_copula(PairSample({{1.0, 2.0}, {2.0, 1.0}}, MarginKind::Raw));
  std::ostringstream out;
  const std::vector<std::string> comments{"schema_version=1"};
  write_lattice_csv(out, f, 0, comments);
  EXPECT_EQ(out.str(),
            "# schema_version=1\nu,v,value\n"
            "0,0,0\n0,0.5,0\n0,1,0\n"
            "0.5,0,0\n0.5,0.5,0\n0.5,1,0.5\n"
            "1,0,0\n1,0.5,0.5\n1,1,1\n");
}

TEST(PairCsv, RoundTripsExactly) {
  const auto s = CopulaModel::fgm(0.7).sample(50, 1);
  std::stringstream io;
  const std::vector<std::string> comments{"family=fgm"};
  write_csv(io, s, comments);
  const auto back = read_csv(io, MarginKind::Uniform);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(back[i].x, s[i].x);
    EXPECT_EQ(back[i].y, s[i].y);
  }
}

TEST(PairCsv, ReportsBadLines) {
  std::istringstream in("# comment\nx,y\n1,2\n3,oops\n");
  try {
    read_csv(in, MarginKind::Raw);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("4"), std::string::npos) << e.what();
  }
  std::istringstream out_of_range("u,v\n0.5,1.5\n");
  EXPECT_THROW(read_csv(out_of_range, MarginKind::Uniform), Error);
}
