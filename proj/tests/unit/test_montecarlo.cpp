#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "copulacov/empirical.hpp"
#include "copulacov/error.hpp"
#include "copulacov/montecarlo.hpp"
#include "copulacov/rng.hpp"

using namespace copulacov;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.model = CopulaModel::gaussian(0.5);
  c.n = 60;
  c.replications = 40;
  c.functionals = {Functional::T1Blomqvist, Functional::T2Footrule, Functional::T5NonMonotone,
                   Functional::KendallTau};
  c.master_seed = 99;
  return c;
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream out;
  write_estimates_csv(out, r);
  return out.str();
}

}  // namespace

TEST(RunExperiment, IndependentOfWorkerCount) {
  auto config = small_config();
  const auto a = run_experiment(config);
  config.workers = 4;
  const auto b = run_experiment(config);
  config.workers = 0;
  const auto c = run_experiment(config);
  EXPECT_EQ(a.estimates, b.estimates);
  EXPECT_EQ(a.estimates, c.estimates);
  EXPECT_EQ(csv_of(a), csv_of(run_experiment(small_config())));
}

TEST(RunExperiment, ReplicationsUseDerivedSeeds) {
  const auto config = small_config();
  const auto r = run_experiment(config);
  for (std::size_t rep : {0u, 17u, 39u}) {
    const auto sample = config.model.sample(config.n, derive_seed(config.master_seed, rep));
    const auto known = known_margin_empirical(sample);
    const auto rank = empirical_copula(sample);
    for (std::size_t f = 0; f < config.functionals.size(); ++f) {
      EXPECT_EQ(r.estimate(rep, f, EstimatorKind::KnownMargin), evaluate(config.functionals[f], known));
      EXPECT_EQ(r.estimate(rep, f, EstimatorKind::RankBased), evaluate(config.functionals[f], rank));
    }
    // T5 - T2 on ranks is exactly 3/n.
    EXPECT_EQ(evaluate_exact(Functional::T5NonMonotone, rank) - evaluate_exact(Functional::T2Footrule, rank),
              Rational(3, static_cast<std::int64_t>(config.n)));
  }
  for (std::size_t rep = 0; rep < config.replications; ++rep) {
    EXPECT_NEAR(r.estimate(rep, 2, EstimatorKind::RankBased) - r.estimate(rep, 1, EstimatorKind::RankBased),
                3.0 / config.n, 1e-12);
    // Kendall's tau is the same from uniform pairs and from ranks.
    EXPECT_EQ(r.estimate(rep, 3, EstimatorKind::RankBased), r.estimate(rep, 3, EstimatorKind::KnownMargin));
  }
}

TEST(RunExperiment, RankAndKnownShareTheDraw) {
  const auto config = small_config();
  const auto r = run_experiment(config);
  for (std::size_t rep = 0; rep < 5; ++rep) {
    const auto sample = config.model.sample(config.n, derive_seed(config.master_seed, rep));
    const auto from_pseudo = known_margin_empirical(pseudo_observations(sample));
    // The rank path counts exactly; the known-margin path rounds -1 + 4 C.
    EXPECT_DOUBLE_EQ(r.estimate(rep, 0, EstimatorKind::RankBased), evaluate(Functional::T1Blomqvist, from_pseudo));
  }
}

TEST(Summarize, RecomputesFromTheMatrix) {
  const auto r = run_experiment(small_config());
  const std::size_t k = r.config.functionals.size(), reps = r.config.replications;
  ASSERT_EQ(r.summary.size(), 2 * k);
  for (std::size_t f = 0; f < k; ++f) {
    for (int kind = 0; kind < 2; ++kind) {
      const auto ek = kind ? EstimatorKind::RankBased : EstimatorKind::KnownMargin;
      double sum = 0.0;
      for (std::size_t i = 0; i < reps; ++i) sum += r.estimate(i, f, ek);
      const double mean = sum / reps;
      double ss = 0.0;
      for (std::size_t i = 0; i < reps; ++i) ss += (r.estimate(i, f, ek) - mean) * (r.estimate(i, f, ek) - mean);
      const auto& row = r.summary[2 * f + kind];
      EXPECT_EQ(row.functional, r.config.functionals[f]);
      EXPECT_EQ(row.kind, ek);
      EXPECT_EQ(row.mean, mean);
      EXPECT_EQ(row.variance, ss / (reps - 1));
      EXPECT_EQ(row.n_variance, r.config.n * row.variance);
    }
  }
}

TEST(RunExperiment, MeansAreCentredOnTheTruth) {
  // Rank-based footrule carries an O(1/n) bias; n is large relative to reps
  // so that it stays well below one standard error.
  ExperimentConfig c;
  c.model = CopulaModel::fgm(0.5);
  c.n = 5000;
  c.replications = 50;
  c.master_seed = 5;
  c.functionals = {Functional::T1Blomqvist, Functional::T2Footrule, Functional::T3SpearmanRho, Functional::T4Gini};
  const auto r = run_experiment(c);
  for (const auto& row : r.summary) {
    const double se = std::sqrt(row.variance / c.replications);
    EXPECT_LE(std::abs(row.mean - evaluate(row.functional, c.model)), 4 * se)
        << to_string(row.functional) << ' ' << to_string(row.kind);
  }
}

TEST(RunExperiment, ValidatesConfig) {
  auto c = small_config();
  c.replications = 1;
  EXPECT_THROW(run_experiment(c), Error);
  c = small_config();
  c.n = 0;
  EXPECT_THROW(run_experiment(c), Error);
  c = small_config();
  c.functionals = {Functional::T1Blomqvist, Functional::T1Blomqvist};
  EXPECT_THROW(run_experiment(c), Error);
  c.functionals.clear();
  EXPECT_THROW(run_experiment(c), Error);
}

TEST(RunExperiment, ErrorsCarryTheReplicationIndex) {
  // n = 1 makes Kendall's tau undefined in the first replication.
  auto c = small_config();
  c.n = 1;
  try {
    run_experiment(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("replication 0"), std::string::npos) << e.what();
  }
}

TEST(CompareToAsymptotics, RejectsOtherModels) {
  const auto r = run_experiment(small_config());
  try {
    compare_to_asymptotics(r, CopulaModel::gaussian(0.4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ModelMismatch);
  }
}

TEST(CompareToAsymptotics, SkipsKendallAndScoresTheRest) {
  const auto config = small_config();
  const auto r = run_experiment(config);
  const auto rows = compare_to_asymptotics(r, config.model);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& row : rows) {
    EXPECT_NE(row.functional, Functional::KendallTau);
    const double expected = (row.empirical_n_variance - row.asymptotic_variance) /
                            (row.asymptotic_variance * std::sqrt(2.0 / (config.replications - 1)));
    EXPECT_DOUBLE_EQ(row.z_score, expected);
  }
}

TEST(CompareToAsymptotics, IndependenceBlomqvistMatches) {
  ExperimentConfig c;
  c.model = CopulaModel::independence();
  c.n = 500;
  c.replications = 2000;
  c.functionals = {Functional::T1Blomqvist};
  c.master_seed = 1;
  const auto rows = compare_to_asymptotics(run_experiment(c), c.model);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].asymptotic_variance, 3.0);
  EXPECT_EQ(rows[1].asymptotic_variance, 1.0);
  for (const auto& row : rows) {
    EXPECT_LE(std::abs(row.empirical_n_variance - row.asymptotic_variance),
              4 * std::sqrt(2.0 / c.replications) * row.asymptotic_variance);
  }
}

TEST(Export, CsvLayout) {
  const auto r = run_experiment(small_config());
  std::istringstream in(csv_of(r));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# schema_version=1");
  std::vector<std::string> comments;
  while (std::getline(in, line) && line.rfind("# ", 0) == 0) comments.push_back(line);
  EXPECT_EQ(line, "replication,functional,kind,estimate");
  EXPECT_EQ(comments.front(), "# family=gaussian");
  EXPECT_EQ(comments.back(), "# functional=t1,t2,t5,kendall");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string rep, f, kind, value;
    std::getline(fields, rep, ',');
    std::getline(fields, f, ',');
    std::getline(fields, kind, ',');
    std::getline(fields, value, ',');
    const std::size_t fi = rows / 2 % 4;
    EXPECT_EQ(std::stoul(rep), rows / 8);
    EXPECT_EQ(f, to_string(r.config.functionals[fi]));
    const auto ek = parse_estimator_kind(kind);
    EXPECT_EQ(std::stod(value), r.estimate(rows / 8, fi, ek));
    ++rows;
  }
  EXPECT_EQ(rows, 40u * 4u * 2u);
}

TEST(Export, JsonSummary) {
  const auto r = run_experiment(small_config());
  const auto cmp = compare_to_asymptotics(r, r.config.model);
  const auto j = summary_json(r, cmp);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["config"]["n"], "60");
  EXPECT_EQ(j["config"]["seed"], "99");
  EXPECT_EQ(j["summary"].size(), 8u);
  EXPECT_EQ(j["comparison"].size(), 6u);
  EXPECT_EQ(j["summary"][0]["mean"].get<double>(), r.summary[0].mean);
}
