#pragma once

// Replicated simulation comparing T(C_n) (true uniform pairs) with T(Ĉ_n)
// (ranks of the same draw).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "copulacov/copula_model.hpp"
#include "copulacov/functionals.hpp"

namespace copulacov {

inline constexpr int kSchemaVersion = 1;

struct ExperimentConfig {
  CopulaModel model = CopulaModel::independence();
  std::size_t n = 500;
  std::size_t replications = 1000;
  std::vector<Functional> functionals{Functional::T1Blomqvist, Functional::T2Footrule, Functional::T3SpearmanRho,
                                      Functional::T4Gini};
  std::uint64_t master_seed = 0;
  unsigned workers = 1;  ///< 0 = hardware concurrency; never affects results
};

/// Throws Error(DomainError) for n == 0, replications < 2, no functionals,
/// or a functional listed twice.
void validate(const ExperimentConfig& config);

/// Ordered key=value pairs describing the config (family, theta, n, reps,
/// seed, workers, functional).
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config);

struct SummaryRow {
  Functional functional = Functional::T1Blomqvist;
  EstimatorKind kind = EstimatorKind::KnownMargin;
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased, denominator reps - 1
  double n_variance = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  /// Flattened [replication][functional][kind], kind 0 = known, 1 = rank.
  std::vector<double> estimates;
  std::vector<SummaryRow> summary;  ///< functional-major, known before rank

  double estimate(std::size_t replication, std::size_t functional_index, EstimatorKind kind) const;
};

/// Replication r draws from model.sample(n, derive_seed(master_seed, r)).
/// Errors are rethrown with the replication index in the message.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Summary statistics of a per-replication matrix.
std::vector<SummaryRow> summarize(const ExperimentConfig& config, std::span<const double> estimates);

struct AsymptoticComparison {
  Functional functional = Functional::T1Blomqvist;
  EstimatorKind kind = EstimatorKind::KnownMargin;
  double empirical_n_variance = 0.0;
  double asymptotic_variance = 0.0;
  VarianceMethod method = VarianceMethod::Quadrature;
  /// (empirical - asymptotic) / (asymptotic * sqrt(2 / (reps - 1))).
  double z_score = 0.0;
};

/// One row per summary row; Kendall's tau has no asymptotic variance and is
/// skipped. Throws Error(ModelMismatch) if the result came from another model.
std::vector<AsymptoticComparison> compare_to_asymptotics(const ExperimentResult& result, const CopulaModel& model,
                                                         const VarianceOptions& options = {});

/// `replication,functional,kind,estimate` preceded by `# key=value` lines:
/// schema_version, then `comments` (or config_entries when empty).
void write_estimates_csv(std::ostream& out, const ExperimentResult& result,
                         std::span<const std::pair<std::string, std::string>> comments = {});

/// {schema_version, config, summary, comparison}.
nlohmann::json summary_json(const ExperimentResult& result, std::span<const AsymptoticComparison> comparison,
                            std::span<const std::pair<std::string, std::string>> config = {});

/// Decimal with 17 significant digits.
std::string format_number(double value);

}  // namespace copulacov
