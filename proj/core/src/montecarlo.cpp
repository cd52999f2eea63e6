#include "copulacov/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "copulacov/detail/parallel.hpp"
#include "copulacov/empirical.hpp"
#include "copulacov/error.hpp"
#include "copulacov/rng.hpp"

namespace copulacov {

std::string format_number(double value) {
  std::ostringstream s;
  s.precision(17);
  s << value;
  return s.str();
}

void validate(const ExperimentConfig& config) {
  if (config.n == 0) throw Error(ErrorCode::DomainError, "sample size must be positive");
  if (config.replications < 2) throw Error(ErrorCode::DomainError, "at least two replications are needed");
  if (config.functionals.empty()) throw Error(ErrorCode::DomainError, "no functionals requested");
  for (std::size_t i = 0; i < config.functionals.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (config.functionals[i] == config.functionals[j]) {
        throw Error(ErrorCode::DomainError, "functional listed twice");
      }
    }
  }
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config) {
  std::string functionals;
  for (const Functional f : config.functionals) {
    if (!functionals.empty()) functionals += ',';
    functionals += to_string(f);
  }
  return {{"family", std::string(to_string(config.model.family()))},
          {"theta", format_number(config.model.parameter())},
          {"n", std::to_string(config.n)},
          {"reps", std::to_string(config.replications)},
          {"seed", std::to_string(config.master_seed)},
          {"workers", std::to_string(config.workers)},
          {"functional", functionals}};
}

double ExperimentResult::estimate(std::size_t replication, std::size_t functional_index, EstimatorKind kind) const {
  const std::size_t k = config.functionals.size();
  return estimates.at((replication * k + functional_index) * 2 + (kind == EstimatorKind::RankBased ? 1 : 0));
}

std::vector<SummaryRow> summarize(const ExperimentConfig& config, std::span<const double> estimates) {
  const std::size_t k = config.functionals.size();
  const std::size_t reps = config.replications;
  if (estimates.size() != reps * k * 2) throw Error(ErrorCode::DomainError, "estimate matrix has the wrong size");
  std::vector<SummaryRow> rows;
  for (std::size_t f = 0; f < k; ++f) {
    for (std::size_t kind = 0; kind < 2; ++kind) {
      const auto at = [&](std::size_t r) { return estimates[(r * k + f) * 2 + kind]; };
      double sum = 0.0;
      for (std::size_t r = 0; r < reps; ++r) sum += at(r);
      const double mean = sum / static_cast<double>(reps);
      double ss = 0.0;
      for (std::size_t r = 0; r < reps; ++r) ss += (at(r) - mean) * (at(r) - mean);
      SummaryRow row;
      row.functional = config.functionals[f];
      row.kind = kind == 0 ? EstimatorKind::KnownMargin : EstimatorKind::RankBased;
      row.mean = mean;
      row.variance = ss / static_cast<double>(reps - 1);
      row.n_variance = static_cast<double>(config.n) * row.variance;
      rows.push_back(row);
    }
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  const std::size_t k = config.functionals.size();
  ExperimentResult result;
  result.config = config;
  result.estimates.assign(config.replications * k * 2, 0.0);
  const std::size_t workers = config.workers == 0 ? detail::default_workers() : config.workers;

  detail::parallel_for(config.replications, workers, [&](std::size_t r) {
    try {
      const PairSample sample = config.model.sample(config.n, derive_seed(config.master_seed, r));
      const GridFunction known = known_margin_empirical(sample);
      const GridFunction rank = empirical_copula(sample);
      double* row = result.estimates.data() + r * k * 2;
      for (std::size_t f = 0; f < k; ++f) {
        row[2 * f] = evaluate(config.functionals[f], known);
        row[2 * f + 1] = evaluate(config.functionals[f], rank);
      }
    } catch (const Error& e) {
      throw Error(e.code(), "replication " + std::to_string(r) + ": " + e.what());
    }
  });
  result.summary = summarize(config, result.estimates);
  return result;
}

std::vector<AsymptoticComparison> compare_to_asymptotics(const ExperimentResult& result, const CopulaModel& model,
                                                         const VarianceOptions& options) {
  if (!(result.config.model == model)) {
    throw Error(ErrorCode::ModelMismatch,
                "result was produced for " + result.config.model.name() + ", not " + model.name());
  }
  const double spread = std::sqrt(2.0 / static_cast<double>(result.config.replications - 1));
  std::vector<AsymptoticComparison> out;
  for (const SummaryRow& row : result.summary) {
    if (row.functional == Functional::KendallTau) continue;
    const VarianceResult v = asymptotic_variance(row.functional, model, row.kind, options);
    AsymptoticComparison c;
    c.functional = row.functional;
    c.kind = row.kind;
    c.empirical_n_variance = row.n_variance;
    c.asymptotic_variance = v.variance;
    c.method = v.method;
    const double diff = row.n_variance - v.variance;
    if (v.variance > 0.0) {
      c.z_score = diff / (v.variance * spread);
    } else {
      c.z_score = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    out.push_back(c);
  }
  return out;
}

void write_estimates_csv(std::ostream& out, const ExperimentResult& result,
                         std::span<const std::pair<std::string, std::string>> comments) {
  out << "# schema_version=" << kSchemaVersion << '\n';
  const auto entries = comments.empty() ? config_entries(result.config)
                                        : std::vector<std::pair<std::string, std::string>>(comments.begin(),
                                                                                           comments.end());
  for (const auto& [key, value] : entries) out << "# " << key << '=' << value << '\n';
  out << "replication,functional,kind,estimate\n";
  const std::size_t k = result.config.functionals.size();
  for (std::size_t r = 0; r < result.config.replications; ++r) {
    for (std::size_t f = 0; f < k; ++f) {
      for (const EstimatorKind kind : {EstimatorKind::KnownMargin, EstimatorKind::RankBased}) {
        out << r << ',' << to_string(result.config.functionals[f]) << ',' << to_string(kind) << ','
            << format_number(result.estimate(r, f, kind)) << '\n';
      }
    }
  }
}

nlohmann::json summary_json(const ExperimentResult& result, std::span<const AsymptoticComparison> comparison,
                            std::span<const std::pair<std::string, std::string>> config) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  nlohmann::json echo = nlohmann::json::object();
  const auto entries = config.empty() ? config_entries(result.config)
                                      : std::vector<std::pair<std::string, std::string>>(config.begin(), config.end());
  for (const auto& [key, value] : entries) echo[key] = value;
  j["config"] = echo;
  nlohmann::json rows = nlohmann::json::array();
  for (const SummaryRow& row : result.summary) {
    rows.push_back({{"functional", to_string(row.functional)},
                    {"kind", to_string(row.kind)},
                    {"mean", row.mean},
                    {"variance", row.variance},
                    {"n_variance", row.n_variance}});
  }
  j["summary"] = rows;
  nlohmann::json cmp = nlohmann::json::array();
  for (const AsymptoticComparison& c : comparison) {
    cmp.push_back({{"functional", to_string(c.functional)},
                   {"kind", to_string(c.kind)},
                   {"empirical_n_variance", c.empirical_n_variance},
                   {"asymptotic_variance", c.asymptotic_variance},
                   {"method", to_string(c.method)},
                   {"z_score", c.z_score}});
  }
  j["comparison"] = cmp;
  return j;
}

}  // namespace copulacov
