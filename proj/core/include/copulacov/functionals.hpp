#pragma once

// Concordance functionals and their plug-in estimators.
//
//   T1 = -1 + 4 C(1/2, 1/2)                       (Blomqvist)
//   T2 = -2 + 6 ∫ C(t,t) dt                        (Spearman's footrule)
//   T3 = -3 + 12 ∬ C                               (Spearman's rho)
//   T4 = -2 + 4 ∫ {C(t,t) + C(t,1-t)} dt           (Gini's gamma)
//   T5 =  1 + 3 ∫ {2 C(t,t) - C(t,1) - C(1,t)} dt  (equals T2 on copulas)
//
// Asymptotic variances integrate the covariance of the limit process against
// the derivative measure of each functional.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "copulacov/copula_model.hpp"
#include "copulacov/empirical.hpp"
#include "copulacov/pair_sample.hpp"
#include "copulacov/rational.hpp"

namespace copulacov {

enum class Functional { T1Blomqvist, T2Footrule, T3SpearmanRho, T4Gini, T5NonMonotone, KendallTau };

std::string_view to_string(Functional functional) noexcept;
/// Accepts "t1".."t5" and "kendall" (case-insensitive), plus the long names.
Functional parse_functional(std::string_view name);

enum class EstimatorKind { KnownMargin, RankBased };
std::string_view to_string(EstimatorKind kind) noexcept;
EstimatorKind parse_estimator_kind(std::string_view name);

enum class VarianceMethod { ClosedFormFGM, Quadrature };
std::string_view to_string(VarianceMethod method) noexcept;

struct VarianceResult {
  Functional functional = Functional::T1Blomqvist;
  EstimatorKind estimator_kind = EstimatorKind::RankBased;
  double variance = 0.0;
  VarianceMethod method = VarianceMethod::Quadrature;
  std::optional<double> error_bound;
};

void to_json(nlohmann::json& j, const VarianceResult& r);

/// T(f) for a step function. Integrals are exact; for the rank-based kinds
/// the value is the correctly rounded evaluate_exact(). Kendall's tau is
/// taken from the support points (Checkerboard throws Error(KindMismatch)).
double evaluate(Functional functional, const GridFunction& f);

/// Exact rational value on the rank-based kinds. Throws Error(KindMismatch)
/// for the known-margin kind and for Kendall on a Checkerboard.
Rational evaluate_exact(Functional functional, const GridFunction& f);

/// T(C) for a model: closed forms for Independence and FGM, adaptive
/// Gauss-Kronrod otherwise. Throws Error(QuadratureFailure) when the
/// estimated error exceeds 1e-10.
double evaluate(Functional functional, const CopulaModel& model);

/// (concordant - discordant) / (n choose 2) by merge-sort inversion counting.
/// Requires n >= 2 and no ties in either coordinate (Error(TiesPresent)).
double kendall_tau(const PairSample& sample);
Rational kendall_tau_exact(const PairSample& sample);

struct VarianceOptions {
  std::size_t nodes_2d = 32;  ///< per axis and per triangle; doubled for the error bound
  std::size_t nodes_4d = 12;
  bool prefer_closed_form = true;
  double max_error_bound = 1e-4;  ///< larger node-doubling differences throw
  unsigned workers = 0;           ///< 0 = hardware concurrency
};

/// Asymptotic variance of sqrt(n)(T(estimate) - T(C)). Closed forms are used
/// for T1, T2 and T5 under FGM and Independence when prefer_closed_form is
/// set; everything else is integrated numerically. Kendall's tau throws
/// Error(DomainError); QuadratureFailure on non-finite or inaccurate results.
VarianceResult asymptotic_variance(Functional functional, const CopulaModel& model, EstimatorKind kind,
                                   const VarianceOptions& options = {});

}  // namespace copulacov
