#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "copulacov/pair_sample.hpp"

namespace copulacov {

enum class Family { Independence, FGM, GumbelBarnett, Clayton, Gaussian };

std::string_view to_string(Family family) noexcept;
/// Accepts "independence", "fgm", "gumbel-barnett", "clayton", "gaussian".
Family parse_family(std::string_view name);

/// An immutable parametric copula.
///
/// Admissible parameters: FGM theta in [-1, 1], Gumbel-Barnett theta in
/// (0, 1], Clayton theta in (0, inf), Gaussian rho in (-1, 1). Independence
/// ignores its parameter (stored as 0).
///
/// All families here are exchangeable, so partial_v(u, v) == partial_u(v, u).
class CopulaModel {
 public:
  CopulaModel(Family family, double parameter);

  static CopulaModel independence() { return {Family::Independence, 0.0}; }
  static CopulaModel fgm(double theta) { return {Family::FGM, theta}; }
  static CopulaModel gumbel_barnett(double theta) { return {Family::GumbelBarnett, theta}; }
  static CopulaModel clayton(double theta) { return {Family::Clayton, theta}; }
  static CopulaModel gaussian(double rho) { return {Family::Gaussian, rho}; }

  Family family() const noexcept { return family_; }
  double parameter() const noexcept { return parameter_; }
  std::string name() const;

  /// C(u, v). Throws Error(DomainError) unless u, v in [0, 1].
  double cdf(double u, double v) const;

  /// dC/du. Closed forms extend to u in {0, 1} by continuity except for the
  /// Gaussian family, which throws Error(DomainError) there.
  double partial_u(double u, double v) const;
  double partial_v(double u, double v) const { return partial_u(v, u); }

  /// Solves partial_u(u, v) = w for v: the conditional quantile of V given
  /// U = u. Requires u, w in (0, 1).
  double conditional_quantile(double u, double w) const;

  /// n i.i.d. pairs by conditional inversion, with margin kind Uniform.
  /// Reproducible for a fixed seed.
  PairSample sample(std::size_t n, std::uint64_t seed) const;

  friend bool operator==(const CopulaModel&, const CopulaModel&) = default;

 private:
  Family family_;
  double parameter_;
};

enum class Condition {
  LTD,         ///< u*C1 <= C and v*C2 <= C
  PQD,         ///< C >= uv
  NQD,         ///< C <= uv
  Condition3,  ///< u*C1 <= 2C, v*C2 <= 2C and C <= uv
};

std::string_view to_string(Condition condition) noexcept;
/// Accepts "ltd", "pqd", "nqd", "condition3" (also "c3").
Condition parse_condition(std::string_view name);

struct ConditionReport {
  Condition condition = Condition::LTD;
  bool holds = true;
  /// Largest signed violation over the grid; <= tolerance iff `holds`.
  /// Derivative inequalities are measured in multiplied-out form, e.g.
  /// u*C1(u,v) - C(u,v) for the first LTD inequality.
  double worst_violation = 0.0;
  double witness_u = 0.0;
  double witness_v = 0.0;
  std::size_t grid_resolution = 0;
  double tolerance = 0.0;
};

inline constexpr double kConditionTolerance = 1e-9;

/// Scans the interior lattice {i/(m+1) : i = 1..m}^2 and reports the worst
/// violation of the condition's defining inequalities. Requires m >= 2.
ConditionReport check_condition(const CopulaModel& model, Condition condition,
                                std::size_t grid_resolution,
                                double tolerance = kConditionTolerance);

}  // namespace copulacov
