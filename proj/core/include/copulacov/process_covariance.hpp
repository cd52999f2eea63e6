#pragma once

// Covariance functions of the Gaussian limits of the two empirical processes:
//
//   C-process:      cov{C(u,v), C(s,t)} = C(u∧s, v∧t) − C(u,v) C(s,t)
//   Ĉ-process:      Ĉ(u,v) = C(u,v) − Ċ1(u,v) C(u,1) − Ċ2(u,v) C(1,v)
//
// The Ĉ covariance is expanded by bilinearity as cov_C + ΣA − ΣB with
//   A1 = Ċ1(u,v)Ċ1(s,t) cov{C(u,1), C(s,1)}   B1 = Ċ1(u,v) cov{C(u,1), C(s,t)}
//   A2 = Ċ1(u,v)Ċ2(s,t) cov{C(u,1), C(1,t)}   B2 = Ċ2(u,v) cov{C(1,v), C(s,t)}
//   A3 = Ċ2(u,v)Ċ1(s,t) cov{C(1,v), C(s,1)}   B3 = Ċ1(s,t) cov{C(u,v), C(s,1)}
//   A4 = Ċ2(u,v)Ċ2(s,t) cov{C(1,v), C(1,t)}   B4 = Ċ2(s,t) cov{C(u,v), C(1,t)}

#include <array>
#include <span>

#include "copulacov/copula_model.hpp"

namespace copulacov {

struct CovarianceReport {
  std::array<double, 4> query{};  ///< (u, v, s, t)
  double cov_c = 0.0;             ///< covariance of the known-margin limit
  double cov_chat = 0.0;          ///< covariance of the rank-based limit
  std::array<double, 4> a_terms{};
  std::array<double, 4> b_terms{};
  double difference = 0.0;        ///< cov_chat − cov_c
};

/// Throws Error(DomainError) unless all arguments lie in [0, 1].
double cov_process_C(const CopulaModel& model, double u, double v, double s, double t);

/// Arguments in [0, 1]. Points on the border of the unit square contribute
/// an identically zero Ĉ, so cov_chat is exactly 0 there. Throws
/// Error(DerivativeUndefined) if the family's partials fail at an interior
/// query point.
CovarianceReport cov_process_Chat(const CopulaModel& model, double u, double v, double s, double t);

/// Closed form at independence: 2uvst − us(v∧t) − vt(u∧s).
double covariance_difference_independence(double u, double v, double s, double t) noexcept;

/// d-variate independence: cov{Ĉ_d(u), Ĉ_d(v)} − cov{C_d(u), C_d(v)}
///   = −π(u)π(v) Σ_k (u_k∧v_k − u_k v_k)/(u_k v_k),
/// returned as 0 if any coordinate is 0. Requires equal sizes, d >= 2 and
/// coordinates in [0, 1]; throws Error(DomainError) otherwise.
double multivariate_independence_difference(std::span<const double> u, std::span<const double> v);

/// cov{C_d(u), C_d(v)} = π(u∧v) − π(u)π(v) for the d-variate independence copula.
double multivariate_independence_cov_C(std::span<const double> u, std::span<const double> v);

}  // namespace copulacov
