#pragma once

namespace copulacov::normal {

/// Standard normal density.
double pdf(double x) noexcept;

/// Standard normal CDF, Phi(x).
double cdf(double x) noexcept;

/// Standard normal quantile, Phi^{-1}(p). Returns -inf / +inf at p = 0 / 1.
/// Throws Error(DomainError) for p outside [0, 1].
double quantile(double p);

/// Pr(X <= h, Y <= k) for a standard bivariate normal pair with correlation
/// rho, by Genz's Gauss-Legendre scheme (double-precision accurate).
double bivariate_cdf(double h, double k, double rho) noexcept;

}  // namespace copulacov::normal
