#pragma once

// Estimators of a copula from data.
//
//   known-margin empirical CDF  C_n(u,v)  = (1/n) #{i : U_i <= u, V_i <= v}
//   empirical copula            Ĉ_n(u,v)  = (1/n) #{i : R_i/n <= u, S_i/n <= v}
//   checkerboard copula         multilinear extension of Ĉ_n on {0,1/n,...,1}^2
//
// Ranks are 1-based and scaled by 1/n. Step functions are right-continuous.
// A single evaluation costs O(log n); integrals are closed-form in the
// support points, exact (as Rational) for the two rank-based kinds.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "copulacov/detail/wavelet_matrix.hpp"
#include "copulacov/pair_sample.hpp"
#include "copulacov/rational.hpp"

namespace copulacov {

enum class GridKind { KnownMarginEmpirical, EmpiricalCopula, Checkerboard };

std::string_view to_string(GridKind kind) noexcept;

/// Tie handling when ranking. RandomBreak orders tied values by a seeded
/// random key (xoshiro256** stream, one key per observation in input
/// order). The pair overloads key x with `seed` and y with
/// derive_seed(seed, 1).
enum class TieMode { Error, RandomBreak };

class GridFunction {
 public:
  GridKind kind() const noexcept { return kind_; }
  std::size_t n() const noexcept { return points_.size(); }

  /// Throws Error(DomainError) unless u, v in [0, 1].
  double operator()(double u, double v) const;

  /// Support points: the uniform pairs (known-margin kind) or (R_i/n, S_i/n).
  std::span<const Pair> support() const noexcept { return points_; }

  /// 1-based ranks of the support points (rank-based kinds only; empty for
  /// the known-margin kind).
  std::span<const std::uint32_t> ranks_x() const noexcept { return rank_x_; }
  std::span<const std::uint32_t> ranks_y() const noexcept { return rank_y_; }

  /// n * Ĉ_n(i/n, j/n) for integer lattice indices (rank-based kinds).
  std::size_t lattice_count(std::size_t i, std::size_t j) const;

 private:
  friend GridFunction known_margin_empirical(const PairSample& sample);
  friend GridFunction empirical_copula(const PairSample& sample, TieMode ties, std::uint64_t seed);
  friend GridFunction checkerboard(const GridFunction& empirical);

  GridFunction() = default;
  void build_counts(std::span<const std::uint32_t> x_order_to_y_rank0);

  GridKind kind_ = GridKind::EmpiricalCopula;
  std::vector<Pair> points_;
  std::vector<std::uint32_t> rank_x_;
  std::vector<std::uint32_t> rank_y_;
  std::vector<double> sorted_x_;
  std::vector<double> sorted_y_;
  detail::WaveletMatrix counts_;
};

/// 1-based ranks of `values`. Throws Error(TiesPresent) on exact ties unless
/// ties == RandomBreak.
std::vector<std::uint32_t> ranks(std::span<const double> values, TieMode ties = TieMode::Error,
                                 std::uint64_t seed = 0);

/// (R_i/n, S_i/n) with margin kind Uniform.
PairSample pseudo_observations(const PairSample& sample, TieMode ties = TieMode::Error, std::uint64_t seed = 0);

/// C_n from true uniform pairs. Throws Error(MarginKindMismatch) for Raw input.
GridFunction known_margin_empirical(const PairSample& sample);

/// Ĉ_n from any sample (only the ranks are used).
GridFunction empirical_copula(const PairSample& sample, TieMode ties = TieMode::Error, std::uint64_t seed = 0);

/// Checkerboard copula of an empirical copula. Throws Error(KindMismatch)
/// for other kinds.
GridFunction checkerboard(const GridFunction& empirical);

// Exact integrals. For the rank-based kinds the double overloads return the
// correctly rounded value of the exact rational.

double integrate_diag(const GridFunction& f);      ///< ∫ f(t,t) dt
double integrate_antidiag(const GridFunction& f);  ///< ∫ f(t,1-t) dt
double integrate_full(const GridFunction& f);      ///< ∬ f(u,v) du dv
double integrate_margin_u(const GridFunction& f);  ///< ∫ f(t,1) dt
double integrate_margin_v(const GridFunction& f);  ///< ∫ f(1,t) dt

/// Rational versions; throw Error(KindMismatch) for the known-margin kind.
Rational exact_integrate_diag(const GridFunction& f);
Rational exact_integrate_antidiag(const GridFunction& f);
Rational exact_integrate_full(const GridFunction& f);
Rational exact_integrate_margin_u(const GridFunction& f);
Rational exact_integrate_margin_v(const GridFunction& f);

/// `u,v,value` rows on the lattice {i/resolution}^2 (resolution 0 means n).
void write_lattice_csv(std::ostream& out, const GridFunction& f, std::size_t resolution = 0,
                       std::span<const std::string> comments = {});

}  // namespace copulacov
