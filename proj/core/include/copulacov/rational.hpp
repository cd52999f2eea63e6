#pragma once

#include <cstdint>
#include <iosfwd>
#include <numeric>

#include "copulacov/error.hpp"

namespace copulacov {

namespace detail {
__extension__ typedef __int128 wide_int;
}  // namespace detail

/// Exact fraction with 64-bit parts, kept in lowest terms with den > 0.
/// Rank statistics are rationals with denominators of order n^3, so exact
/// finite-sample identities can be checked without rounding.
class Rational {
 public:
  constexpr Rational(std::int64_t num = 0, std::int64_t den = 1) : num_(num), den_(den) { normalize(); }

  constexpr std::int64_t num() const noexcept { return num_; }
  constexpr std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend constexpr Rational operator+(const Rational& a, const Rational& b) {
    return from_wide(static_cast<detail::wide_int>(a.num_) * b.den_ + static_cast<detail::wide_int>(b.num_) * a.den_,
                     static_cast<detail::wide_int>(a.den_) * b.den_);
  }
  friend constexpr Rational operator-(const Rational& a, const Rational& b) { return a + Rational(-b.num_, b.den_); }
  friend constexpr Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(static_cast<detail::wide_int>(a.num_) * b.num_, static_cast<detail::wide_int>(a.den_) * b.den_);
  }
  friend constexpr bool operator==(const Rational&, const Rational&) = default;

 private:
  static constexpr detail::wide_int gcd_wide(detail::wide_int a, detail::wide_int b) {
    if (a < 0) a = -a;
    while (b != 0) {
      const detail::wide_int t = a % b;
      a = b;
      b = t < 0 ? -t : t;
    }
    return a;
  }

  static constexpr Rational from_wide(detail::wide_int num, detail::wide_int den) {
    const detail::wide_int g = gcd_wide(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    constexpr detail::wide_int limit = INT64_MAX;
    if (num > limit || num < -limit || den > limit || den < -limit) {
      throw Error(ErrorCode::DomainError, "rational overflow");
    }
    return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
  }

  constexpr void normalize() {
    if (den_ == 0) throw Error(ErrorCode::DomainError, "zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_;
  std::int64_t den_;
};

std::ostream& operator<<(std::ostream& out, const Rational& r);

}  // namespace copulacov
