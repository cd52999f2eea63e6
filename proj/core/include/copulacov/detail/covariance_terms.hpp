#pragma once

#include <algorithm>
#include <array>

namespace copulacov::detail {

/// Partial derivatives used for one query point. On the border of the unit
/// square the limit process vanishes, and these values only multiply
/// covariances that are identically zero there, so fixed constants replace
/// possibly undefined derivatives.
struct PointPartials {
  double d1 = 0.0;
  double d2 = 0.0;
  bool on_border = false;
};

struct TermExpansion {
  double cov_c = 0.0;
  std::array<double, 4> a{};
  std::array<double, 4> b{};
};

/// Border classification for a point (x, y) given the coordinate `one`
/// representing 1. Returns false (leaving `out` untouched) for interior points.
template <class Coord>
constexpr bool border_partials(Coord x, Coord y, Coord zero, Coord one, PointPartials& out) {
  if (x == zero || y == zero || (x == one && y == one)) {
    out = {0.0, 0.0, true};
    return true;
  }
  if (y == one) {
    out = {1.0, 0.0, true};
    return true;
  }
  if (x == one) {
    out = {0.0, 1.0, true};
    return true;
  }
  return false;
}

/// Expands cov{Ĉ(u,v), Ĉ(s,t)} by bilinearity into the covariance of the
/// known-margin process plus four A terms minus four B terms. `Coord` may be
/// a real coordinate or an index into a sorted lattice; `cdf(a, b)` must
/// return C at those coordinates and `one` must map to 1.
template <class Coord, class Cdf>
TermExpansion expand_terms(const Cdf& cdf, Coord u, Coord v, Coord s, Coord t, Coord one,
                           const PointPartials& p, const PointPartials& q) {
  const auto cov = [&](Coord a, Coord b, Coord c, Coord d) {
    return cdf(std::min(a, c), std::min(b, d)) - cdf(a, b) * cdf(c, d);
  };
  TermExpansion out;
  out.cov_c = cov(u, v, s, t);
  out.b[0] = p.d1 * cov(u, one, s, t);
  out.b[1] = p.d2 * cov(one, v, s, t);
  out.b[2] = q.d1 * cov(u, v, s, one);
  out.b[3] = q.d2 * cov(u, v, one, t);
  out.a[0] = p.d1 * q.d1 * cov(u, one, s, one);
  out.a[1] = p.d1 * q.d2 * cov(u, one, one, t);
  out.a[2] = p.d2 * q.d1 * cov(one, v, s, one);
  out.a[3] = p.d2 * q.d2 * cov(one, v, one, t);
  return out;
}

inline double term_difference(const TermExpansion& e) {
  return (e.a[0] + e.a[1] + e.a[2] + e.a[3]) - (e.b[0] + e.b[1] + e.b[2] + e.b[3]);
}

}  // namespace copulacov::detail
