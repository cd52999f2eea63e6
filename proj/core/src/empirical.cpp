#include "copulacov/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "copulacov/error.hpp"
#include "copulacov/rng.hpp"

namespace copulacov {

std::ostream& operator<<(std::ostream& out, const Rational& r) { return out << r.num() << '/' << r.den(); }

std::string_view to_string(GridKind kind) noexcept {
  switch (kind) {
    case GridKind::KnownMarginEmpirical: return "known-margin-empirical";
    case GridKind::EmpiricalCopula: return "empirical-copula";
    case GridKind::Checkerboard: return "checkerboard";
  }
  return "unknown";
}

namespace {

// Indices sorted by value; ties (if allowed) ordered by `keys`.
std::vector<std::uint32_t> sorted_order(std::span<const double> values, std::span<const std::uint64_t> keys) {
  std::vector<std::uint32_t> order(values.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    if (!keys.empty() && keys[a] != keys[b]) return keys[a] < keys[b];
    return a < b;
  });
  return order;
}

std::vector<double> column(const PairSample& sample, bool x) {
  std::vector<double> out;
  out.reserve(sample.size());
  for (const auto& p : sample) out.push_back(x ? p.x : p.y);
  return out;
}

void require_nonempty(const PairSample& sample) {
  if (sample.empty()) throw Error(ErrorCode::DomainError, "sample must contain at least one pair");
  if (sample.size() >= (std::size_t{1} << 31)) throw Error(ErrorCode::DomainError, "sample too large");
}

void require_rank_kind(const GridFunction& f) {
  if (f.kind() == GridKind::KnownMarginEmpirical) {
    throw Error(ErrorCode::KindMismatch, "exact integrals need a rank-based grid function");
  }
}

double unit_rank(std::uint32_t rank, std::size_t n) { return static_cast<double>(rank) / static_cast<double>(n); }

template <class Term>
Rational rank_sum(const GridFunction& f, std::int64_t den, Term term) {
  std::int64_t total = 0;
  const auto rx = f.ranks_x();
  const auto ry = f.ranks_y();
  for (std::size_t i = 0; i < rx.size(); ++i) total += term(static_cast<std::int64_t>(rx[i]), static_cast<std::int64_t>(ry[i]));
  return Rational(total, den);
}

template <class Term>
double point_mean(const GridFunction& f, Term term) {
  // Neumaier summation.
  double sum = 0.0;
  double carry = 0.0;
  for (const auto& p : f.support()) {
    const double x = term(p.x, p.y);
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return (sum + carry) / static_cast<double>(f.n());
}

}  // namespace

std::vector<std::uint32_t> ranks(std::span<const double> values, TieMode ties, std::uint64_t seed) {
  std::vector<std::uint64_t> keys;
  if (ties == TieMode::RandomBreak) {
    Xoshiro256 rng(seed);
    keys.resize(values.size());
    for (auto& k : keys) k = rng();
  }
  const auto order = sorted_order(values, keys);
  std::vector<std::uint32_t> result(values.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    if (ties == TieMode::Error && pos > 0 && values[order[pos]] == values[order[pos - 1]]) {
      throw Error(ErrorCode::TiesPresent, "tied values at observations " + std::to_string(order[pos - 1]) +
                                              " and " + std::to_string(order[pos]));
    }
    result[order[pos]] = static_cast<std::uint32_t>(pos + 1);
  }
  return result;
}

PairSample pseudo_observations(const PairSample& sample, TieMode ties, std::uint64_t seed) {
  require_nonempty(sample);
  const auto rx = ranks(column(sample, true), ties, seed);
  const auto ry = ranks(column(sample, false), ties, derive_seed(seed, 1));
  const std::size_t n = sample.size();
  std::vector<Pair> pairs(n);
  for (std::size_t i = 0; i < n; ++i) pairs[i] = {unit_rank(rx[i], n), unit_rank(ry[i], n)};
  return PairSample(std::move(pairs), MarginKind::Uniform);
}

void GridFunction::build_counts(std::span<const std::uint32_t> x_order_to_y_rank0) {
  counts_ = detail::WaveletMatrix(x_order_to_y_rank0);
}

GridFunction known_margin_empirical(const PairSample& sample) {
  if (sample.kind() != MarginKind::Uniform) {
    throw Error(ErrorCode::MarginKindMismatch, "known-margin estimator needs uniform-margin pairs");
  }
  require_nonempty(sample);
  GridFunction f;
  f.kind_ = GridKind::KnownMarginEmpirical;
  f.points_.assign(sample.begin(), sample.end());

  const auto xs = column(sample, true);
  const auto ys = column(sample, false);
  const auto x_order = sorted_order(xs, {});
  const auto y_order = sorted_order(ys, {});
  std::vector<std::uint32_t> y_pos(ys.size());
  for (std::size_t p = 0; p < y_order.size(); ++p) y_pos[y_order[p]] = static_cast<std::uint32_t>(p);

  // Tied values occupy contiguous positions, so an upper_bound prefix
  // always contains all or none of a tie group.
  std::vector<std::uint32_t> seq(xs.size());
  f.sorted_x_.resize(xs.size());
  f.sorted_y_.resize(ys.size());
  for (std::size_t p = 0; p < x_order.size(); ++p) {
    seq[p] = y_pos[x_order[p]];
    f.sorted_x_[p] = xs[x_order[p]];
    f.sorted_y_[p] = ys[y_order[p]];
  }
  f.build_counts(seq);
  return f;
}

GridFunction empirical_copula(const PairSample& sample, TieMode ties, std::uint64_t seed) {
  require_nonempty(sample);
  GridFunction f;
  f.kind_ = GridKind::EmpiricalCopula;
  f.rank_x_ = ranks(column(sample, true), ties, seed);
  f.rank_y_ = ranks(column(sample, false), ties, derive_seed(seed, 1));
  const std::size_t n = sample.size();
  f.points_.resize(n);
  f.sorted_x_.resize(n);
  f.sorted_y_.resize(n);
  std::vector<std::uint32_t> seq(n);
  for (std::size_t i = 0; i < n; ++i) {
    f.points_[i] = {unit_rank(f.rank_x_[i], n), unit_rank(f.rank_y_[i], n)};
    f.sorted_x_[i] = unit_rank(static_cast<std::uint32_t>(i + 1), n);
    seq[f.rank_x_[i] - 1] = f.rank_y_[i] - 1;
  }
  f.sorted_y_ = f.sorted_x_;
  f.build_counts(seq);
  return f;
}

GridFunction checkerboard(const GridFunction& empirical) {
  if (empirical.kind() != GridKind::EmpiricalCopula) {
    throw Error(ErrorCode::KindMismatch, "checkerboard needs an empirical copula");
  }
  GridFunction f = empirical;
  f.kind_ = GridKind::Checkerboard;
  return f;
}

std::size_t GridFunction::lattice_count(std::size_t i, std::size_t j) const {
  if (kind_ == GridKind::KnownMarginEmpirical) {
    throw Error(ErrorCode::KindMismatch, "lattice counts need a rank-based grid function");
  }
  return counts_.count_less(std::min(i, n()), std::min(j, n()));
}

double GridFunction::operator()(double u, double v) const {
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::DomainError, "grid function evaluated outside [0,1]^2");
  }
  const double nd = static_cast<double>(n());
  if (kind_ != GridKind::Checkerboard) {
    const auto i = static_cast<std::size_t>(std::upper_bound(sorted_x_.begin(), sorted_x_.end(), u) - sorted_x_.begin());
    const auto j = static_cast<std::size_t>(std::upper_bound(sorted_y_.begin(), sorted_y_.end(), v) - sorted_y_.begin());
    return static_cast<double>(counts_.count_less(i, j)) / nd;
  }
  // Bilinear interpolation of the lattice values; continuous, so the cell
  // chosen on a boundary does not matter.
  const auto cell = [&](double t, std::size_t& k, double& frac) {
    const double scaled = t * nd;
    k = std::min(static_cast<std::size_t>(std::floor(scaled)), n() - 1);
    frac = scaled - static_cast<double>(k);
  };
  std::size_t i = 0, j = 0;
  double a = 0.0, b = 0.0;
  cell(u, i, a);
  cell(v, j, b);
  const double l00 = static_cast<double>(counts_.count_less(i, j));
  const double l10 = static_cast<double>(counts_.count_less(i + 1, j));
  const double l01 = static_cast<double>(counts_.count_less(i, j + 1));
  const double l11 = static_cast<double>(counts_.count_less(i + 1, j + 1));
  return ((1.0 - a) * (1.0 - b) * l00 + a * (1.0 - b) * l10 + (1.0 - a) * b * l01 + a * b * l11) / nd;
}

Rational exact_integrate_diag(const GridFunction& f) {
  require_rank_kind(f);
  const auto n = static_cast<std::int64_t>(f.n());
  if (f.kind() == GridKind::EmpiricalCopula) {
    return rank_sum(f, n * n, [n](std::int64_t r, std::int64_t s) { return n - std::max(r, s); });
  }
  // Each point spreads uniformly over its cell; the diagonal crosses the
  // cell of a point with R == S, otherwise only the later ramp matters.
  return rank_sum(f, 6 * n * n, [n](std::int64_t r, std::int64_t s) {
    return r == s ? 2 * (3 * n - 3 * r + 1) : 3 * (2 * n - 2 * std::max(r, s) + 1);
  });
}

Rational exact_integrate_antidiag(const GridFunction& f) {
  require_rank_kind(f);
  const auto n = static_cast<std::int64_t>(f.n());
  if (f.kind() == GridKind::EmpiricalCopula) {
    return rank_sum(f, n * n, [n](std::int64_t r, std::int64_t s) { return std::max<std::int64_t>(0, n - r - s); });
  }
  return rank_sum(f, 6 * n * n, [n](std::int64_t r, std::int64_t s) -> std::int64_t {
    const std::int64_t gap = n - r - s + 1;
    if (gap < 0) return 0;
    return gap == 0 ? 1 : 6 * gap;
  });
}

Rational exact_integrate_full(const GridFunction& f) {
  require_rank_kind(f);
  const auto n = static_cast<std::int64_t>(f.n());
  if (f.kind() == GridKind::EmpiricalCopula) {
    return rank_sum(f, n * n * n, [n](std::int64_t r, std::int64_t s) { return (n - r) * (n - s); });
  }
  return rank_sum(f, 4 * n * n * n,
                  [n](std::int64_t r, std::int64_t s) { return (2 * n - 2 * r + 1) * (2 * n - 2 * s + 1); });
}

Rational exact_integrate_margin_u(const GridFunction& f) {
  require_rank_kind(f);
  const auto n = static_cast<std::int64_t>(f.n());
  if (f.kind() == GridKind::EmpiricalCopula) {
    return rank_sum(f, n * n, [n](std::int64_t r, std::int64_t) { return n - r; });
  }
  return rank_sum(f, 2 * n * n, [n](std::int64_t r, std::int64_t) { return 2 * n - 2 * r + 1; });
}

Rational exact_integrate_margin_v(const GridFunction& f) {
  require_rank_kind(f);
  const auto n = static_cast<std::int64_t>(f.n());
  if (f.kind() == GridKind::EmpiricalCopula) {
    return rank_sum(f, n * n, [n](std::int64_t, std::int64_t s) { return n - s; });
  }
  return rank_sum(f, 2 * n * n, [n](std::int64_t, std::int64_t s) { return 2 * n - 2 * s + 1; });
}

double integrate_diag(const GridFunction& f) {
  if (f.kind() != GridKind::KnownMarginEmpirical) return exact_integrate_diag(f).to_double();
  return point_mean(f, [](double x, double y) { return 1.0 - std::max(x, y); });
}

double integrate_antidiag(const GridFunction& f) {
  if (f.kind() != GridKind::KnownMarginEmpirical) return exact_integrate_antidiag(f).to_double();
  return point_mean(f, [](double x, double y) { return std::max(0.0, 1.0 - x - y); });
}

double integrate_full(const GridFunction& f) {
  if (f.kind() != GridKind::KnownMarginEmpirical) return exact_integrate_full(f).to_double();
  return point_mean(f, [](double x, double y) { return (1.0 - x) * (1.0 - y); });
}

double integrate_margin_u(const GridFunction& f) {
  if (f.kind() != GridKind::KnownMarginEmpirical) return exact_integrate_margin_u(f).to_double();
  return point_mean(f, [](double x, double) { return 1.0 - x; });
}

double integrate_margin_v(const GridFunction& f) {
  if (f.kind() != GridKind::KnownMarginEmpirical) return exact_integrate_margin_v(f).to_double();
  return point_mean(f, [](double, double y) { return 1.0 - y; });
}

void write_lattice_csv(std::ostream& out, const GridFunction& f, std::size_t resolution,
                       std::span<const std::string> comments) {
  if (resolution == 0) resolution = f.n();
  for (const auto& line : comments) out << "# " << line << '\n';
  const auto precision = out.precision(17);
  out << "u,v,value\n";
  const double res = static_cast<double>(resolution);
  for (std::size_t i = 0; i <= resolution; ++i) {
    const double u = static_cast<double>(i) / res;
    for (std::size_t j = 0; j <= resolution; ++j) {
      const double v = static_cast<double>(j) / res;
      out << u << ',' << v << ',' << f(u, v) << '\n';
    }
  }
  out.precision(precision);
}

}  // namespace copulacov
