#include "copulacov/certification.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "copulacov/detail/covariance_terms.hpp"
#include "copulacov/detail/parallel.hpp"
#include "copulacov/error.hpp"
#include "copulacov/process_covariance.hpp"

namespace copulacov {

std::string_view to_string(Proposition p) noexcept {
  switch (p) {
    case Proposition::P1FullCovariance: return "P1";
    case Proposition::P2VarianceOnly: return "P2";
    case Proposition::P4Multivariate: return "P4";
  }
  return "unknown";
}

Proposition parse_proposition(std::string_view text) {
  if (text == "1" || text == "p1" || text == "P1") return Proposition::P1FullCovariance;
  if (text == "2" || text == "p2" || text == "P2") return Proposition::P2VarianceOnly;
  if (text == "4" || text == "p4" || text == "P4") return Proposition::P4Multivariate;
  throw Error(ErrorCode::ParseError, "unknown proposition '" + std::string(text) + "' (expected 1, 2 or 4)");
}

namespace {

constexpr int kGeometricDiagonalSteps = 40;

// Model values on the lattice {k/(m+1) : k = 0..m+1}^2. All coordinates that
// the covariance expansion touches are lattice nodes (or minima of them),
// so scans run on indices with identical results to the pointwise path.
class LatticeTable {
 public:
  LatticeTable(const CopulaModel& model, std::size_t m) : size_(m + 2), one_(m + 1) {
    coords_.resize(size_);
    for (std::size_t k = 0; k < size_; ++k) coords_[k] = static_cast<double>(k) / static_cast<double>(m + 1);
    cdf_.resize(size_ * size_);
    partials_.resize(size_ * size_);
    for (std::size_t a = 0; a < size_; ++a) {
      for (std::size_t b = 0; b < size_; ++b) {
        cdf_[a * size_ + b] = model.cdf(coords_[a], coords_[b]);
        auto& p = partials_[a * size_ + b];
        if (!detail::border_partials(a, b, std::size_t{0}, one_, p)) {
          try {
            p.d1 = model.partial_u(coords_[a], coords_[b]);
            p.d2 = model.partial_v(coords_[a], coords_[b]);
          } catch (const Error& e) {
            throw Error(ErrorCode::DerivativeUndefined, e.what());
          }
        }
      }
    }
  }

  double coord(std::size_t k) const { return coords_[k]; }
  std::size_t one() const { return one_; }

  detail::TermExpansion expand(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    const auto cdf = [this](std::size_t a, std::size_t b) { return cdf_[a * size_ + b]; };
    return detail::expand_terms(cdf, i, j, k, l, one_, partials_[i * size_ + j], partials_[k * size_ + l]);
  }

 private:
  std::size_t size_;
  std::size_t one_;
  std::vector<double> coords_;
  std::vector<double> cdf_;
  std::vector<detail::PointPartials> partials_;
};

// Running maximum with a lexicographically first witness.
struct MaxTracker {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> witness;

  void offer(double diff, std::span<const double> point) {
    if (diff > value) {
      value = diff;
      witness.assign(point.begin(), point.end());
    }
  }
  void merge(const MaxTracker& other) { offer(other.value, other.witness); }
};

// One slab of a scan: its maximum and, when a sink is attached, the rows in
// lattice order (point coordinates followed by cov_c, cov_chat, difference).
struct Slab {
  MaxTracker max;
  std::vector<double> rows;
  std::size_t count = 0;
};

void emit(const Slab& slab, std::size_t width, const ScanSink& sink) {
  const std::size_t stride = width + 3;
  for (std::size_t r = 0; r + stride <= slab.rows.size(); r += stride) {
    const double* row = slab.rows.data() + r;
    sink(ScanRow{std::span<const double>(row, width), row[width], row[width + 1], row[width + 2]});
  }
}

void record(Slab& slab, std::span<const double> point, double cov_c, double cov_chat, double diff, bool keep) {
  slab.max.offer(diff, point);
  ++slab.count;
  if (keep) {
    slab.rows.insert(slab.rows.end(), point.begin(), point.end());
    slab.rows.insert(slab.rows.end(), {cov_c, cov_chat, diff});
  }
}

DominanceCertificate finish(DominanceCertificate cert, std::vector<Slab>& slabs, std::size_t width,
                            const CertifyOptions& options) {
  MaxTracker total;
  for (auto& slab : slabs) {
    total.merge(slab.max);
    cert.points_evaluated += slab.count;
    if (options.sink) emit(slab, width, options.sink);
  }
  cert.max_difference = total.value;
  cert.witness = std::move(total.witness);
  cert.tolerance = options.tolerance;
  cert.certified = cert.max_difference <= options.tolerance;
  return cert;
}

DominanceCertificate scan_full_covariance(const CopulaModel& model, std::size_t m, const CertifyOptions& options,
                                          DominanceCertificate cert) {
  const LatticeTable table(model, m);
  std::vector<Slab> slabs(m);
  const bool keep = static_cast<bool>(options.sink);
  detail::parallel_for(m, options.workers, [&](std::size_t slab_index) {
    Slab& slab = slabs[slab_index];
    const std::size_t i = slab_index + 1;
    std::array<double, 4> point{table.coord(i), 0.0, 0.0, 0.0};
    for (std::size_t j = 1; j <= m; ++j) {
      point[1] = table.coord(j);
      for (std::size_t k = 1; k <= m; ++k) {
        point[2] = table.coord(k);
        for (std::size_t l = 1; l <= m; ++l) {
          point[3] = table.coord(l);
          const auto e = table.expand(i, j, k, l);
          const double diff = detail::term_difference(e);
          record(slab, point, e.cov_c, e.cov_c + diff, diff, keep);
        }
      }
    }
  });
  return finish(std::move(cert), slabs, 4, options);
}

DominanceCertificate scan_variance(const CopulaModel& model, std::size_t m, const CertifyOptions& options,
                                   DominanceCertificate cert) {
  const LatticeTable table(model, m);
  const bool keep = static_cast<bool>(options.sink);
  std::vector<Slab> slabs(m + 1);
  detail::parallel_for(m, options.workers, [&](std::size_t slab_index) {
    Slab& slab = slabs[slab_index];
    const std::size_t i = slab_index + 1;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::array<double, 2> point{table.coord(i), table.coord(j)};
      const auto e = table.expand(i, j, i, j);
      const double diff = detail::term_difference(e);
      record(slab, point, e.cov_c, e.cov_c + diff, diff, keep);
    }
  });
  Slab& geometric = slabs.back();
  for (int k = 1; k <= kGeometricDiagonalSteps; ++k) {
    const double x = std::ldexp(1.0, -k);
    const std::array<double, 2> point{x, x};
    const auto r = cov_process_Chat(model, x, x, x, x);
    record(geometric, point, r.cov_c, r.cov_chat, r.difference, keep);
  }
  cert = finish(std::move(cert), slabs, 2, options);

  // Worst point restricted to u = v, where the counterexamples live.
  double diag_max = -std::numeric_limits<double>::infinity();
  double diag_at = 0.0;
  const auto consider = [&](double x, double diff) {
    if (diff > diag_max) {
      diag_max = diff;
      diag_at = x;
    }
  };
  for (std::size_t i = 1; i <= m; ++i) consider(table.coord(i), detail::term_difference(table.expand(i, i, i, i)));
  for (int k = 1; k <= kGeometricDiagonalSteps; ++k) {
    const double x = std::ldexp(1.0, -k);
    consider(x, cov_process_Chat(model, x, x, x, x).difference);
  }
  cert.diagonal_max_difference = diag_max;
  cert.diagonal_witness = {diag_at, diag_at};
  return cert;
}

DominanceCertificate scan_multivariate(std::size_t m, const CertifyOptions& options, DominanceCertificate cert) {
  const std::size_t d = options.dimension;
  if (d < 2) throw Error(ErrorCode::DomainError, "multivariate certification needs dimension >= 2");
  const std::size_t width = 2 * d;
  std::vector<double> nodes(m);
  for (std::size_t k = 0; k < m; ++k) nodes[k] = static_cast<double>(k) / static_cast<double>(m - 1);

  const bool keep = static_cast<bool>(options.sink);
  std::vector<Slab> slabs(m);
  detail::parallel_for(m, options.workers, [&](std::size_t first) {
    Slab& slab = slabs[first];
    std::vector<std::size_t> idx(width, 0);
    idx[0] = first;
    std::vector<double> point(width);
    while (true) {
      for (std::size_t c = 0; c < width; ++c) point[c] = nodes[idx[c]];
      const std::span<const double> u(point.data(), d);
      const std::span<const double> v(point.data() + d, d);
      const double diff = multivariate_independence_difference(u, v);
      const double cov_c = multivariate_independence_cov_C(u, v);
      record(slab, point, cov_c, cov_c + diff, diff, keep);
      // Odometer over coordinates 1..width-1; coordinate 0 is fixed per slab.
      std::size_t c = width - 1;
      while (c > 0 && ++idx[c] == m) idx[c--] = 0;
      if (c == 0) break;
    }
  });
  return finish(std::move(cert), slabs, width, options);
}

}  // namespace

DominanceCertificate certify_dominance(const CopulaModel& model, Proposition proposition,
                                       std::size_t grid_resolution, const CertifyOptions& options) {
  if (grid_resolution < 2) throw Error(ErrorCode::DomainError, "grid resolution must be >= 2");
  DominanceCertificate cert;
  cert.proposition = proposition;
  cert.grid_resolution = grid_resolution;

  switch (proposition) {
    case Proposition::P1FullCovariance:
    case Proposition::P2VarianceOnly: {
      const Condition premise =
          proposition == Proposition::P1FullCovariance ? Condition::LTD : Condition::Condition3;
      cert.premise = check_condition(model, premise, grid_resolution);
      if (!cert.premise->holds) {
        cert.warning = "premise " + std::string(to_string(premise)) + " fails for " + model.name() +
                       "; the inequality is not guaranteed";
      }
      return proposition == Proposition::P1FullCovariance
                 ? scan_full_covariance(model, grid_resolution, options, std::move(cert))
                 : scan_variance(model, grid_resolution, options, std::move(cert));
    }
    case Proposition::P4Multivariate:
      if (model.family() != Family::Independence) {
        throw Error(ErrorCode::DomainError, "the multivariate inequality is certified at independence only");
      }
      return scan_multivariate(grid_resolution, options, std::move(cert));
  }
  return cert;
}

}  // namespace copulacov
