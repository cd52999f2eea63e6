#pragma once

// Grid-scan certificates that the rank-based limit has the smaller
// covariance:
//   P1  cov{Ĉ(u,v), Ĉ(s,t)} <= cov{C(u,v), C(s,t)} for LTD copulas, checked on
//       the interior lattice {i/(m+1) : i = 1..m}^4;
//   P2  var{Ĉ(u,v)} <= var{C(u,v)} under Condition3, checked on the
//       interior lattice {i/(m+1)}^2 plus the geometric diagonal u = v = 2^-k,
//       k = 1..40, where violations for strongly negative dependence appear;
//   P4  the d-variate independence inequality on the closed lattice
//       {k/(m-1) : k = 0..m-1}^(2d).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copulacov/copula_model.hpp"

namespace copulacov {

enum class Proposition { P1FullCovariance, P2VarianceOnly, P4Multivariate };

std::string_view to_string(Proposition p) noexcept;
/// Accepts "1", "2", "4", "p1", "p2", "p4".
Proposition parse_proposition(std::string_view text);

inline constexpr double kCertificationTolerance = 1e-9;

/// One scanned point. `point` is (u,v,s,t) for P1, (u,v) for P2 and
/// (u_1..u_d, v_1..v_d) for P4.
struct ScanRow {
  std::span<const double> point;
  double cov_c = 0.0;
  double cov_chat = 0.0;
  double difference = 0.0;
};

using ScanSink = std::function<void(const ScanRow&)>;

struct CertifyOptions {
  double tolerance = kCertificationTolerance;
  std::size_t workers = 1;
  std::size_t dimension = 2;  ///< P4 only
  /// Called once per scanned point, in lattice order, from the calling thread.
  ScanSink sink;
};

struct DominanceCertificate {
  Proposition proposition = Proposition::P1FullCovariance;
  std::size_t grid_resolution = 0;
  std::size_t points_evaluated = 0;
  double max_difference = 0.0;
  std::vector<double> witness;
  bool certified = false;
  double tolerance = kCertificationTolerance;
  /// Condition behind the proposition (LTD for P1, Condition3 for P2).
  std::optional<ConditionReport> premise;
  /// P2 only: the largest difference with u = v and where it occurs.
  std::optional<double> diagonal_max_difference;
  std::vector<double> diagonal_witness;
  /// Non-empty when the premise check fails; the scan still runs.
  std::string warning;
};

/// P1 and P2 for any model; P4 requires the independence copula and reads
/// the dimension from `options`. Requires grid_resolution >= 2.
DominanceCertificate certify_dominance(const CopulaModel& model, Proposition proposition,
                                       std::size_t grid_resolution, const CertifyOptions& options = {});

}  // namespace copulacov
