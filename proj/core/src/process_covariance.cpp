#include "copulacov/process_covariance.hpp"

#include <algorithm>

#include "copulacov/detail/covariance_terms.hpp"
#include "copulacov/error.hpp"

namespace copulacov {

namespace {

void require_query(double u, double v, double s, double t) {
  for (double x : {u, v, s, t}) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::DomainError, "covariance query outside [0,1]");
  }
}

detail::PointPartials partials_at(const CopulaModel& model, double x, double y) {
  detail::PointPartials p;
  if (detail::border_partials(x, y, 0.0, 1.0, p)) return p;
  try {
    p.d1 = model.partial_u(x, y);
    p.d2 = model.partial_v(x, y);
  } catch (const Error& e) {
    throw Error(ErrorCode::DerivativeUndefined, e.what());
  }
  return p;
}

}  // namespace

double cov_process_C(const CopulaModel& model, double u, double v, double s, double t) {
  require_query(u, v, s, t);
  return model.cdf(std::min(u, s), std::min(v, t)) - model.cdf(u, v) * model.cdf(s, t);
}

CovarianceReport cov_process_Chat(const CopulaModel& model, double u, double v, double s, double t) {
  require_query(u, v, s, t);
  const auto p = partials_at(model, u, v);
  const auto q = partials_at(model, s, t);
  const auto cdf = [&model](double a, double b) { return model.cdf(a, b); };
  const auto e = detail::expand_terms(cdf, u, v, s, t, 1.0, p, q);

  CovarianceReport r;
  r.query = {u, v, s, t};
  r.cov_c = e.cov_c;
  r.a_terms = e.a;
  r.b_terms = e.b;
  if (p.on_border || q.on_border) {
    r.cov_chat = 0.0;
    r.difference = -e.cov_c;
  } else {
    r.difference = detail::term_difference(e);
    r.cov_chat = e.cov_c + r.difference;
  }
  return r;
}

double covariance_difference_independence(double u, double v, double s, double t) noexcept {
  return 2.0 * u * v * s * t - u * s * std::min(v, t) - v * t * std::min(u, s);
}

namespace {

void require_multivariate(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size() || u.size() < 2) {
    throw Error(ErrorCode::DomainError, "multivariate points need equal dimension d >= 2");
  }
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!(u[k] >= 0.0 && u[k] <= 1.0 && v[k] >= 0.0 && v[k] <= 1.0)) {
      throw Error(ErrorCode::DomainError, "multivariate coordinate outside [0,1]");
    }
  }
}

}  // namespace

double multivariate_independence_difference(std::span<const double> u, std::span<const double> v) {
  require_multivariate(u, v);
  double pu = 1.0;
  double pv = 1.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k] == 0.0 || v[k] == 0.0) return 0.0;
    pu *= u[k];
    pv *= v[k];
    sum += (std::min(u[k], v[k]) - u[k] * v[k]) / (u[k] * v[k]);
  }
  return -pu * pv * sum;
}

double multivariate_independence_cov_C(std::span<const double> u, std::span<const double> v) {
  require_multivariate(u, v);
  double pmin = 1.0;
  double pu = 1.0;
  double pv = 1.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    pmin *= std::min(u[k], v[k]);
    pu *= u[k];
    pv *= v[k];
  }
  return pmin - pu * pv;
}

}  // namespace copulacov
