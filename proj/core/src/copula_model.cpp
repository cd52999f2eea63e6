#include "copulacov/copula_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "copulacov/error.hpp"
#include "copulacov/normal.hpp"
#include "copulacov/rng.hpp"

namespace copulacov {

namespace {

void require_unit(double u, double v, const char* what) {
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) {
    std::ostringstream msg;
    msg << what << " arguments must lie in [0,1], got (" << u << ", " << v << ")";
    throw Error(ErrorCode::DomainError, msg.str());
  }
}

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// log(e^b - 1) for b >= 0; -inf at b = 0.
double log_expm1(double b) { return b > 30.0 ? b + std::log1p(-std::exp(-b)) : std::log(std::expm1(b)); }

// Clayton: log(C(u,v)/u) = -log(1 + (v^-theta - 1) u^theta) / theta.
double clayton_log_ratio(double u, double v, double theta) {
  const double a = -theta * std::log(u);
  const double b = -theta * std::log(v);
  return -softplus(log_expm1(b) - a) / theta;
}

double gumbel_barnett_partial(double u, double v, double theta) {
  if (u == 0.0) return 0.0;
  const double lv = std::log(v);
  return v * std::exp(-theta * std::log(u) * lv) * (1.0 - theta * lv);
}

constexpr double kBisectionEps = 1e-15;
constexpr double kBisectionTol = 1e-12;

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::Independence: return "independence";
    case Family::FGM: return "fgm";
    case Family::GumbelBarnett: return "gumbel-barnett";
    case Family::Clayton: return "clayton";
    case Family::Gaussian: return "gaussian";
  }
  return "unknown";
}

Family parse_family(std::string_view raw) {
  std::string name(raw);
  std::ranges::transform(name, name.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (name == "independence" || name == "indep") return Family::Independence;
  if (name == "fgm") return Family::FGM;
  if (name == "gumbel-barnett" || name == "gumbel_barnett" || name == "gb") return Family::GumbelBarnett;
  if (name == "clayton") return Family::Clayton;
  if (name == "gaussian" || name == "normal") return Family::Gaussian;
  throw Error(ErrorCode::ParseError, "unknown copula family '" + std::string(raw) + "'");
}

CopulaModel::CopulaModel(Family family, double parameter) : family_(family), parameter_(parameter) {
  const auto reject = [&](const char* range) {
    std::ostringstream msg;
    msg << to_string(family) << " parameter " << parameter << " outside " << range;
    throw Error(ErrorCode::ParameterOutOfRange, msg.str());
  };
  switch (family) {
    case Family::Independence: parameter_ = 0.0; break;
    case Family::FGM:
      if (!(parameter >= -1.0 && parameter <= 1.0)) reject("[-1, 1]");
      break;
    case Family::GumbelBarnett:
      if (!(parameter > 0.0 && parameter <= 1.0)) reject("(0, 1]");
      break;
    case Family::Clayton:
      if (!(parameter > 0.0 && std::isfinite(parameter))) reject("(0, inf)");
      break;
    case Family::Gaussian:
      if (!(parameter > -1.0 && parameter < 1.0)) reject("(-1, 1)");
      break;
  }
}

std::string CopulaModel::name() const {
  std::ostringstream out;
  out << to_string(family_);
  if (family_ != Family::Independence) {
    out << (family_ == Family::Gaussian ? "(rho=" : "(theta=") << parameter_ << ')';
  }
  return out.str();
}

double CopulaModel::cdf(double u, double v) const {
  require_unit(u, v, "cdf");
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  const double theta = parameter_;
  double c = 0.0;
  switch (family_) {
    case Family::Independence: c = u * v; break;
    case Family::FGM: c = u * v * (1.0 + theta * (1.0 - u) * (1.0 - v)); break;
    case Family::GumbelBarnett: c = u * v * std::exp(-theta * std::log(u) * std::log(v)); break;
    case Family::Clayton: {
      const double lo = std::min(u, v);
      const double hi = std::max(u, v);
      c = lo * std::exp(clayton_log_ratio(lo, hi, theta));
      break;
    }
    case Family::Gaussian:
      c = normal::bivariate_cdf(normal::quantile(u), normal::quantile(v), theta);
      break;
  }
  return std::clamp(c, std::max(u + v - 1.0, 0.0), std::min(u, v));
}

double CopulaModel::partial_u(double u, double v) const {
  require_unit(u, v, "partial_u");
  if (family_ == Family::Gaussian && (u == 0.0 || u == 1.0)) {
    throw Error(ErrorCode::DomainError, "gaussian partial derivative undefined at u in {0,1}");
  }
  if (v == 0.0) return 0.0;
  if (v == 1.0) return 1.0;
  const double theta = parameter_;
  double d = 0.0;
  switch (family_) {
    case Family::Independence: d = v; break;
    case Family::FGM: d = v + theta * v * (1.0 - v) * (1.0 - 2.0 * u); break;
    case Family::GumbelBarnett: d = gumbel_barnett_partial(u, v, theta); break;
    case Family::Clayton: d = std::exp((1.0 + theta) * clayton_log_ratio(u, v, theta)); break;
    case Family::Gaussian:
      d = normal::cdf((normal::quantile(v) - theta * normal::quantile(u)) / std::sqrt(1.0 - theta * theta));
      break;
  }
  return std::clamp(d, 0.0, 1.0);
}

double CopulaModel::conditional_quantile(double u, double w) const {
  if (!(u > 0.0 && u < 1.0 && w > 0.0 && w < 1.0)) {
    throw Error(ErrorCode::DomainError, "conditional_quantile needs u, w in (0,1)");
  }
  const double theta = parameter_;
  switch (family_) {
    case Family::Independence: return w;
    case Family::FGM: {
      // v(1 + a(1-v)) = w with a = theta(1-2u); stable root of the quadratic.
      const double a = theta * (1.0 - 2.0 * u);
      const double b = 1.0 + a;
      return 2.0 * w / (b + std::sqrt(b * b - 4.0 * a * w));
    }
    case Family::Clayton: {
      const double a = -theta * std::log(u);
      const double q = std::expm1(-theta / (1.0 + theta) * std::log(w));
      return std::exp(-softplus(a + std::log(q)) / theta);
    }
    case Family::Gaussian:
      return normal::cdf(theta * normal::quantile(u) + std::sqrt(1.0 - theta * theta) * normal::quantile(w));
    case Family::GumbelBarnett: {
      double lo = kBisectionEps;
      double hi = 1.0 - kBisectionEps;
      if (w <= gumbel_barnett_partial(u, lo, theta)) return lo;
      if (w >= gumbel_barnett_partial(u, hi, theta)) return hi;
      while (hi - lo > kBisectionTol) {
        const double mid = 0.5 * (lo + hi);
        (gumbel_barnett_partial(u, mid, theta) < w ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return w;
}

PairSample CopulaModel::sample(std::size_t n, std::uint64_t seed) const {
  if (n == 0) throw Error(ErrorCode::DomainError, "sample size must be positive");
  Xoshiro256 rng(seed);
  std::vector<Pair> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform_open();
    const double w = rng.uniform_open();
    pairs.push_back({u, conditional_quantile(u, w)});
  }
  return PairSample(std::move(pairs), MarginKind::Uniform);
}

std::string_view to_string(Condition condition) noexcept {
  switch (condition) {
    case Condition::LTD: return "ltd";
    case Condition::PQD: return "pqd";
    case Condition::NQD: return "nqd";
    case Condition::Condition3: return "condition3";
  }
  return "unknown";
}

Condition parse_condition(std::string_view name) {
  if (name == "ltd") return Condition::LTD;
  if (name == "pqd") return Condition::PQD;
  if (name == "nqd") return Condition::NQD;
  if (name == "condition3" || name == "c3") return Condition::Condition3;
  throw Error(ErrorCode::ParseError, "unknown condition '" + std::string(name) + "'");
}

ConditionReport check_condition(const CopulaModel& model, Condition condition,
                                std::size_t grid_resolution, double tolerance) {
  if (grid_resolution < 2) throw Error(ErrorCode::DomainError, "grid resolution must be >= 2");
  ConditionReport report;
  report.condition = condition;
  report.grid_resolution = grid_resolution;
  report.tolerance = tolerance;
  report.worst_violation = -std::numeric_limits<double>::infinity();

  const double step = 1.0 / static_cast<double>(grid_resolution + 1);
  for (std::size_t i = 1; i <= grid_resolution; ++i) {
    const double u = static_cast<double>(i) * step;
    for (std::size_t j = 1; j <= grid_resolution; ++j) {
      const double v = static_cast<double>(j) * step;
      const double c = model.cdf(u, v);
      double violation = 0.0;
      switch (condition) {
        case Condition::LTD:
          violation = std::max(u * model.partial_u(u, v) - c, v * model.partial_v(u, v) - c);
          break;
        case Condition::PQD: violation = u * v - c; break;
        case Condition::NQD: violation = c - u * v; break;
        case Condition::Condition3:
          violation = std::max({u * model.partial_u(u, v) - 2.0 * c, v * model.partial_v(u, v) - 2.0 * c,
                                c - u * v});
          break;
      }
      if (violation > report.worst_violation) {
        report.worst_violation = violation;
        report.witness_u = u;
        report.witness_v = v;
      }
    }
  }
  report.holds = report.worst_violation <= tolerance;
  return report;
}

}  // namespace copulacov
