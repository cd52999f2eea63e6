#include "copulacov/functionals.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include "copulacov/detail/parallel.hpp"
#include "copulacov/error.hpp"
#include "copulacov/process_covariance.hpp"
#include "copulacov/quadrature.hpp"

namespace copulacov {

std::string_view to_string(Functional functional) noexcept {
  switch (functional) {
    case Functional::T1Blomqvist: return "t1";
    case Functional::T2Footrule: return "t2";
    case Functional::T3SpearmanRho: return "t3";
    case Functional::T4Gini: return "t4";
    case Functional::T5NonMonotone: return "t5";
    case Functional::KendallTau: return "kendall";
  }
  return "unknown";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

Functional parse_functional(std::string_view name) {
  const std::string key = lower(name);
  if (key == "t1" || key == "blomqvist") return Functional::T1Blomqvist;
  if (key == "t2" || key == "footrule") return Functional::T2Footrule;
  if (key == "t3" || key == "spearman" || key == "rho") return Functional::T3SpearmanRho;
  if (key == "t4" || key == "gini") return Functional::T4Gini;
  if (key == "t5" || key == "nonmonotone") return Functional::T5NonMonotone;
  if (key == "kendall" || key == "tau") return Functional::KendallTau;
  throw Error(ErrorCode::ParseError, "unknown functional '" + std::string(name) + "'");
}

std::string_view to_string(EstimatorKind kind) noexcept {
  return kind == EstimatorKind::KnownMargin ? "known" : "rank";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
  const std::string key = lower(name);
  if (key == "known" || key == "known-margin") return EstimatorKind::KnownMargin;
  if (key == "rank" || key == "rank-based") return EstimatorKind::RankBased;
  throw Error(ErrorCode::ParseError, "unknown estimator kind '" + std::string(name) + "'");
}

std::string_view to_string(VarianceMethod method) noexcept {
  return method == VarianceMethod::ClosedFormFGM ? "closed_form_fgm" : "quadrature";
}

void to_json(nlohmann::json& j, const VarianceResult& r) {
  j = nlohmann::json{{"functional", to_string(r.functional)},
                     {"estimator_kind", to_string(r.estimator_kind)},
                     {"variance", r.variance},
                     {"method", to_string(r.method)},
                     {"error_bound", nullptr}};
  if (r.error_bound) j["error_bound"] = *r.error_bound;
}

// ---------------------------------------------------------------------------
// Kendall's tau

namespace {

// Counts inversions of seq (bottom-up merge sort); seq ends up sorted.
std::uint64_t count_inversions(std::vector<std::uint32_t>& seq) {
  const std::size_t n = seq.size();
  std::vector<std::uint32_t> buf(n);
  std::uint64_t inversions = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (seq[j] < seq[i]) {
          inversions += mid - i;
          buf[k++] = seq[j++];
        } else {
          buf[k++] = seq[i++];
        }
      }
      while (i < mid) buf[k++] = seq[i++];
      while (j < hi) buf[k++] = seq[j++];
    }
    seq.swap(buf);
  }
  return inversions;
}

Rational tau_from_ranks(std::span<const std::uint32_t> rx, std::span<const std::uint32_t> ry) {
  const std::size_t n = rx.size();
  if (n < 2) throw Error(ErrorCode::DomainError, "Kendall's tau needs at least two observations");
  std::vector<std::uint32_t> seq(n);
  for (std::size_t i = 0; i < n; ++i) seq[rx[i] - 1] = ry[i];
  const auto discordant = static_cast<std::int64_t>(count_inversions(seq));
  const auto pairs = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  return Rational(pairs - 2 * discordant, pairs);
}

}  // namespace

Rational kendall_tau_exact(const PairSample& sample) {
  std::vector<double> xs, ys;
  xs.reserve(sample.size());
  ys.reserve(sample.size());
  for (const Pair& p : sample.pairs()) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  if (xs.size() < 2) throw Error(ErrorCode::DomainError, "Kendall's tau needs at least two observations");
  const auto rx = ranks(xs);
  const auto ry = ranks(ys);
  return tau_from_ranks(rx, ry);
}

double kendall_tau(const PairSample& sample) { return kendall_tau_exact(sample).to_double(); }

// ---------------------------------------------------------------------------
// Plug-in values on grid functions

Rational evaluate_exact(Functional functional, const GridFunction& f) {
  if (f.kind() == GridKind::KnownMarginEmpirical) {
    throw Error(ErrorCode::KindMismatch, "exact evaluation needs a rank-based grid function");
  }
  const auto n = static_cast<std::int64_t>(f.n());
  switch (functional) {
    case Functional::T1Blomqvist: {
      const std::size_t h = f.n() / 2;
      if (f.kind() == GridKind::EmpiricalCopula || f.n() % 2 == 0) {
        return Rational(4 * static_cast<std::int64_t>(f.lattice_count(h, h)) - n, n);
      }
      // Checkerboard with odd n: (1/2, 1/2) is the centre of cell (h, h).
      const auto corners = f.lattice_count(h, h) + f.lattice_count(h + 1, h) + f.lattice_count(h, h + 1) +
                           f.lattice_count(h + 1, h + 1);
      return Rational(static_cast<std::int64_t>(corners) - n, n);
    }
    case Functional::T2Footrule:
      return Rational(-2) + Rational(6) * exact_integrate_diag(f);
    case Functional::T3SpearmanRho:
      return Rational(-3) + Rational(12) * exact_integrate_full(f);
    case Functional::T4Gini:
      return Rational(-2) + Rational(4) * (exact_integrate_diag(f) + exact_integrate_antidiag(f));
    case Functional::T5NonMonotone:
      return Rational(1) + Rational(3) * (Rational(2) * exact_integrate_diag(f) - exact_integrate_margin_u(f) -
                                          exact_integrate_margin_v(f));
    case Functional::KendallTau:
      if (f.kind() == GridKind::Checkerboard) {
        throw Error(ErrorCode::KindMismatch, "Kendall's tau is not defined for the checkerboard copula here");
      }
      return tau_from_ranks(f.ranks_x(), f.ranks_y());
  }
  throw Error(ErrorCode::DomainError, "unknown functional");
}

double evaluate(Functional functional, const GridFunction& f) {
  if (f.kind() != GridKind::KnownMarginEmpirical) return evaluate_exact(functional, f).to_double();
  switch (functional) {
    case Functional::T1Blomqvist: return -1.0 + 4.0 * f(0.5, 0.5);
    case Functional::T2Footrule: return -2.0 + 6.0 * integrate_diag(f);
    case Functional::T3SpearmanRho: return -3.0 + 12.0 * integrate_full(f);
    case Functional::T4Gini: return -2.0 + 4.0 * (integrate_diag(f) + integrate_antidiag(f));
    case Functional::T5NonMonotone:
      return 1.0 + 3.0 * (2.0 * integrate_diag(f) - integrate_margin_u(f) - integrate_margin_v(f));
    case Functional::KendallTau: {
      const auto support = f.support();
      return kendall_tau(PairSample(std::vector<Pair>(support.begin(), support.end()), MarginKind::Uniform));
    }
  }
  throw Error(ErrorCode::DomainError, "unknown functional");
}

// ---------------------------------------------------------------------------
// Population values

namespace {

constexpr double kModelTolerance = 1e-10;

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

template <class F>
Integral gk(F&& f, double a = 0.0, double b = 1.0) {
  Integral r;
  double l1 = 0.0;
  r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-13, &r.error, &l1);
  return r;
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) * 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2; }

// Integrals over the unit square are taken in normal scores, u = Phi(x). Copulas
// with Gaussian-like tails turn near-steps at the corners into smooth ridges.
// The bounded integrand loses at most the mass outside [-L, L]^2.
constexpr double kScoreBound = 8.0;

template <class F>
Integral gk2(F&& f) {
  double inner_error = 0.0;
  Integral outer = gk(
      [&](double x) {
        const double u = std_normal_cdf(x);
        const Integral inner = gk([&](double y) { return f(u, std_normal_cdf(y)) * std_normal_pdf(y); }, -kScoreBound,
                                  kScoreBound);
        inner_error = std::max(inner_error, inner.error);
        return inner.value * std_normal_pdf(x);
      },
      -kScoreBound, kScoreBound);
  outer.error += inner_error + 4.0 * std_normal_cdf(-kScoreBound);
  return outer;
}

double checked(const Integral& r, Functional functional) {
  if (!std::isfinite(r.value) || !(r.error <= kModelTolerance)) {
    throw Error(ErrorCode::QuadratureFailure,
                "adaptive quadrature for " + std::string(to_string(functional)) + " missed tolerance 1e-10");
  }
  return r.value;
}

}  // namespace

double evaluate(Functional functional, const CopulaModel& model) {
  if (model.family() == Family::Independence || model.family() == Family::FGM) {
    const double th = model.parameter();
    switch (functional) {
      case Functional::T1Blomqvist: return th / 4.0;
      case Functional::T2Footrule:
      case Functional::T5NonMonotone: return th / 5.0;
      case Functional::T3SpearmanRho: return th / 3.0;
      case Functional::T4Gini: return 4.0 * th / 15.0;
      case Functional::KendallTau: return 2.0 * th / 9.0;
    }
  }
  const auto C = [&](double u, double v) { return model.cdf(u, v); };
  switch (functional) {
    case Functional::T1Blomqvist: return -1.0 + 4.0 * C(0.5, 0.5);
    case Functional::T2Footrule:
    case Functional::T5NonMonotone:
      // The margin terms of T5 integrate to 1/2 each on a copula.
      return -2.0 + 6.0 * checked(gk([&](double t) { return C(t, t); }), functional);
    case Functional::T3SpearmanRho: return -3.0 + 12.0 * checked(gk2(C), functional);
    case Functional::T4Gini:
      return -2.0 + 4.0 * checked(gk([&](double t) { return C(t, t) + C(t, 1.0 - t); }), functional);
    case Functional::KendallTau:
      return 1.0 - 4.0 * checked(gk2([&](double u, double v) { return model.partial_u(u, v) * model.partial_v(u, v); }),
                                 functional);
  }
  throw Error(ErrorCode::DomainError, "unknown functional");
}

// ---------------------------------------------------------------------------
// Asymptotic variances

namespace {

enum class Line { Diagonal, AntiDiagonal, TopEdge, RightEdge };

std::array<double, 2> on_line(Line line, double x) {
  switch (line) {
    case Line::Diagonal: return {x, x};
    case Line::AntiDiagonal: return {x, 1.0 - x};
    case Line::TopEdge: return {x, 1.0};
    case Line::RightEdge: return {1.0, x};
  }
  return {x, x};
}

struct Component {
  Line line;
  double weight;
};

class ProcessCovariance {
 public:
  ProcessCovariance(const CopulaModel& model, EstimatorKind kind) : model_(model), kind_(kind) {}
  double operator()(double u, double v, double s, double t) const {
    if (kind_ == EstimatorKind::KnownMargin) return cov_process_C(model_, u, v, s, t);
    return cov_process_Chat(model_, u, v, s, t).cov_chat;
  }

 private:
  const CopulaModel& model_;
  EstimatorKind kind_;
};

std::size_t resolve_workers(unsigned workers) {
  return workers == 0 ? detail::default_workers() : workers;
}

// Sum of w * integrand(i) over a rule, evaluated in parallel, summed in order.
template <class Term>
double rule_sum(std::size_t count, std::size_t workers, Term&& term) {
  std::vector<double> values(count);
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  detail::parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t hi = std::min(count, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < hi; ++i) values[i] = term(i);
  });
  return quadrature::compensated_sum(values);
}

double line_measure_variance(const ProcessCovariance& cov, std::span<const Component> measure, std::size_t nodes,
                             std::size_t workers) {
  const auto rule = quadrature::diagonal_split_square_rule(nodes);
  double total = 0.0;
  for (std::size_t a = 0; a < measure.size(); ++a) {
    for (std::size_t b = a; b < measure.size(); ++b) {
      const double integral = rule_sum(rule.size(), workers, [&](std::size_t i) {
        const auto p = on_line(measure[a].line, rule[i].x);
        const auto q = on_line(measure[b].line, rule[i].y);
        return rule[i].w * cov(p[0], p[1], q[0], q[1]);
      });
      total += (a == b ? 1.0 : 2.0) * measure[a].weight * measure[b].weight * integral;
    }
  }
  return total;
}

double area_measure_variance(const ProcessCovariance& cov, std::size_t nodes, std::size_t workers) {
  // (u, s) and (v, t) planes are each split along their diagonal, where the
  // minima in the covariance have kinks.
  const auto rule = quadrature::ordered_split_square_rule(nodes);
  const std::size_t m = rule.size();
  const double integral = rule_sum(m * m, workers, [&](std::size_t i) {
    const auto& us = rule[i / m];
    const auto& vt = rule[i % m];
    return us.w * vt.w * cov(us.x, vt.x, us.y, vt.y);
  });
  return 144.0 * integral;
}

double numeric_variance(Functional functional, const ProcessCovariance& cov, std::size_t nodes_2d,
                        std::size_t nodes_4d, std::size_t workers) {
  switch (functional) {
    case Functional::T2Footrule: {
      const Component m[] = {{Line::Diagonal, 6.0}};
      return line_measure_variance(cov, m, nodes_2d, workers);
    }
    case Functional::T3SpearmanRho:
      return area_measure_variance(cov, nodes_4d, workers);
    case Functional::T4Gini: {
      const Component m[] = {{Line::Diagonal, 4.0}, {Line::AntiDiagonal, 4.0}};
      return line_measure_variance(cov, m, nodes_2d, workers);
    }
    case Functional::T5NonMonotone: {
      const Component m[] = {{Line::Diagonal, 6.0}, {Line::TopEdge, -3.0}, {Line::RightEdge, -3.0}};
      return line_measure_variance(cov, m, nodes_2d, workers);
    }
    default: break;
  }
  throw Error(ErrorCode::DomainError, "no numeric variance for " + std::string(to_string(functional)));
}

std::optional<double> fgm_closed_form(Functional functional, double th, EstimatorKind kind) {
  const bool rank = kind == EstimatorKind::RankBased;
  switch (functional) {
    case Functional::T1Blomqvist:
      return rank ? (1.0 + th / 4.0) * (1.0 - th / 4.0) : (1.0 + th / 4.0) * (3.0 - th / 4.0);
    case Functional::T2Footrule:
      return rank ? 2.0 / 5.0 + 3.0 * th / 70.0 - 11.0 * th * th / 150.0 : 2.0 + 2.0 * th / 5.0 - th * th / 25.0;
    case Functional::T5NonMonotone:
      return rank ? 2.0 / 5.0 + 3.0 * th / 70.0 - 11.0 * th * th / 150.0 : 0.5 - th / 10.0 - th * th / 25.0;
    default: return std::nullopt;
  }
}

}  // namespace

VarianceResult asymptotic_variance(Functional functional, const CopulaModel& model, EstimatorKind kind,
                                   const VarianceOptions& options) {
  if (functional == Functional::KendallTau) {
    throw Error(ErrorCode::DomainError, "asymptotic variance of Kendall's tau is not implemented");
  }
  VarianceResult result;
  result.functional = functional;
  result.estimator_kind = kind;

  if (options.prefer_closed_form &&
      (model.family() == Family::FGM || model.family() == Family::Independence)) {
    if (const auto v = fgm_closed_form(functional, model.parameter(), kind)) {
      result.variance = *v;
      result.method = VarianceMethod::ClosedFormFGM;
      return result;
    }
  }

  const ProcessCovariance cov(model, kind);
  result.method = VarianceMethod::Quadrature;
  if (functional == Functional::T1Blomqvist) {
    result.variance = 16.0 * cov(0.5, 0.5, 0.5, 0.5);
    result.error_bound = 0.0;
  } else {
    if (options.nodes_2d == 0 || options.nodes_4d == 0) {
      throw Error(ErrorCode::DomainError, "quadrature node counts must be positive");
    }
    const std::size_t workers = resolve_workers(options.workers);
    const double coarse = numeric_variance(functional, cov, options.nodes_2d, options.nodes_4d, workers);
    const double fine = numeric_variance(functional, cov, 2 * options.nodes_2d, 2 * options.nodes_4d, workers);
    result.variance = fine;
    result.error_bound = std::abs(fine - coarse);
  }
  if (!std::isfinite(result.variance) || !(*result.error_bound <= options.max_error_bound)) {
    throw Error(ErrorCode::QuadratureFailure, "variance quadrature for " + std::string(to_string(functional)) +
                                                  " did not converge (error bound " +
                                                  std::to_string(result.error_bound.value_or(0.0)) + ")");
  }
  // Roundoff can push a zero variance slightly negative.
  result.variance = std::max(result.variance, 0.0);
  return result;
}

}  // namespace copulacov
