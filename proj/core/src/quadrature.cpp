#include "copulacov/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "copulacov/error.hpp"

namespace copulacov::quadrature {

GaussRule gauss_legendre(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::DomainError, "Gauss-Legendre rule needs n >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      dp = nd * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x is the i-th largest root on [-1, 1].
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.weights[n - 1 - i] = 0.5 * w;
    rule.weights[i] = 0.5 * w;
  }
  return rule;
}

std::vector<WeightedPoint> triangle_rule(Vertex apex, Vertex p1, Vertex p2, std::size_t n) {
  const GaussRule g = gauss_legendre(n);
  const double e1x = p1[0] - apex[0], e1y = p1[1] - apex[1];
  const double e2x = p2[0] - p1[0], e2y = p2[1] - p1[1];
  const double area2 = std::abs(e1x * e2y - e1y * e2x);
  std::vector<WeightedPoint> out;
  out.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = g.nodes[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double b = g.nodes[j];
      out.push_back({apex[0] + a * (e1x + b * e2x), apex[1] + a * (e1y + b * e2y),
                     g.weights[i] * g.weights[j] * a * area2});
    }
  }
  return out;
}

std::vector<WeightedPoint> diagonal_split_square_rule(std::size_t n) {
  const Vertex c{0.5, 0.5};
  const Vertex corners[4] = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  std::vector<WeightedPoint> out;
  out.reserve(4 * n * n);
  for (int k = 0; k < 4; ++k) {
    const auto piece = triangle_rule(c, corners[k], corners[(k + 1) % 4], n);
    out.insert(out.end(), piece.begin(), piece.end());
  }
  return out;
}

std::vector<WeightedPoint> ordered_split_square_rule(std::size_t n) {
  auto out = triangle_rule({0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, n);
  const auto upper = triangle_rule({0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, n);
  out.insert(out.end(), upper.begin(), upper.end());
  return out;
}

double compensated_sum(std::span<const double> values) noexcept {
  double sum = 0.0;
  double carry = 0.0;
  for (double x : values) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + carry;
}

}  // namespace copulacov::quadrature
