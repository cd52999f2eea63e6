#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace copulacov::quadrature {

/// n-point Gauss-Legendre rule mapped to [0, 1], nodes ascending.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(std::size_t n);

struct WeightedPoint {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
};

using Vertex = std::array<double, 2>;

/// Tensor Gauss-Legendre rule collapsed onto the triangle (apex, p1, p2);
/// n^2 points. The apex is never a node.
std::vector<WeightedPoint> triangle_rule(Vertex apex, Vertex p1, Vertex p2, std::size_t n);

/// Unit square cut by both diagonals into four triangles (4 n^2 points).
/// Integrands with kinks along x = y or x + y = 1 are smooth on each piece.
std::vector<WeightedPoint> diagonal_split_square_rule(std::size_t n);

/// Unit square cut along x = y into two triangles (2 n^2 points).
std::vector<WeightedPoint> ordered_split_square_rule(std::size_t n);

/// Neumaier-compensated sum in index order.
double compensated_sum(std::span<const double> values) noexcept;

}  // namespace copulacov::quadrature
