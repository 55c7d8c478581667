#pragma once

#include <array>
#include <vector>

namespace sfem {

/// A quadrature point on a simplex, in barycentric coordinates. Weights are
/// normalised to sum to one, so a rule integrates as measure * sum(w f(x)).
struct SimplexPoint {
  std::array<double, 4> bary{};
  double weight = 0.0;
};

using SimplexRule = std::vector<SimplexPoint>;

struct LinePoint {
  double t = 0.0;  // in [0, 1]
  double weight = 0.0;
};

/// n-point Gauss-Legendre rule on [0, 1] (weights sum to one).
const std::vector<LinePoint>& gauss_legendre(int n);

/// Conical-product (collapsed Gauss-Legendre) rules exact for polynomials of
/// total degree <= `degree`.
const SimplexRule& triangle_rule(int degree);
const SimplexRule& tetrahedron_rule(int degree);

/// Symmetric 3-point rule at (2/3, 1/6, 1/6) and permutations; degree 2.
const SimplexRule& triangle_three_point_rule();

}  // namespace sfem
