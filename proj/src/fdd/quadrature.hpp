// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

namespace fdd {

/// Gauss-Legendre rule on (-1, 1); exact for polynomials of degree 2n - 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

/// Rule on the reference triangle {(xi, eta): xi, eta >= 0, xi + eta <= 1}; weights sum to 1/2.
struct TriangleRule {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Symmetric 6-point rule, exact for degree 4. Used for all bilinear forms.
const TriangleRule& triangle_rule_deg4();

/// Collapsed (Duffy) Gauss product rule exact for polynomials of total degree `degree`.
TriangleRule triangle_rule(int degree);

} // namespace fdd
