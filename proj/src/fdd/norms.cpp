// SPDX-License-Identifier: Apache-2.0
#include "fdd/norms.hpp"

#include "fdd/quadrature.hpp"

#include <cmath>

namespace fdd {

double ErrorParts::h1() const { return std::sqrt(l2_sq + h1_semi_sq); }
double ErrorParts::l2() const { return std::sqrt(l2_sq); }

ErrorParts subdomain_error(const FunctionSpace& space, const Vector& coeffs, const ExactScalar& exact,
                           int component) {
  if (coeffs.size() < space.dof_count())
    throw Error("coefficient vector shorter than the space");
  if (component < 0 || component >= space.components())
    throw Error("component out of range");
  const int p = static_cast<int>(space.degree());
  const TriangleRule rule = triangle_rule(2 * p + 2);
  ErrorParts out;
  const auto& mesh = space.mesh();
  for (int t = 0; t < static_cast<int>(mesh.triangle_count()); ++t) {
    const AffineMap map(mesh, t);
    const double det = std::abs(map.det);
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const auto& ref = rule.points[k];
      const Location loc{t, {1.0 - ref[0] - ref[1], ref[0], ref[1]}};
      const Point x = map.map(ref);
      const double e = exact.value(x) - space.evaluate(coeffs, loc, component);
      const auto g = exact.gradient(x);
      const auto gh = space.gradient(coeffs, loc, component);
      const double w = rule.weights[k] * det;
      out.l2_sq += w * e * e;
      out.h1_semi_sq += w * ((g[0] - gh[0]) * (g[0] - gh[0]) + (g[1] - gh[1]) * (g[1] - gh[1]));
    }
  }
  return out;
}

double broken_h1_error(const std::vector<const FunctionSpace*>& spaces,
                       const std::vector<Vector>& fields, const ExactScalar& exact) {
  if (spaces.size() != fields.size())
    throw Error("one field per subdomain space expected");
  double sum = 0.0;
  for (std::size_t i = 0; i < spaces.size(); ++i) {
    const auto parts = subdomain_error(*spaces[i], fields[i], exact);
    sum += parts.l2_sq + parts.h1_semi_sq;
  }
  return std::sqrt(sum);
}

} // namespace fdd
