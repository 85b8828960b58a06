// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fdd/fem.hpp"

#include <functional>

namespace fdd {

using GradientField = std::function<std::array<double, 2>(Point)>;

struct ExactScalar {
  ScalarField value;
  GradientField gradient;
};

/// Squared L2 and H1-seminorm errors of one component on one subdomain.
struct ErrorParts {
  double l2_sq = 0.0;
  double h1_semi_sq = 0.0;
  double h1() const;
  double l2() const;
};

/// Element-wise quadrature with a rule of degree 2p + 2 for trial degree p.
ErrorParts subdomain_error(const FunctionSpace& space, const Vector& coeffs, const ExactScalar& exact,
                           int component = 0);

/// sqrt(sum_i ||u - u_h||^2_{H1(Omega_i)}).
double broken_h1_error(const std::vector<const FunctionSpace*>& spaces,
                       const std::vector<Vector>& fields, const ExactScalar& exact);

} // namespace fdd
