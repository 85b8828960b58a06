// SPDX-License-Identifier: Apache-2.0
#include "fdd/quadrature.hpp"

#include "fdd/geometry.hpp"

#include <cmath>
#include <numbers>

namespace fdd {

namespace {

// Legendre polynomial P_n(x) and its derivative.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  if (n == 0)
    return {1.0, 0.0};
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

} // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1)
    throw Error("Gauss rule needs at least one node");
  GaussRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (int i = 0; i < n / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    // P_n'(0) from the recurrence P_n'(0) = n P_{n-1}(0).
    const double p_prev = legendre(n - 1, 0.0).first;
    const double dp = n * p_prev;
    rule.weights[n / 2] = 2.0 / (dp * dp);
  }
  return rule;
}

const TriangleRule& triangle_rule_deg4() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    r.degree = 4;
    const double a1 = 0.44594849091596488632, w1 = 0.22338158967801146570;
    const double a2 = 0.09157621350977074346, w2 = 0.10995174365532186764;
    for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
      const double b = 1.0 - 2.0 * a;
      for (auto p : {std::array{a, a}, std::array{b, a}, std::array{a, b}}) {
        r.points.push_back(p);
        r.weights.push_back(0.5 * w);
      }
    }
    return r;
  }();
  return rule;
}

TriangleRule triangle_rule(int degree) {
  if (degree < 0)
    throw Error("quadrature degree must be non-negative");
  const int n = (degree + 3) / 2;
  const GaussRule g = gauss_legendre(n);
  TriangleRule r;
  r.degree = degree;
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (g.nodes[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (g.nodes[j] + 1.0);
      r.points.push_back({u, v * (1.0 - u)});
      r.weights.push_back(0.25 * g.weights[i] * g.weights[j] * (1.0 - u));
    }
  }
  return r;
}

} // namespace fdd
