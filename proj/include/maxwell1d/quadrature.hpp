#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "maxwell1d/errors.hpp"

namespace maxwell1d {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const noexcept { return nodes.size(); }
};

namespace detail {
// (P_n(x), P_n'(x)) by the three-term recurrence.
inline std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  if (n == 1) p0 = 1.0;
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}
} // namespace detail

/// Gauss-Legendre rule mapped to (0,1), nodes ascending.
inline QuadratureRule gauss_legendre_unit(int n) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [pn, dp] = detail::legendre(n, x);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = detail::legendre(n, x).second;
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// Rule on (0,1) after the substitution u = s^m: clusters nodes at u = 0,
/// where integrands of the form F(u^{-a}) behave like powers of ln u.
inline QuadratureRule graded_unit_rule(int n, int m = 6) {
  QuadratureRule base = gauss_legendre_unit(n);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = base.nodes[i];
    rule.nodes[i] = std::pow(s, m);
    rule.weights[i] = base.weights[i] * m * std::pow(s, m - 1);
  }
  return rule;
}

} // namespace maxwell1d
