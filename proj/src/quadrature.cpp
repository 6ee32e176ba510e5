#include "hgbm/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hgbm {

namespace {

// Legendre P_n(x) and P_{n-1}(x) by the three-term recurrence.
void legendre(int n, double x, double& pn, double& pn1) {
  double p0 = 1.0;
  double p1 = x;
  for (int j = 2; j <= n; ++j) {
    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  pn = p1;
  pn1 = p0;
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  QuadratureRule rule;
  if (n == 1) {
    rule.nodes = {0.0};
    rule.weights = {2.0};
    return rule;
  }
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pn = 0.0;
    double pn1 = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      legendre(n, x, pn, pn1);
      const double dx = pn / (n * (x * pn - pn1) / (x * x - 1.0));
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, pn, pn1);
    const double dp = n * (x * pn - pn1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

QuadratureRule panel_rule(double a, double b, int panels, int nodes_per_panel) {
  if (panels < 1) throw std::invalid_argument("panel_rule: panels must be positive");
  const QuadratureRule base = gauss_legendre(nodes_per_panel);
  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * nodes_per_panel);
  rule.weights.reserve(rule.nodes.capacity());
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (std::size_t i = 0; i < base.size(); ++i) {
      rule.nodes.push_back(lo + 0.5 * width * (base.nodes[i] + 1.0));
      rule.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return rule;
}

}  // namespace hgbm
