#pragma once

#include <vector>

namespace hgbm {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

// Composite rule: `panels` equal panels on [a, b], each with an n-point Gauss-Legendre rule.
QuadratureRule panel_rule(double a, double b, int panels, int nodes_per_panel);

template <typename Fn>
double integrate(const QuadratureRule& rule, Fn&& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(rule.nodes[i]);
  return sum;
}

}  // namespace hgbm
