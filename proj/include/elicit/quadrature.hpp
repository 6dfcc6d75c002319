#pragma once

#include <vector>

namespace elicit {

// Nodes and weights of a fixed Gauss rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre on [-1, 1]. Rules are computed once per node count and cached.
const QuadratureRule& gauss_legendre(int n);

// Gauss-Hermite for the weight exp(-t^2) on the real line.
const QuadratureRule& gauss_hermite(int n);

// Integral of f over [a, b] with an n-node Gauss-Legendre rule.
template <class F>
double integrate_legendre(F&& f, double a, double b, int n) {
  const auto& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * s;
}

}  // namespace elicit
