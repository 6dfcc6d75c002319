#pragma once

#include <functional>
#include <string>
#include <vector>

#include "elicit/domain.hpp"
#include "elicit/types.hpp"

namespace elicit {

// Convex generator phi with its derivatives, used by Bregman-type scores.
struct ConvexSpec {
  std::string name;
  ActionDomain domain;
  // Extra non-linear membership condition on top of `domain` (e.g. m1^2 < m2).
  std::function<bool(const Point&)> admissible;
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  std::function<Matrix(const Point&)> hessian;
  // Points inside `domain` where the derivative and convexity invariants are probed.
  std::vector<Point> probes;
  // Derivatives come from finite differences rather than closed forms.
  bool finite_difference = false;

  int dim() const { return domain.dim(); }
  bool contains(const Point& x) const { return domain.contains(x) && (!admissible || admissible(x)); }
};

// Scalar generator with closed-form first and second derivatives.
ConvexSpec scalar_convex(std::string name, Interval domain, std::function<double(double)> f,
                         std::function<double(double)> df, std::function<double(double)> d2f,
                         std::vector<double> probes);

// Generator given only by its value; gradient and Hessian by central differences.
ConvexSpec convex_from_value(std::string name, ActionDomain domain, std::function<double(const Point&)> value,
                             std::vector<Point> probes);

// Throws ConvexityError when, at any probe, the gradient or Hessian disagrees with
// central differences (relative tolerance 1e-6), the Hessian is asymmetric, or it
// has a negative eigenvalue.
void validate_convex(const ConvexSpec& phi);

// phi(x) = x^2 / 2 in every coordinate (sum).
ConvexSpec quadratic_generator(int dim);

// phi(x) = exp(x_1 + ... + x_k).
ConvexSpec exp_generator(int dim);

// phi_b on (-inf, 0): |x|^(1-b) / (b-1) for b in (0,1), -log|x| for b = 1.
ConvexSpec phi_b(double b);

// psi_b on (0, inf): d0 + d1 y^b / (b(b-1)), with the log forms at b = 1 and b = 0.
ConvexSpec psi_b(double b, double d1 = 1.0, double d0 = 0.0, double d2 = 0.0);

// phi(m1, m2) = (m2 - m1^2)^(-1) on {m1^2 < m2}.
ConvexSpec inverse_variance_generator();

// phi(x) = sum_m components[m](x_m) for scalar components.
ConvexSpec separable(std::vector<ConvexSpec> components);

// Even convex function Phi for losses S(x, y) = Phi(x - y).
struct PhiSpec {
  std::string name;
  std::function<double(double)> fn;
  std::vector<double> kinks;  // points where Phi is not twice differentiable
};

PhiSpec huber_phi(double k);
PhiSpec absolute_phi();
PhiSpec squared_phi();

}  // namespace elicit
