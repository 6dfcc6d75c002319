#include "elicit/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

#include <gsl/gsl_integration.h>

#include "elicit/error.hpp"

namespace elicit {
namespace {

QuadratureRule compute(const gsl_integration_fixed_type* type, int n, double a, double b) {
  if (n < 1) fail(ErrorCode::DomainError, "quadrature node count must be positive");
  std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
      gsl_integration_fixed_alloc(type, static_cast<std::size_t>(n), a, b, 0.0, 0.0), &gsl_integration_fixed_free);
  if (!ws) fail(ErrorCode::DomainError, "could not build quadrature rule");
  const double* x = gsl_integration_fixed_nodes(ws.get());
  const double* w = gsl_integration_fixed_weights(ws.get());
  QuadratureRule rule;
  rule.nodes.assign(x, x + n);
  rule.weights.assign(w, w + n);
  return rule;
}

const QuadratureRule& cached(std::map<int, QuadratureRule>& cache, std::mutex& mu,
                             const gsl_integration_fixed_type* type, int n, double a, double b) {
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute(type, n, a, b)).first;
  return it->second;  // std::map references stay valid across inserts
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  return cached(cache, mu, gsl_integration_fixed_legendre, n, -1.0, 1.0);
}

const QuadratureRule& gauss_hermite(int n) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  return cached(cache, mu, gsl_integration_fixed_hermite, n, 0.0, 1.0);
}

}  // namespace elicit
