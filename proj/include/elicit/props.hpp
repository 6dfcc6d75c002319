#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "elicit/convex.hpp"
#include "elicit/dist.hpp"
#include "elicit/report.hpp"
#include "elicit/scores.hpp"

namespace elicit {

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int n = 3;

  double step() const { return (hi - lo) / (n - 1); }
  double at(int i) const { return i == n - 1 ? hi : lo + i * step(); }
};

struct CheckConfig {
  std::vector<GridAxis> grid;  // one axis per forecast coordinate
  // Unit vectors; empty means the 2k axis directions plus n_random seeded random ones.
  std::vector<Point> directions;
  int n_random = 16;
  // Sphere radii for the metrical check; empty means the line-segment s-grid.
  std::vector<double> radii;
  double tol_eq = 1e-9;
  double tol_mono = 1e-9;
  std::uint64_t rng_seed = 0;
  QuadratureOptions quadrature;

  // Throws Precondition on n < 3, wrong axis count, or non-unit directions.
  void validate(int k) const;
  Json echo() const;
};

// Cube [lo, hi]^k with n points per axis.
CheckConfig cube_config(int k, double lo, double hi, int n);

std::vector<Point> probe_directions(const CheckConfig& cfg, int k);
// s-grid used along rays: 0 < s_1 < ... <= half the narrowest grid width.
std::vector<double> ray_steps(const CheckConfig& cfg);

// Grid argmin of the expected score must sit within one grid step of T(F), and
// the expected score at T(F) must not exceed any grid value by more than tol_eq.
// Strict interior local minima away from T(F) are reported as violations too.
PropertyReport check_consistency(const Score& s, const Functional& t, const std::vector<Distribution>& dists,
                                 const CheckConfig& cfg);

struct OrderNotion {
  enum class Kind { Componentwise, LineSegments, Metrical };
  Kind kind = Kind::LineSegments;
  double p = 2.0;  // metrical only; +inf allowed

  static OrderNotion componentwise() { return {Kind::Componentwise, 2.0}; }
  static OrderNotion line_segments() { return {Kind::LineSegments, 2.0}; }
  static OrderNotion metrical(double p) { return {Kind::Metrical, p}; }
  std::string name() const;
};

PropertyReport check_order_sensitivity(const Score& s, const Functional& t, const OrderNotion& notion,
                                       const std::vector<Distribution>& dists, const CheckConfig& cfg);

// delta(eps, F) = min over probes with |x - T(F)| >= eps of the excess expected score.
PropertyReport check_self_calibration(const Score& s, const Functional& t, const std::vector<Distribution>& dists,
                                      const std::vector<double>& epsilons, const CheckConfig& cfg);

// Sign of v' E_F V(T(F) + s v, Y) for s > 0 along every probe direction.
PropertyReport check_orientation(const IdentificationFn& v, const Functional& t,
                                 const std::vector<Distribution>& dists, const CheckConfig& cfg);

struct Equivariance {
  enum class Kind { Translation, Homogeneity, MixedHomogeneity };
  Kind kind = Kind::Homogeneity;
  Matrix obs_map;     // translation: y -> y + M_O z (1 x 1)
  Matrix action_map;  // translation: x -> x + M_A z (k x 1)
  double b = 0.0;
  std::vector<double> degrees;  // mixed: Lambda(c) = diag(c^degrees)

  static Equivariance translation(Matrix m_obs, Matrix m_action);
  static Equivariance homogeneity(double b);
  static Equivariance mixed_homogeneity(double b, std::vector<double> degrees);
  std::string name() const;
};

struct ProbeTriple {
  Point x;
  Point z;
  double y;
};

// S(g x, g y) - S(g z, g y) = lambda(g) (S(x, y) - S(z, y)) on every triple and
// every shift/scale, with deviations relative to max(1, |terms|).
PropertyReport check_equivariance(const Score& s, const Equivariance& kind, const std::vector<ProbeTriple>& probes,
                                  const std::vector<double>& shifts_or_scales, double tol = 1e-9);
// Product form: points x with z = the next point (cyclically), times every observation.
PropertyReport check_equivariance(const Score& s, const Equivariance& kind, const std::vector<Point>& points,
                                  const std::vector<double>& obs, const std::vector<double>& shifts_or_scales,
                                  double tol = 1e-9);

struct ConvexCondition {
  enum class Kind { MvEq, MvIneq, EsSufficient, MixedHom };
  Kind kind = Kind::MvEq;
  double b = 0.0;
  std::vector<double> degrees;
  std::vector<double> scales{0.5, 2.0, 10.0};

  static ConvexCondition mv_eq() { return of(Kind::MvEq); }
  static ConvexCondition mv_ineq() { return of(Kind::MvIneq); }
  static ConvexCondition es_sufficient() { return of(Kind::EsSufficient); }
  static ConvexCondition mixed_hom(double b, std::vector<double> degrees, std::vector<double> scales = {0.5, 2.0, 10.0}) {
    return {Kind::MixedHom, b, std::move(degrees), std::move(scales)};
  }
  std::string name() const;

 private:
  static ConvexCondition of(Kind k) {
    ConvexCondition c;
    c.kind = k;
    return c;
  }
};

// es_sufficient takes every ordered pair of the (scalar) probes as (x, z).
PropertyReport check_convex_conditions(const ConvexSpec& phi, const ConvexCondition& which,
                                       const std::vector<Point>& probes, double tol = 1e-9);

// For S(x, y) = Phi(x - y) and a discrete symmetric F, the mass P(Y - C(F) in M_{x,z})
// for every pair with |x| > |z|; zero mass is a violation of the strictness criterion.
PropertyReport check_phi_symmetric(const PhiSpec& phi, const Distribution& F,
                                   const std::vector<std::pair<double, double>>& pairs, double tol = 1e-9);

// Mixed second differences of S in distinct coordinates, step = grid step.
PropertyReport check_separability(const Score& s, const Functional& t, const std::vector<Distribution>& dists,
                                  const CheckConfig& cfg);

// lambda -> E_F S(T((1 - lambda) G + lambda F), Y) must not increase.
PropertyReport check_mixture_path(const Score& s, const Functional& t, const Distribution& F, const Distribution& G,
                                  int n_grid, const CheckConfig& cfg);

}  // namespace elicit
