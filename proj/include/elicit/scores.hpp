#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "elicit/convex.hpp"
#include "elicit/dist.hpp"
#include "elicit/domain.hpp"
#include "elicit/types.hpp"

namespace elicit {

using Params = std::vector<std::pair<std::string, double>>;

// y -> S(x, y) for a fixed forecast x; x-only terms are computed once at bind time.
using BoundScore = std::function<double(double)>;
using ScoreBinder = std::function<BoundScore(const Point&)>;
// y-values where y -> S(x, y) jumps or kinks.
using BreakpointFn = std::function<std::vector<double>(const Point&)>;
// Matrix h(x) with grad_x E_F S(x, Y) = h(x) E_F V(x, Y).
using WeightFn = std::function<Matrix(const Point&)>;

// Scoring function S : A x R -> R.
class Score {
 public:
  Score(std::string family, Params params, ActionDomain domain, ScoreBinder binder, BreakpointFn breakpoints = {},
        WeightFn weight = {});

  const std::string& family() const { return family_; }
  const Params& params() const { return params_; }
  const ActionDomain& domain() const { return domain_; }
  int dim() const { return domain_.dim(); }

  // Throws DomainViolation for x outside the action domain.
  double operator()(const Point& x, double y) const;
  BoundScore bind(const Point& x) const;
  BoundScore bind_unchecked(const Point& x) const { return binder_(x); }

  std::vector<double> breakpoints(const Point& x) const;
  const WeightFn& identification_weight() const { return weight_; }

  // Same formula on a different declared action domain.
  Score with_domain(ActionDomain domain) const;

  std::string describe() const;

 private:
  std::string family_;
  Params params_;
  ActionDomain domain_;
  ScoreBinder binder_;
  BreakpointFn breakpoints_;
  WeightFn weight_;
};

// --- catalog ---------------------------------------------------------------

Score pinball(double alpha);
Score asym_squared(double tau);
// S(x, y) = q(y) x^2 / 2 - p(y) x.
Score bregman_ratio_quadratic(NamedFn p, NamedFn q);
// The mean score x^2/2 - xy.
Score mean_score();
// S(x, y) = sum_m q(y) x_m^2 / 2 - p_m(y) x_m.
Score bregman_ratio_multi(std::vector<NamedFn> p, NamedFn q);
// S(x, y) = -phi(x) q(y) + grad phi(x) (q(y) x - p(y)).
Score bregman_general(std::vector<NamedFn> p, NamedFn q, ConvexSpec phi);
// S(x, y) = Phi(x - y).
Score phi_loss(PhiSpec phi);
Score huber(double k);
// Mean-variance score built from phi on {(m1, m2) : m1^2 < m2}, action domain R x (0, inf).
Score mean_variance(ConvexSpec phi);
// x2^-2 (x1^2 - 2 x2 - 2 x1 y + y^2), action domain x2 >= eps.
Score mv_homogeneous(double eps = 1e-8);
// (VaR, ES) score with increasing g (and its derivative) and scalar phi with phi' > 0, phi'' > 0.
struct IncreasingFn {
  std::string name;
  std::function<double(double)> fn;
  std::function<double(double)> derivative;
};
IncreasingFn zero_fn();
Score var_es(double alpha, ConvexSpec phi, IncreasingFn g = zero_fn());
// Translation invariant (VaR, ES) score on the stripe x2 <= x1 < x2 + c.
Score var_es_translation(double c, double alpha);

// S2 = lambda S1 + a(y), lambda > 0.
Score equivalent(const Score& s, double lambda, NamedFn offset);

// E_F S(x, Y), integrating piecewise at the score's breakpoints.
double expected_score(const Score& s, const Point& x, const Distribution& F, const QuadratureOptions& opts = {});

// --- identification ---------------------------------------------------------

using IdentificationEval = std::function<Point(const Point&, double)>;

// V : A x R -> R^k with E_F V(T(F), Y) = 0.
struct IdentificationFn {
  std::string name;
  Functional target;
  IdentificationEval evaluate;
  // Coordinates c of x for which V(x, y) switches an indicator at y = x_c.
  std::vector<int> indicator_coords;

  Point operator()(const Point& x, double y) const { return evaluate(x, y); }
};

// Throws Unsupported for CenterOfSymmetry.
IdentificationFn canonical_identification(const Functional& T);
// (x1 - y, x2 - (x1 - y)^2) for (mean, variance).
IdentificationFn mean_variance_identification_centered();
// -V.
IdentificationFn negated(const IdentificationFn& v);

// E_F V(x, Y), componentwise.
Point expected_identification(const IdentificationFn& v, const Point& x, const Distribution& F,
                              const QuadratureOptions& opts = {});

// S_0(x, y) = S(x, y) - S(T(delta_y), y).
Score normalize_score(const Score& s, const Functional& T);

// S(x, y) - S(z, y) as the line integral of h(g) V(g, y) . g' along the polyline
// x -> via... -> z (reversed sign). Each polyline segment is split into n_steps
// pieces and at the indicator switches of V; each piece uses 16-node Gauss-Legendre.
// Every evaluation point must lie in the interior of `domain`.
double score_difference_via_path(const WeightFn& h, const IdentificationFn& v, const Point& x, const Point& z,
                                 double y, const ActionDomain& domain, int n_steps = 8,
                                 const std::vector<Point>& via = {});

}  // namespace elicit
