#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "elicit/domain.hpp"
#include "elicit/types.hpp"

namespace elicit {

class Distribution;

struct Atom {
  double value;
  double weight;
  bool operator==(const Atom&) const = default;
};

struct FiniteDiscrete {
  std::vector<Atom> atoms;  // canonical: strictly increasing values, positive weights summing to 1
};

struct Gaussian {
  double mu;
  double sigma;
};

struct Uniform {
  double a;
  double b;
};

// (1 - lambda) * left + lambda * right, kept lazy.
struct Mixture {
  double lambda;
  std::shared_ptr<const Distribution> left;
  std::shared_ptr<const Distribution> right;
};

// Law of a real-valued observation. Immutable value type.
class Distribution {
 public:
  using Variant = std::variant<FiniteDiscrete, Gaussian, Uniform, Mixture>;

  static Distribution discrete(std::vector<Atom> atoms);
  static Distribution point_mass(double y);
  // Empirical law of a sample: weight count / n on every distinct value.
  static Distribution empirical(std::span<const double> ys);
  static Distribution normal(double mu, double sigma);
  static Distribution uniform(double a, double b);
  // Builds the lazy mixture node; use mix() to get flattening for discrete inputs.
  static Distribution mixture(double lambda, Distribution left, Distribution right);

  const Variant& variant() const { return v_; }
  bool is_discrete() const { return std::holds_alternative<FiniteDiscrete>(v_); }
  const std::vector<Atom>& atoms() const;

  // F(x) and F(x-).
  double cdf(double x) const;
  double cdf_left(double x) const;

  // Interval holding all but a negligible amount (< 1e-20) of the mass.
  std::pair<double, double> effective_support() const;

  // Support points of all discrete components (sorted, unique).
  std::vector<double> atom_values() const;
  bool has_continuous_part() const;

  std::string literal() const;

  friend bool operator==(const Distribution& a, const Distribution& b);

 private:
  explicit Distribution(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

struct QuadratureOptions {
  int hermite_nodes = 64;
  int legendre_nodes = 64;
  // Composite rule used for Gaussian laws when the integrand has breakpoints:
  // panels of width panel_sigmas * sigma over mu +/- truncation_sigmas * sigma.
  int panel_nodes = 16;
  double panel_sigmas = 1.0;
  double truncation_sigmas = 10.0;
};

using RealFn = std::function<double(double)>;

// E_F[f(Y)]. `breakpoints` are y-values where f may jump or kink; continuous
// laws are integrated piecewise between them.
double expectation(const RealFn& f, const Distribution& F, std::span<const double> breakpoints = {},
                   const QuadratureOptions& opts = {});

// (1 - lambda) F + lambda G; discrete inputs are flattened.
Distribution mix(const Distribution& F, const Distribution& G, double lambda);

struct Translate {
  double z;
};
struct Scale {
  double c;
};
using ObservationMap = std::variant<Translate, Scale>;

// Law of phi(Y) for Y ~ F.
Distribution transform(const Distribution& F, const ObservationMap& map);

// Scalar function of the observation with a printable name, e.g. "y^2".
struct NamedFn {
  std::string name;
  RealFn fn;
};

enum class FunctionalKind {
  Mean,
  Quantile,
  Expectile,
  RatioOfExpectations,
  MeanVariance,
  VaREs,
  MomentVector,
  CenterOfSymmetry,
};

// Statistical functional T: distributions -> action domain.
class Functional {
 public:
  static Functional mean();
  static Functional quantile(double alpha);
  static Functional expectile(double tau);
  static Functional ratio(std::vector<NamedFn> p, NamedFn q);
  static Functional mean_variance();
  static Functional var_es(double alpha);
  static Functional moments(int k);
  static Functional center_of_symmetry();

  FunctionalKind kind() const { return kind_; }
  int output_dim() const { return domain_.dim(); }
  const ActionDomain& domain() const { return domain_; }
  // alpha for Quantile/VaREs, tau for Expectile.
  double level() const { return level_; }
  const std::vector<NamedFn>& numerator() const { return p_; }
  const NamedFn& denominator() const { return q_; }

  std::string name() const;

 private:
  Functional(FunctionalKind kind, ActionDomain domain) : kind_(kind), domain_(std::move(domain)) {}

  FunctionalKind kind_;
  ActionDomain domain_;
  double level_ = 0.0;
  std::vector<NamedFn> p_;
  NamedFn q_;
};

// Generalized inverse inf{x : F(x) >= alpha}. Does not check uniqueness.
double lower_quantile(const Distribution& F, double alpha);
// inf{x : F(x) > alpha}.
double upper_quantile(const Distribution& F, double alpha);

// T(F). Throws DomainError when the quantile is not unique, DenominatorError,
// NotSymmetric, or DomainViolation as documented per kind.
Point evaluate_functional(const Functional& T, const Distribution& F);

// T(delta_y) without building a distribution.
Point point_mass_value(const Functional& T, double y);

enum class PathShape { Constant, Injective, Neither };
std::string_view to_string(PathShape shape);

struct MixturePath {
  std::vector<double> lambdas;
  std::vector<Point> values;
  PathShape shape;
};

// Samples lambda -> T((1 - lambda) F + lambda G) on an equispaced grid.
MixturePath mixture_path(const Functional& T, const Distribution& F, const Distribution& G, int n_grid);

}  // namespace elicit
