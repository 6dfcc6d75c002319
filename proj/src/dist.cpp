#include "elicit/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <gsl/gsl_cdf.h>

#include "elicit/error.hpp"
#include "elicit/quadrature.hpp"

namespace elicit {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kWeightTol = 1e-12;

double checked(double v, double y) {
  if (!std::isfinite(v)) fail(ErrorCode::NonFiniteIntegrand, "integrand is " + format_number(v) + " at y = " + format_number(y));
  return v;
}

std::vector<double> cuts_within(double lo, double hi, std::span<const double> breakpoints) {
  std::vector<double> cuts{lo};
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

double expect_gaussian(const RealFn& f, const Gaussian& g, std::span<const double> breakpoints,
                       const QuadratureOptions& opts) {
  const double lo = g.mu - opts.truncation_sigmas * g.sigma;
  const double hi = g.mu + opts.truncation_sigmas * g.sigma;
  const auto cuts = cuts_within(lo, hi, breakpoints);
  if (cuts.size() == 2) {
    const auto& rule = gauss_hermite(opts.hermite_nodes);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double y = g.mu + std::numbers::sqrt2 * g.sigma * rule.nodes[i];
      s += rule.weights[i] * checked(f(y), y);
    }
    return s / std::sqrt(std::numbers::pi);
  }
  const double norm = 1.0 / (g.sigma * std::sqrt(2.0 * std::numbers::pi));
  auto integrand = [&](double y) {
    const double u = (y - g.mu) / g.sigma;
    return checked(f(y), y) * norm * std::exp(-0.5 * u * u);
  };
  const double panel = opts.panel_sigmas * g.sigma;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double width = cuts[k + 1] - cuts[k];
    const int panels = std::max(1, static_cast<int>(std::ceil(width / panel)));
    const double h = width / panels;
    for (int j = 0; j < panels; ++j) {
      const double a = cuts[k] + j * h;
      const double b = (j + 1 == panels) ? cuts[k + 1] : a + h;
      total += integrate_legendre(integrand, a, b, opts.panel_nodes);
    }
  }
  return total;
}

double expect_uniform(const RealFn& f, const Uniform& u, std::span<const double> breakpoints,
                      const QuadratureOptions& opts) {
  const auto cuts = cuts_within(u.a, u.b, breakpoints);
  const double density = 1.0 / (u.b - u.a);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    total += integrate_legendre([&](double y) { return checked(f(y), y); }, cuts[k], cuts[k + 1],
                                opts.legendre_nodes);
  }
  return density * total;
}

bool nearly_equal_weight(double a, double b) { return std::fabs(a - b) <= kWeightTol; }

Distribution flatten(const std::vector<Atom>& a, double wa, const std::vector<Atom>& b, double wb) {
  std::vector<Atom> atoms;
  atoms.reserve(a.size() + b.size());
  for (const auto& x : a) atoms.push_back({x.value, wa * x.weight});
  for (const auto& x : b) atoms.push_back({x.value, wb * x.weight});
  return Distribution::discrete(std::move(atoms));
}

}  // namespace

// --- Distribution -----------------------------------------------------------

Distribution Distribution::discrete(std::vector<Atom> atoms) {
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.value) || !std::isfinite(a.weight))
      fail(ErrorCode::DomainError, "discrete atoms must be finite");
    if (a.weight < 0.0) fail(ErrorCode::DomainError, "discrete weights must be non-negative");
    total += a.weight;
  }
  if (std::fabs(total - 1.0) > kWeightTol)
    fail(ErrorCode::DomainError, "discrete weights sum to " + format_number(total) + ", expected 1");
  std::erase_if(atoms, [](const Atom& a) { return a.weight == 0.0; });
  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.value < y.value; });
  std::vector<Atom> merged;
  for (const auto& a : atoms) {
    if (!merged.empty() && merged.back().value == a.value) merged.back().weight += a.weight;
    else merged.push_back(a);
  }
  if (merged.empty()) fail(ErrorCode::DomainError, "discrete distribution needs at least one atom");
  return Distribution(FiniteDiscrete{std::move(merged)});
}

Distribution Distribution::point_mass(double y) { return discrete({{y, 1.0}}); }

Distribution Distribution::empirical(std::span<const double> ys) {
  if (ys.empty()) fail(ErrorCode::DomainError, "empirical law of an empty sample");
  std::vector<double> v(ys.begin(), ys.end());
  for (double y : v)
    if (!std::isfinite(y)) fail(ErrorCode::DomainError, "sample values must be finite");
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    atoms.push_back({v[i], static_cast<double>(j - i) / n});
    i = j;
  }
  return Distribution(FiniteDiscrete{std::move(atoms)});
}

Distribution Distribution::normal(double mu, double sigma) {
  if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma))
    fail(ErrorCode::DomainError, "normal law needs finite mu and sigma > 0");
  return Distribution(Gaussian{mu, sigma});
}

Distribution Distribution::uniform(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    fail(ErrorCode::DomainError, "uniform law needs finite a < b");
  return Distribution(Uniform{a, b});
}

Distribution Distribution::mixture(double lambda, Distribution left, Distribution right) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::DomainError, "mixture weight must lie in [0, 1]");
  return Distribution(Mixture{lambda, std::make_shared<const Distribution>(std::move(left)),
                              std::make_shared<const Distribution>(std::move(right))});
}

const std::vector<Atom>& Distribution::atoms() const {
  if (const auto* d = std::get_if<FiniteDiscrete>(&v_)) return d->atoms;
  fail(ErrorCode::Unsupported, "atoms() on a non-discrete law");
}

double Distribution::cdf(double x) const {
  return std::visit(overloaded{
                        [&](const FiniteDiscrete& d) {
                          double s = 0.0;
                          for (const auto& a : d.atoms) {
                            if (a.value > x) break;
                            s += a.weight;
                          }
                          return std::min(s, 1.0);
                        },
                        [&](const Gaussian& g) { return 0.5 * std::erfc(-(x - g.mu) / (g.sigma * std::numbers::sqrt2)); },
                        [&](const Uniform& u) { return std::clamp((x - u.a) / (u.b - u.a), 0.0, 1.0); },
                        [&](const Mixture& m) { return (1.0 - m.lambda) * m.left->cdf(x) + m.lambda * m.right->cdf(x); },
                    },
                    v_);
}

double Distribution::cdf_left(double x) const {
  return std::visit(overloaded{
                        [&](const FiniteDiscrete& d) {
                          double s = 0.0;
                          for (const auto& a : d.atoms) {
                            if (a.value >= x) break;
                            s += a.weight;
                          }
                          return std::min(s, 1.0);
                        },
                        [&](const Mixture& m) {
                          return (1.0 - m.lambda) * m.left->cdf_left(x) + m.lambda * m.right->cdf_left(x);
                        },
                        [&](const auto&) { return cdf(x); },
                    },
                    v_);
}

std::pair<double, double> Distribution::effective_support() const {
  return std::visit(overloaded{
                        [](const FiniteDiscrete& d) { return std::pair{d.atoms.front().value, d.atoms.back().value}; },
                        [](const Gaussian& g) { return std::pair{g.mu - 10.0 * g.sigma, g.mu + 10.0 * g.sigma}; },
                        [](const Uniform& u) { return std::pair{u.a, u.b}; },
                        [](const Mixture& m) {
                          if (m.lambda == 0.0) return m.left->effective_support();
                          if (m.lambda == 1.0) return m.right->effective_support();
                          const auto l = m.left->effective_support();
                          const auto r = m.right->effective_support();
                          return std::pair{std::min(l.first, r.first), std::max(l.second, r.second)};
                        },
                    },
                    v_);
}

std::vector<double> Distribution::atom_values() const {
  std::vector<double> out;
  std::visit(overloaded{
                 [&](const FiniteDiscrete& d) {
                   for (const auto& a : d.atoms) out.push_back(a.value);
                 },
                 [&](const Mixture& m) {
                   auto l = m.left->atom_values();
                   auto r = m.right->atom_values();
                   out.insert(out.end(), l.begin(), l.end());
                   out.insert(out.end(), r.begin(), r.end());
                 },
                 [](const auto&) {},
             },
             v_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Distribution::has_continuous_part() const {
  return std::visit(overloaded{
                        [](const FiniteDiscrete&) { return false; },
                        [](const Mixture& m) {
                          return (m.lambda < 1.0 && m.left->has_continuous_part()) ||
                                 (m.lambda > 0.0 && m.right->has_continuous_part());
                        },
                        [](const auto&) { return true; },
                    },
                    v_);
}

std::string Distribution::literal() const {
  return std::visit(overloaded{
                        [](const FiniteDiscrete& d) {
                          std::string s = "discrete: ";
                          for (std::size_t i = 0; i < d.atoms.size(); ++i) {
                            if (i) s += ", ";
                            s += format_number(d.atoms[i].value) + ":" + format_number(d.atoms[i].weight);
                          }
                          return s;
                        },
                        [](const Gaussian& g) { return "normal: " + format_number(g.mu) + ", " + format_number(g.sigma); },
                        [](const Uniform& u) { return "uniform: " + format_number(u.a) + ", " + format_number(u.b); },
                        [](const Mixture& m) {
                          return "mix: " + format_number(m.lambda) + " | " + m.left->literal() + " | " + m.right->literal();
                        },
                    },
                    v_);
}

bool operator==(const Distribution& a, const Distribution& b) {
  if (a.v_.index() != b.v_.index()) return false;
  return std::visit(overloaded{
                        [&](const FiniteDiscrete& d) {
                          const auto& e = std::get<FiniteDiscrete>(b.v_);
                          if (d.atoms.size() != e.atoms.size()) return false;
                          for (std::size_t i = 0; i < d.atoms.size(); ++i) {
                            if (d.atoms[i].value != e.atoms[i].value ||
                                !nearly_equal_weight(d.atoms[i].weight, e.atoms[i].weight))
                              return false;
                          }
                          return true;
                        },
                        [&](const Gaussian& g) {
                          const auto& h = std::get<Gaussian>(b.v_);
                          return g.mu == h.mu && g.sigma == h.sigma;
                        },
                        [&](const Uniform& u) {
                          const auto& w = std::get<Uniform>(b.v_);
                          return u.a == w.a && u.b == w.b;
                        },
                        [&](const Mixture& m) {
                          const auto& n = std::get<Mixture>(b.v_);
                          return m.lambda == n.lambda && *m.left == *n.left && *m.right == *n.right;
                        },
                    },
                    a.v_);
}

// --- expectation, mix, transform -------------------------------------------

double expectation(const RealFn& f, const Distribution& F, std::span<const double> breakpoints,
                   const QuadratureOptions& opts) {
  return std::visit(overloaded{
                        [&](const FiniteDiscrete& d) {
                          double s = 0.0;
                          for (const auto& a : d.atoms) s += a.weight * checked(f(a.value), a.value);
                          return s;
                        },
                        [&](const Gaussian& g) { return expect_gaussian(f, g, breakpoints, opts); },
                        [&](const Uniform& u) { return expect_uniform(f, u, breakpoints, opts); },
                        [&](const Mixture& m) {
                          double s = 0.0;
                          if (m.lambda < 1.0) s += (1.0 - m.lambda) * expectation(f, *m.left, breakpoints, opts);
                          if (m.lambda > 0.0) s += m.lambda * expectation(f, *m.right, breakpoints, opts);
                          return s;
                        },
                    },
                    F.variant());
}

Distribution mix(const Distribution& F, const Distribution& G, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::DomainError, "mixture weight must lie in [0, 1]");
  if (lambda == 0.0) return F;
  if (lambda == 1.0) return G;
  if (F.is_discrete() && G.is_discrete()) return flatten(F.atoms(), 1.0 - lambda, G.atoms(), lambda);
  return Distribution::mixture(lambda, F, G);
}

Distribution transform(const Distribution& F, const ObservationMap& map) {
  if (const auto* s = std::get_if<Scale>(&map); s && !(s->c > 0.0))
    fail(ErrorCode::DomainError, "scale factor must be positive");
  return std::visit(
      overloaded{
          [&](const FiniteDiscrete& d) {
            std::vector<Atom> atoms = d.atoms;
            for (auto& a : atoms) {
              a.value = std::visit(overloaded{[&](const Translate& t) { return a.value + t.z; },
                                              [&](const Scale& s) { return a.value * s.c; }},
                                   map);
            }
            return Distribution::discrete(std::move(atoms));
          },
          [&](const Gaussian& g) {
            return std::visit(overloaded{[&](const Translate& t) { return Distribution::normal(g.mu + t.z, g.sigma); },
                                         [&](const Scale& s) { return Distribution::normal(s.c * g.mu, s.c * g.sigma); }},
                              map);
          },
          [&](const Uniform& u) {
            return std::visit(overloaded{[&](const Translate& t) { return Distribution::uniform(u.a + t.z, u.b + t.z); },
                                         [&](const Scale& s) { return Distribution::uniform(s.c * u.a, s.c * u.b); }},
                              map);
          },
          [&](const Mixture& m) {
            return Distribution::mixture(m.lambda, transform(*m.left, map), transform(*m.right, map));
          },
      },
      F.variant());
}

// --- functionals -------------------------------------------------------------

namespace {

void check_level(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) fail(ErrorCode::DomainError, std::string(what) + " must lie in (0, 1)");
}

ActionDomain var_es_domain() {
  // x2 - x1 <= 0
  return ActionDomain(2).with_constraint({{-1.0, 1.0}, Relation::LessEqual, 0.0});
}

// Bisection for the smallest x with pred(x) on [lo, hi]; pred is monotone.
template <class Pred>
double first_true(Pred&& pred, double lo, double hi) {
  if (pred(lo)) return lo;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

double quantile_impl(const Distribution& F, double alpha, bool strict_above) {
  if (F.is_discrete()) {
    double cum = 0.0;
    for (const auto& a : F.atoms()) {
      cum += a.weight;
      if (strict_above ? cum > alpha + kWeightTol : cum >= alpha - kWeightTol) return a.value;
    }
    return F.atoms().back().value;
  }
  // continuous cdfs are strictly increasing on the support, so both conventions agree
  if (const auto* g = std::get_if<Gaussian>(&F.variant())) return g->mu + g->sigma * gsl_cdf_ugaussian_Pinv(alpha);
  if (const auto* u = std::get_if<Uniform>(&F.variant())) return u->a + alpha * (u->b - u->a);
  auto [lo, hi] = F.effective_support();
  const double pad = 1e-6 * std::max(1.0, hi - lo);
  lo -= pad;
  hi += pad;
  if (strict_above) return first_true([&](double x) { return F.cdf(x) > alpha + 1e-14; }, lo, hi);
  return first_true([&](double x) { return F.cdf(x) >= alpha - 1e-14; }, lo, hi);
}

// Literal for error messages; empirical laws can have thousands of atoms.
std::string brief(const Distribution& F) {
  std::string s = F.literal();
  if (s.size() > 80) s = s.substr(0, 77) + "...";
  return s;
}

// Lower quantile, rejecting a CDF that is flat at level alpha.
double unique_quantile(const Distribution& F, double alpha) {
  const double q = quantile_impl(F, alpha, false);
  bool flat = false;
  if (F.is_discrete()) {
    const auto& atoms = F.atoms();
    double cum = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      cum += atoms[i].weight;
      if (atoms[i].value == q) {
        flat = i + 1 < atoms.size() && std::fabs(cum - alpha) <= kWeightTol && atoms[i + 1].value - q > 1e-9;
        break;
      }
    }
  } else {
    const auto [lo, hi] = F.effective_support();
    const double w = 1e-9 * std::max({1.0, std::fabs(q), (hi - lo) / 20.0});
    flat = F.cdf(q + w) <= alpha + 1e-14;
  }
  if (flat)
    fail(ErrorCode::DomainError,
         "the " + format_number(alpha) + "-quantile of " + brief(F) + " is not unique");
  return q;
}

double expectile_impl(const Distribution& F, double tau) {
  auto [lo, hi] = F.effective_support();
  auto ident = [&](double x) {
    const double bp[] = {x};
    return expectation([&](double y) { return 2.0 * std::fabs((y <= x ? 1.0 : 0.0) - tau) * (x - y); }, F, bp);
  };
  if (ident(lo) >= 0.0) return lo;
  if (ident(hi) <= 0.0) return hi;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= 1e-14 * std::max(1.0, std::fabs(mid))) break;
    if (ident(mid) > 0.0) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

double center_impl(const Distribution& F) {
  const double c = 0.5 * (quantile_impl(F, 0.5, false) + quantile_impl(F, 0.5, true));
  std::vector<double> offsets{0.0};
  for (double v : F.atom_values()) offsets.push_back(std::fabs(v - c));
  if (F.has_continuous_part()) {
    const auto [lo, hi] = F.effective_support();
    const double r = std::max(c - lo, hi - c);
    for (int i = 1; i <= 128; ++i) offsets.push_back(r * i / 128.0);
  }
  std::sort(offsets.begin(), offsets.end());
  const std::size_t n = offsets.size();
  for (std::size_t i = 0; i + 1 < n; ++i) offsets.push_back(0.5 * (offsets[i] + offsets[i + 1]));
  for (double x : offsets) {
    const double gap = F.cdf(c + x) - (1.0 - F.cdf_left(c - x));
    if (std::fabs(gap) > 1e-9)
      fail(ErrorCode::NotSymmetric, brief(F) + " is not symmetric about " + format_number(c) +
                                        " (offset " + format_number(x) + ", gap " + format_number(gap) + ")");
  }
  return c;
}

}  // namespace

Functional Functional::mean() { return Functional(FunctionalKind::Mean, ActionDomain::real_line()); }

Functional Functional::quantile(double alpha) {
  check_level(alpha, "quantile level alpha");
  Functional t(FunctionalKind::Quantile, ActionDomain::real_line());
  t.level_ = alpha;
  return t;
}

Functional Functional::expectile(double tau) {
  check_level(tau, "expectile level tau");
  Functional t(FunctionalKind::Expectile, ActionDomain::real_line());
  t.level_ = tau;
  return t;
}

Functional Functional::ratio(std::vector<NamedFn> p, NamedFn q) {
  if (p.empty()) fail(ErrorCode::DomainError, "ratio of expectations needs at least one numerator");
  Functional t(FunctionalKind::RatioOfExpectations, ActionDomain(static_cast<int>(p.size())));
  t.p_ = std::move(p);
  t.q_ = std::move(q);
  return t;
}

Functional Functional::mean_variance() {
  return Functional(FunctionalKind::MeanVariance, ActionDomain({Interval{}, Interval::above(0.0, false)}));
}

Functional Functional::var_es(double alpha) {
  check_level(alpha, "VaR/ES level alpha");
  Functional t(FunctionalKind::VaREs, var_es_domain());
  t.level_ = alpha;
  return t;
}

Functional Functional::moments(int k) {
  if (k < 1) fail(ErrorCode::DomainError, "moment vector needs k >= 1");
  return Functional(FunctionalKind::MomentVector, ActionDomain(k));
}

Functional Functional::center_of_symmetry() {
  return Functional(FunctionalKind::CenterOfSymmetry, ActionDomain::real_line());
}

std::string Functional::name() const {
  switch (kind_) {
    case FunctionalKind::Mean: return "mean";
    case FunctionalKind::Quantile: return "quantile(alpha=" + format_number(level_) + ")";
    case FunctionalKind::Expectile: return "expectile(tau=" + format_number(level_) + ")";
    case FunctionalKind::RatioOfExpectations: {
      std::string s = "ratio(p=";
      for (std::size_t i = 0; i < p_.size(); ++i) s += (i ? ";" : "") + p_[i].name;
      return s + ", q=" + q_.name + ")";
    }
    case FunctionalKind::MeanVariance: return "mean_variance";
    case FunctionalKind::VaREs: return "var_es(alpha=" + format_number(level_) + ")";
    case FunctionalKind::MomentVector: return "moments(k=" + std::to_string(output_dim()) + ")";
    case FunctionalKind::CenterOfSymmetry: return "center";
  }
  return "functional";
}

double lower_quantile(const Distribution& F, double alpha) { return quantile_impl(F, alpha, false); }
double upper_quantile(const Distribution& F, double alpha) { return quantile_impl(F, alpha, true); }

Point evaluate_functional(const Functional& T, const Distribution& F) {
  Point out(T.output_dim());
  switch (T.kind()) {
    case FunctionalKind::Mean:
      out(0) = expectation([](double y) { return y; }, F);
      break;
    case FunctionalKind::Quantile:
      out(0) = unique_quantile(F, T.level());
      break;
    case FunctionalKind::Expectile:
      out(0) = expectile_impl(F, T.level());
      break;
    case FunctionalKind::RatioOfExpectations: {
      const double den = expectation(T.denominator().fn, F);
      if (!(den > 0.0))
        fail(ErrorCode::DenominatorError, "E[" + T.denominator().name + "] = " + format_number(den) + " is not positive");
      for (int m = 0; m < out.size(); ++m)
        out(m) = expectation(T.numerator()[static_cast<std::size_t>(m)].fn, F) / den;
      break;
    }
    case FunctionalKind::MeanVariance: {
      const double mu = expectation([](double y) { return y; }, F);
      out(0) = mu;
      out(1) = expectation([mu](double y) { return (y - mu) * (y - mu); }, F);
      break;
    }
    case FunctionalKind::VaREs: {
      const double alpha = T.level();
      // VaR is the generalized inverse; ES does not depend on the choice within a flat stretch.
      const double var = quantile_impl(F, alpha, false);
      const double bp[] = {var};
      const double tail = expectation([var](double y) { return y <= var ? y : 0.0; }, F, bp);
      out(0) = var;
      // ES <= VaR holds exactly; rounding must not push the pair out of the domain
      out(1) = std::min(var, tail / alpha + var * (alpha - F.cdf(var)) / alpha);
      break;
    }
    case FunctionalKind::MomentVector:
      for (int m = 0; m < out.size(); ++m) {
        out(m) = expectation([m](double y) { return std::pow(y, m + 1); }, F);
      }
      break;
    case FunctionalKind::CenterOfSymmetry:
      out(0) = center_impl(F);
      break;
  }
  if (!T.domain().contains(out))
    fail(ErrorCode::DomainViolation, T.name() + " of " + brief(F) + " = " + format_point(out) +
                                         " lies outside " + T.domain().describe());
  return out;
}

Point point_mass_value(const Functional& T, double y) {
  Point out(T.output_dim());
  switch (T.kind()) {
    case FunctionalKind::Mean:
    case FunctionalKind::Quantile:
    case FunctionalKind::Expectile:
    case FunctionalKind::CenterOfSymmetry:
      out(0) = y;
      break;
    case FunctionalKind::RatioOfExpectations: {
      const double den = T.denominator().fn(y);
      if (!(den > 0.0)) fail(ErrorCode::DenominatorError, T.denominator().name + " is not positive at y = " + format_number(y));
      for (int m = 0; m < out.size(); ++m) out(m) = T.numerator()[static_cast<std::size_t>(m)].fn(y) / den;
      break;
    }
    case FunctionalKind::MeanVariance:
      out << y, 0.0;
      break;
    case FunctionalKind::VaREs:
      out << y, y;
      break;
    case FunctionalKind::MomentVector:
      for (int m = 0; m < out.size(); ++m) out(m) = std::pow(y, m + 1);
      break;
  }
  return out;
}

std::string_view to_string(PathShape shape) {
  switch (shape) {
    case PathShape::Constant: return "constant";
    case PathShape::Injective: return "injective";
    case PathShape::Neither: return "neither";
  }
  return "neither";
}

MixturePath mixture_path(const Functional& T, const Distribution& F, const Distribution& G, int n_grid) {
  if (n_grid < 2) fail(ErrorCode::DomainError, "mixture path needs n_grid >= 2");
  MixturePath path;
  for (int i = 0; i < n_grid; ++i) {
    const double lambda = static_cast<double>(i) / (n_grid - 1);
    try {
      path.lambdas.push_back(lambda);
      path.values.push_back(evaluate_functional(T, mix(F, G, lambda)));
    } catch (const Error& e) {
      throw Error(e.code(), e.detail() + " (at lambda = " + format_number(lambda) + ")");
    }
  }
  bool all_close = true;
  bool all_apart = true;
  constexpr double tol = 1e-9;
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    for (std::size_t j = i + 1; j < path.values.size(); ++j) {
      const double d = (path.values[i] - path.values[j]).norm();
      if (d < tol) all_apart = false;
      else all_close = false;
    }
  }
  path.shape = all_close ? PathShape::Constant : (all_apart ? PathShape::Injective : PathShape::Neither);
  return path;
}

}  // namespace elicit
