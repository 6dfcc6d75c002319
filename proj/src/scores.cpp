#include "elicit/scores.hpp"

#include <cmath>
#include <memory>

#include "elicit/error.hpp"

namespace elicit {
namespace {

void check_open_unit(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) fail(ErrorCode::DomainError, std::string(what) + " must lie in (0, 1)");
}

WeightFn identity_weight(int k) {
  return [k](const Point&) { return Matrix(Matrix::Identity(k, k)); };
}

BreakpointFn at_coordinate(int c) {
  return [c](const Point& x) { return std::vector<double>{x(c)}; };
}

void require_dim(const Point& x, int k, const std::string& family) {
  if (x.size() != k)
    fail(ErrorCode::DomainViolation, family + " expects a forecast of dimension " + std::to_string(k));
}

// x -> m = (x1, x2 + x1^2) Jacobian transpose times Hessian of phi at m.
Matrix mean_variance_weight(const Matrix& hess_m, double x1) {
  Matrix jt(2, 2);
  jt << 1.0, 2.0 * x1, 0.0, 1.0;
  return jt * hess_m;
}

}  // namespace

Score::Score(std::string family, Params params, ActionDomain domain, ScoreBinder binder, BreakpointFn breakpoints,
             WeightFn weight)
    : family_(std::move(family)),
      params_(std::move(params)),
      domain_(std::move(domain)),
      binder_(std::move(binder)),
      breakpoints_(std::move(breakpoints)),
      weight_(std::move(weight)) {}

BoundScore Score::bind(const Point& x) const {
  if (!domain_.contains(x))
    fail(ErrorCode::DomainViolation,
         describe() + ": forecast " + format_point(x) + " lies outside " + domain_.describe());
  return binder_(x);
}

double Score::operator()(const Point& x, double y) const { return bind(x)(y); }

std::vector<double> Score::breakpoints(const Point& x) const {
  return breakpoints_ ? breakpoints_(x) : std::vector<double>{};
}

Score Score::with_domain(ActionDomain domain) const {
  if (domain.dim() != dim()) fail(ErrorCode::DomainError, "with_domain: dimension mismatch");
  Score s = *this;
  s.domain_ = std::move(domain);
  return s;
}

std::string Score::describe() const {
  std::string s = family_;
  if (!params_.empty()) {
    s += "(";
    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (i) s += ",";
      s += params_[i].first + "=" + format_number(params_[i].second);
    }
    s += ")";
  }
  return s;
}

Score pinball(double alpha) {
  check_open_unit(alpha, "pinball level alpha");
  return Score(
      "pinball", {{"alpha", alpha}}, ActionDomain::real_line(),
      [alpha](const Point& x) {
        const double x0 = x(0);
        return BoundScore([=](double y) { return ((y <= x0 ? 1.0 : 0.0) - alpha) * (x0 - y); });
      },
      at_coordinate(0), identity_weight(1));
}

Score asym_squared(double tau) {
  check_open_unit(tau, "expectile level tau");
  return Score(
      "asym_squared", {{"tau", tau}}, ActionDomain::real_line(),
      [tau](const Point& x) {
        const double x0 = x(0);
        return BoundScore([=](double y) {
          const double d = x0 - y;
          return std::fabs((y <= x0 ? 1.0 : 0.0) - tau) * d * d;
        });
      },
      at_coordinate(0), identity_weight(1));
}

Score bregman_ratio_quadratic(NamedFn p, NamedFn q) {
  auto pf = p.fn;
  auto qf = q.fn;
  return Score(
      "bregman_ratio", {}, ActionDomain::real_line(),
      [pf, qf](const Point& x) {
        const double x0 = x(0);
        return BoundScore([=](double y) { return 0.5 * qf(y) * x0 * x0 - pf(y) * x0; });
      },
      {}, identity_weight(1));
}

Score mean_score() {
  return Score(
      "mean_sq", {}, ActionDomain::real_line(),
      [](const Point& x) {
        const double x0 = x(0);
        return BoundScore([=](double y) { return 0.5 * x0 * x0 - x0 * y; });
      },
      {}, identity_weight(1));
}

Score bregman_ratio_multi(std::vector<NamedFn> p, NamedFn q) {
  const int k = static_cast<int>(p.size());
  if (k < 1) fail(ErrorCode::DomainError, "bregman_ratio_multi needs at least one numerator");
  auto ps = std::make_shared<const std::vector<NamedFn>>(std::move(p));
  auto qf = q.fn;
  return Score(
      "bregman_ratio_multi", {}, ActionDomain(k),
      [ps, qf, k](const Point& x) {
        require_dim(x, k, "bregman_ratio_multi");
        const Point xs = x;
        const double half_sq = 0.5 * xs.squaredNorm();
        return BoundScore([=](double y) {
          double s = qf(y) * half_sq;
          for (int m = 0; m < k; ++m) s -= (*ps)[static_cast<std::size_t>(m)].fn(y) * xs(m);
          return s;
        });
      },
      {}, identity_weight(k));
}

Score bregman_general(std::vector<NamedFn> p, NamedFn q, ConvexSpec phi) {
  const int k = phi.dim();
  if (static_cast<int>(p.size()) != k)
    fail(ErrorCode::DomainError, "bregman_general: numerator dimension differs from the generator's");
  validate_convex(phi);
  auto ps = std::make_shared<const std::vector<NamedFn>>(std::move(p));
  auto qf = q.fn;
  const std::string family = "bregman:" + phi.name;
  auto spec = std::make_shared<const ConvexSpec>(std::move(phi));
  return Score(
      family, {}, spec->domain,
      [ps, qf, spec, k](const Point& x) {
        require_dim(x, k, "bregman_general");
        if (!spec->contains(x))
          fail(ErrorCode::DomainViolation, "forecast " + format_point(x) + " outside the domain of " + spec->name);
        const double f = spec->value(x);
        const Point g = spec->gradient(x);
        const Point xs = x;
        return BoundScore([=](double y) {
          const double qy = qf(y);
          double s = -f * qy;
          for (int m = 0; m < k; ++m) s += g(m) * (qy * xs(m) - (*ps)[static_cast<std::size_t>(m)].fn(y));
          return s;
        });
      },
      {}, [spec](const Point& x) { return spec->hessian(x); });
}

Score phi_loss(PhiSpec phi) {
  auto fn = phi.fn;
  auto kinks = phi.kinks;
  return Score(
      "phi_loss:" + phi.name, {}, ActionDomain::real_line(),
      [fn](const Point& x) {
        const double x0 = x(0);
        return BoundScore([=](double y) { return fn(x0 - y); });
      },
      [kinks](const Point& x) {
        std::vector<double> out;
        for (double k : kinks) out.push_back(x(0) - k);
        return out;
      });
}

Score huber(double k) {
  const PhiSpec phi = huber_phi(k);
  Score s = phi_loss(phi);
  return Score(
      "huber", {{"k", k}}, s.domain(), [s](const Point& x) { return s.bind_unchecked(x); },
      [s](const Point& x) { return s.breakpoints(x); });
}

Score mean_variance(ConvexSpec phi) {
  if (phi.dim() != 2) fail(ErrorCode::DomainError, "mean_variance needs a generator on R^2");
  validate_convex(phi);
  auto spec = std::make_shared<const ConvexSpec>(std::move(phi));
  ActionDomain domain({Interval{}, Interval::above(0.0, true)});
  return Score(
      "mv", {}, domain,
      [spec](const Point& x) {
        require_dim(x, 2, "mv");
        const double x1 = x(0);
        const double x2 = x(1);
        const Point m = point({x1, x2 + x1 * x1});
        if (!spec->contains(m))
          fail(ErrorCode::DomainViolation, "moment point " + format_point(m) + " outside the domain of " + spec->name);
        const double f = spec->value(m);
        const Point g = spec->gradient(m);
        const double g1 = g(0), g2 = g(1), m2 = m(1);
        return BoundScore([=](double y) { return -f + g1 * (x1 - y) + g2 * (m2 - y * y); });
      },
      {},
      [spec](const Point& x) {
        const Point m = point({x(0), x(1) + x(0) * x(0)});
        return mean_variance_weight(spec->hessian(m), x(0));
      });
}

Score mv_homogeneous(double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::DomainError, "mv_homogeneous needs eps > 0");
  ActionDomain domain({Interval{}, Interval::above(eps, false)});
  return Score(
      "mv_hom", {}, domain,
      [](const Point& x) {
        require_dim(x, 2, "mv_hom");
        const double x1 = x(0);
        const double x2 = x(1);
        const double inv = 1.0 / (x2 * x2);
        return BoundScore([=](double y) { return inv * (x1 * x1 - 2.0 * x2 - 2.0 * x1 * y + y * y); });
      },
      {},
      [](const Point& x) {
        const double x1 = x(0);
        const double d = x(1);  // m2 - m1^2
        const double d3 = d * d * d;
        const double m2 = x(1) + x1 * x1;
        Matrix H(2, 2);
        H << (2.0 * m2 + 6.0 * x1 * x1) / d3, -4.0 * x1 / d3, -4.0 * x1 / d3, 2.0 / d3;
        return mean_variance_weight(H, x1);
      });
}

IncreasingFn zero_fn() {
  return {"0", [](double) { return 0.0; }, [](double) { return 0.0; }};
}

Score var_es(double alpha, ConvexSpec phi, IncreasingFn g) {
  check_open_unit(alpha, "VaR/ES level alpha");
  if (phi.dim() != 1) fail(ErrorCode::DomainError, "var_es needs a scalar generator");
  validate_convex(phi);
  for (const auto& p : phi.probes) {
    if (!(phi.gradient(p)(0) > 0.0) || !(phi.hessian(p)(0, 0) > 0.0))
      fail(ErrorCode::ConvexityError, phi.name + " needs phi' > 0 and phi'' > 0, fails at " + format_point(p));
  }
  for (double t : {-100.0, -10.0, -1.0, 0.0, 1.0, 10.0, 100.0}) {
    if (g.derivative(t) < 0.0) fail(ErrorCode::DomainError, "g = " + g.name + " is not increasing at " + format_number(t));
  }
  const Interval a2 = phi.domain.box()[0];
  ActionDomain domain = ActionDomain({Interval{}, a2}).with_constraint({{-1.0, 1.0}, Relation::LessEqual, 0.0});
  auto spec = std::make_shared<const ConvexSpec>(std::move(phi));
  auto gf = std::make_shared<const IncreasingFn>(std::move(g));
  return Score(
      "var_es", {{"alpha", alpha}}, domain,
      [spec, gf, alpha](const Point& x) {
        require_dim(x, 2, "var_es");
        const double x1 = x(0);
        const double x2 = x(1);
        const Point p2 = point({x2});
        const double f = spec->value(p2);
        const double df = spec->gradient(p2)(0);
        const double gx = gf->fn(x1);
        auto gfn = gf->fn;
        return BoundScore([=](double y) {
          const double ind = y <= x1 ? 1.0 : 0.0;
          return (ind - alpha) * gx - ind * gfn(y) + df * (x2 + (ind - alpha) * x1 / alpha - ind * y / alpha) - f;
        });
      },
      at_coordinate(0),
      [spec, gf, alpha](const Point& x) {
        const Point p2 = point({x(1)});
        Matrix h = Matrix::Zero(2, 2);
        h(0, 0) = gf->derivative(x(0)) + spec->gradient(p2)(0) / alpha;
        h(1, 1) = spec->hessian(p2)(0, 0);
        return h;
      });
}

Score var_es_translation(double c, double alpha) {
  check_open_unit(alpha, "VaR/ES level alpha");
  if (!(c > 0.0) || !std::isfinite(c)) fail(ErrorCode::DomainError, "stripe width c must be positive");
  ActionDomain domain = ActionDomain(2)
                            .with_constraint({{-1.0, 1.0}, Relation::LessEqual, 0.0})
                            .with_constraint({{1.0, -1.0}, Relation::Less, c});
  return Score(
      "var_es_c", {{"alpha", alpha}, {"c", c}}, domain,
      [c, alpha](const Point& x) {
        require_dim(x, 2, "var_es_c");
        const double x1 = x(0);
        const double x2 = x(1);
        const double quad = alpha * (0.5 * x2 * x2 + 0.5 * x1 * x1 - x1 * x2);
        return BoundScore([=](double y) {
          const double ind = y <= x1 ? 1.0 : 0.0;
          return (ind - alpha) * c * (x1 - y) + quad + ind * (-x2 * (y - x1) + 0.5 * y * y - 0.5 * x1 * x1);
        });
      },
      at_coordinate(0),
      [c, alpha](const Point& x) {
        Matrix h = Matrix::Zero(2, 2);
        h(0, 0) = c - x(0) + x(1);
        h(1, 1) = alpha;
        return h;
      });
}

Score equivalent(const Score& s, double lambda, NamedFn offset) {
  if (!(lambda > 0.0)) fail(ErrorCode::DomainError, "equivalence scale lambda must be positive");
  Params params = s.params();
  params.emplace_back("lambda", lambda);
  auto a = offset.fn;
  WeightFn weight;
  if (s.identification_weight()) {
    auto w = s.identification_weight();
    weight = [w, lambda](const Point& x) { return Matrix(lambda * w(x)); };
  }
  return Score(
      s.family() + "+" + offset.name, params, s.domain(),
      [s, lambda, a](const Point& x) {
        auto inner = s.bind_unchecked(x);
        return BoundScore([=](double y) { return lambda * inner(y) + a(y); });
      },
      [s](const Point& x) { return s.breakpoints(x); }, weight);
}

double expected_score(const Score& s, const Point& x, const Distribution& F, const QuadratureOptions& opts) {
  const auto f = s.bind(x);
  const auto bps = s.breakpoints(x);
  return expectation(f, F, bps, opts);
}

Score normalize_score(const Score& s, const Functional& T) {
  if (s.dim() != T.output_dim())
    fail(ErrorCode::DomainError, "normalize_score: " + s.describe() + " and " + T.name() + " differ in dimension");
  return Score(
      "normalized:" + s.family(), s.params(), s.domain(),
      [s, T](const Point& x) {
        auto inner = s.bind_unchecked(x);
        return BoundScore([=](double y) { return inner(y) - s(point_mass_value(T, y), y); });
      },
      [s](const Point& x) { return s.breakpoints(x); }, s.identification_weight());
}

}  // namespace elicit
