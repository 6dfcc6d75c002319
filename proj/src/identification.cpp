#include <algorithm>
#include <cmath>
#include <memory>

#include "elicit/error.hpp"
#include "elicit/quadrature.hpp"
#include "elicit/scores.hpp"

namespace elicit {

IdentificationFn canonical_identification(const Functional& T) {
  const double level = T.level();
  switch (T.kind()) {
    case FunctionalKind::Mean:
      return {"mean", T, [](const Point& x, double y) { return point({x(0) - y}); }, {}};
    case FunctionalKind::Quantile:
      return {"quantile", T, [level](const Point& x, double y) { return point({(y <= x(0) ? 1.0 : 0.0) - level}); },
              {0}};
    case FunctionalKind::Expectile:
      return {"expectile", T,
              [level](const Point& x, double y) {
                return point({2.0 * std::fabs((y <= x(0) ? 1.0 : 0.0) - level) * (x(0) - y)});
              },
              {0}};
    case FunctionalKind::RatioOfExpectations: {
      auto p = std::make_shared<const std::vector<NamedFn>>(T.numerator());
      auto q = T.denominator().fn;
      return {"ratio", T,
              [p, q](const Point& x, double y) {
                Point v(x.size());
                const double qy = q(y);
                for (int m = 0; m < x.size(); ++m) v(m) = qy * x(m) - (*p)[static_cast<std::size_t>(m)].fn(y);
                return v;
              },
              {}};
    }
    case FunctionalKind::MeanVariance:
      return {"mean_variance", T,
              [](const Point& x, double y) { return point({x(0) - y, x(1) + x(0) * x(0) - y * y}); }, {}};
    case FunctionalKind::VaREs:
      return {"var_es", T,
              [level](const Point& x, double y) {
                const double ind = y <= x(0) ? 1.0 : 0.0;
                return point({ind - level, x(1) - x(0) + ind * (x(0) - y) / level});
              },
              {0}};
    case FunctionalKind::MomentVector:
      return {"moments", T,
              [](const Point& x, double y) {
                Point v(x.size());
                for (int m = 0; m < x.size(); ++m) v(m) = x(m) - std::pow(y, m + 1);
                return v;
              },
              {}};
    case FunctionalKind::CenterOfSymmetry:
      break;
  }
  fail(ErrorCode::Unsupported, "no canonical identification function for " + T.name());
}

IdentificationFn mean_variance_identification_centered() {
  return {"mean_variance_centered", Functional::mean_variance(),
          [](const Point& x, double y) {
            const double d = x(0) - y;
            return point({d, x(1) - d * d});
          },
          {}};
}

IdentificationFn negated(const IdentificationFn& v) {
  IdentificationFn out = v;
  out.name = "-" + v.name;
  auto inner = v.evaluate;
  out.evaluate = [inner](const Point& x, double y) { return Point(-inner(x, y)); };
  return out;
}

Point expected_identification(const IdentificationFn& v, const Point& x, const Distribution& F,
                              const QuadratureOptions& opts) {
  std::vector<double> bps;
  for (int c : v.indicator_coords) bps.push_back(x(c));
  const Point probe = v(x, 0.0);
  Point out(probe.size());
  for (int c = 0; c < probe.size(); ++c) {
    out(c) = expectation([&](double y) { return v(x, y)(c); }, F, bps, opts);
  }
  return out;
}

double score_difference_via_path(const WeightFn& h, const IdentificationFn& v, const Point& x, const Point& z,
                                 double y, const ActionDomain& domain, int n_steps, const std::vector<Point>& via) {
  if (n_steps < 2) fail(ErrorCode::DomainError, "path integration needs n_steps >= 2");
  std::vector<Point> vertices{x};
  vertices.insert(vertices.end(), via.begin(), via.end());
  vertices.push_back(z);
  const auto& rule = gauss_legendre(16);
  const double n_seg = static_cast<double>(vertices.size() - 1);

  auto check_inside = [&](const Point& p, double lambda) {
    if (!domain.contains_interior(p))
      fail(ErrorCode::PathOutsideDomain,
           "path point " + format_point(p) + " (lambda = " + format_number(lambda) + ") is not interior");
  };

  double along = 0.0;  // integral from x towards z
  for (std::size_t s = 0; s + 1 < vertices.size(); ++s) {
    const Point& a = vertices[s];
    const Point& b = vertices[s + 1];
    const Point d = b - a;
    check_inside(a, s / n_seg);
    check_inside(b, (s + 1) / n_seg);
    if (d.norm() == 0.0) continue;
    std::vector<double> cuts;
    for (int i = 0; i <= n_steps; ++i) cuts.push_back(static_cast<double>(i) / n_steps);
    for (int c : v.indicator_coords) {
      if (d(c) == 0.0) continue;
      const double t = (y - a(c)) / d(c);
      if (t > 0.0 && t < 1.0) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double t0 = cuts[k];
      const double t1 = cuts[k + 1];
      const double half = 0.5 * (t1 - t0);
      const double mid = 0.5 * (t0 + t1);
      double piece = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = mid + half * rule.nodes[i];
        const Point g = a + t * d;
        check_inside(g, (s + t) / n_seg);
        piece += rule.weights[i] * (h(g) * v(g, y)).dot(d);
      }
      along += half * piece;
    }
  }
  return -along;
}

}  // namespace elicit
