#include "elicit/convex.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "elicit/error.hpp"

namespace elicit {
namespace {

constexpr double kDerivRelTol = 1e-6;

// Largest step <= h0 keeping x +/- h e_i inside phi's domain, or 0.
double usable_step(const ConvexSpec& phi, const Point& x, int i, double h0) {
  double h = h0;
  for (int tries = 0; tries < 30; ++tries) {
    Point up = x, down = x;
    up(i) += h;
    down(i) -= h;
    if (phi.contains(up) && phi.contains(down)) return h;
    h *= 0.5;
  }
  return 0.0;
}

Point fd_gradient(const ConvexSpec& phi, const Point& x, double rel) {
  Point g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    const double h = usable_step(phi, x, i, rel * std::max(1.0, std::fabs(x(i))));
    if (h == 0.0) fail(ErrorCode::ConvexityError, phi.name + ": no room for finite differences at " + format_point(x));
    Point up = x, down = x;
    up(i) += h;
    down(i) -= h;
    g(i) = (phi.value(up) - phi.value(down)) / (2.0 * h);
  }
  return g;
}

Matrix fd_hessian_from_gradient(const ConvexSpec& phi, const Point& x, double rel) {
  const int k = static_cast<int>(x.size());
  Matrix H(k, k);
  for (int j = 0; j < k; ++j) {
    const double h = usable_step(phi, x, j, rel * std::max(1.0, std::fabs(x(j))));
    if (h == 0.0) fail(ErrorCode::ConvexityError, phi.name + ": no room for finite differences at " + format_point(x));
    Point up = x, down = x;
    up(j) += h;
    down(j) -= h;
    H.col(j) = (phi.gradient(up) - phi.gradient(down)) / (2.0 * h);
  }
  return H;
}

void convexity_failure(const ConvexSpec& phi, const Point& x, const std::string& what) {
  fail(ErrorCode::ConvexityError, phi.name + " at " + format_point(x) + ": " + what);
}

}  // namespace

void validate_convex(const ConvexSpec& phi) {
  for (const auto& x : phi.probes) {
    if (!phi.contains(x)) convexity_failure(phi, x, "probe outside the generator's domain");
    const Point g = phi.gradient(x);
    const Matrix H = phi.hessian(x);
    if (!g.allFinite() || !H.allFinite() || !std::isfinite(phi.value(x)))
      convexity_failure(phi, x, "non-finite value or derivative");
    const double hscale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if (((H - H.transpose()).cwiseAbs().maxCoeff()) > 1e-9 * hscale) convexity_failure(phi, x, "Hessian is not symmetric");
    const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (H + H.transpose())).eigenvalues().minCoeff();
    if (min_eig < -1e-9 * hscale)
      convexity_failure(phi, x, "Hessian has negative eigenvalue " + format_number(min_eig));
    if (phi.finite_difference) continue;
    const Point g_fd = fd_gradient(phi, x, 1e-5);
    for (int i = 0; i < g.size(); ++i) {
      if (std::fabs(g_fd(i) - g(i)) > kDerivRelTol * std::max(1.0, std::fabs(g(i))))
        convexity_failure(phi, x, "gradient component " + std::to_string(i) + " is " + format_number(g(i)) +
                                      ", finite differences give " + format_number(g_fd(i)));
    }
    const Matrix H_fd = fd_hessian_from_gradient(phi, x, 1e-5);
    if ((H_fd - H).cwiseAbs().maxCoeff() > kDerivRelTol * hscale)
      convexity_failure(phi, x, "Hessian disagrees with finite differences of the gradient");
  }
}

ConvexSpec scalar_convex(std::string name, Interval domain, std::function<double(double)> f,
                         std::function<double(double)> df, std::function<double(double)> d2f,
                         std::vector<double> probes) {
  ConvexSpec spec;
  spec.name = std::move(name);
  spec.domain = ActionDomain({domain});
  spec.value = [f](const Point& x) { return f(x(0)); };
  spec.gradient = [df](const Point& x) { return point({df(x(0))}); };
  spec.hessian = [d2f](const Point& x) {
    Matrix H(1, 1);
    H(0, 0) = d2f(x(0));
    return H;
  };
  for (double p : probes) spec.probes.push_back(point({p}));
  return spec;
}

ConvexSpec convex_from_value(std::string name, ActionDomain domain, std::function<double(const Point&)> value,
                             std::vector<Point> probes) {
  ConvexSpec spec;
  spec.name = std::move(name);
  spec.domain = std::move(domain);
  spec.value = std::move(value);
  spec.probes = std::move(probes);
  spec.finite_difference = true;
  // Captures a copy of the value-only spec so the closures stay self-contained.
  ConvexSpec base = spec;
  spec.gradient = [base](const Point& x) { return fd_gradient(base, x, 1e-6); };
  spec.hessian = [base](const Point& x) {
    const int k = static_cast<int>(x.size());
    Matrix H(k, k);
    const double f0 = base.value(x);
    for (int i = 0; i < k; ++i) {
      for (int j = i; j < k; ++j) {
        const double hi = usable_step(base, x, i, 1e-4 * std::max(1.0, std::fabs(x(i))));
        const double hj = usable_step(base, x, j, 1e-4 * std::max(1.0, std::fabs(x(j))));
        const double h = std::min(hi, hj);
        if (h == 0.0) fail(ErrorCode::ConvexityError, base.name + ": no room for finite differences");
        if (i == j) {
          Point up = x, down = x;
          up(i) += h;
          down(i) -= h;
          H(i, i) = (base.value(up) - 2.0 * f0 + base.value(down)) / (h * h);
        } else {
          Point pp = x, pm = x, mp = x, mm = x;
          pp(i) += h, pp(j) += h;
          pm(i) += h, pm(j) -= h;
          mp(i) -= h, mp(j) += h;
          mm(i) -= h, mm(j) -= h;
          H(i, j) = H(j, i) = (base.value(pp) - base.value(pm) - base.value(mp) + base.value(mm)) / (4.0 * h * h);
        }
      }
    }
    return H;
  };
  return spec;
}

ConvexSpec quadratic_generator(int dim) {
  ConvexSpec spec;
  spec.name = "quadratic";
  spec.domain = ActionDomain(dim);
  spec.value = [](const Point& x) { return 0.5 * x.squaredNorm(); };
  spec.gradient = [](const Point& x) { return Point(x); };
  spec.hessian = [dim](const Point&) { return Matrix(Matrix::Identity(dim, dim)); };
  spec.probes = {Point::Zero(dim), Point::Constant(dim, 1.5), Point::LinSpaced(dim, -2.0, 1.0)};
  return spec;
}

ConvexSpec exp_generator(int dim) {
  ConvexSpec spec;
  spec.name = "exp";
  spec.domain = ActionDomain(dim);
  spec.value = [](const Point& x) { return std::exp(x.sum()); };
  spec.gradient = [dim](const Point& x) { return Point(Point::Constant(dim, std::exp(x.sum()))); };
  spec.hessian = [dim](const Point& x) { return Matrix(Matrix::Constant(dim, dim, std::exp(x.sum()))); };
  spec.probes = {Point::Zero(dim), Point::Constant(dim, 0.5), Point::LinSpaced(dim, -1.0, 0.7)};
  return spec;
}

ConvexSpec phi_b(double b) {
  if (!(b > 0.0 && b <= 1.0)) fail(ErrorCode::DomainError, "phi_b needs b in (0, 1]");
  std::function<double(double)> f;
  if (b == 1.0) f = [](double x) { return -std::log(-x); };
  else f = [b](double x) { return std::pow(-x, 1.0 - b) / (b - 1.0); };
  return scalar_convex(
      "phi_b(" + format_number(b) + ")", Interval::below(0.0, true), std::move(f),
      [b](double x) { return std::pow(-x, -b); }, [b](double x) { return b * std::pow(-x, -b - 1.0); },
      {-0.1, -0.5, -1.0, -2.0, -5.0, -10.0});
}

ConvexSpec psi_b(double b, double d1, double d0, double d2) {
  if (!(d1 > 0.0)) fail(ErrorCode::DomainError, "psi_b needs d1 > 0");
  std::function<double(double)> f, df, d2f;
  if (b == 1.0) {
    f = [=](double y) { return d0 + d1 * y * std::log(y) + d2 * y; };
    df = [=](double y) { return d1 * (std::log(y) + 1.0) + d2; };
    d2f = [=](double y) { return d1 / y; };
  } else if (b == 0.0) {
    f = [=](double y) { return d0 - d1 * std::log(y) + d2 * y; };
    df = [=](double y) { return -d1 / y + d2; };
    d2f = [=](double y) { return d1 / (y * y); };
  } else {
    f = [=](double y) { return d0 + d1 * std::pow(y, b) / (b * (b - 1.0)); };
    df = [=](double y) { return d1 * std::pow(y, b - 1.0) / (b - 1.0); };
    d2f = [=](double y) { return d1 * std::pow(y, b - 2.0); };
  }
  return scalar_convex("psi_b(" + format_number(b) + ")", Interval::above(0.0, true), std::move(f), std::move(df),
                       std::move(d2f), {0.1, 0.5, 1.0, 2.0, 5.0});
}

ConvexSpec inverse_variance_generator() {
  ConvexSpec spec;
  spec.name = "inverse_variance";
  spec.domain = ActionDomain({Interval{}, Interval::above(0.0, true)});
  spec.admissible = [](const Point& m) { return m(0) * m(0) < m(1); };
  spec.value = [](const Point& m) { return 1.0 / (m(1) - m(0) * m(0)); };
  spec.gradient = [](const Point& m) {
    const double d = m(1) - m(0) * m(0);
    return point({2.0 * m(0) / (d * d), -1.0 / (d * d)});
  };
  spec.hessian = [](const Point& m) {
    const double d = m(1) - m(0) * m(0);
    const double d3 = d * d * d;
    Matrix H(2, 2);
    H << (2.0 * m(1) + 6.0 * m(0) * m(0)) / d3, -4.0 * m(0) / d3, -4.0 * m(0) / d3, 2.0 / d3;
    return H;
  };
  spec.probes = {point({0.0, 1.0}), point({0.5, 1.0}), point({1.0, 2.0}), point({-1.0, 3.0}), point({2.0, 5.0})};
  return spec;
}

ConvexSpec separable(std::vector<ConvexSpec> components) {
  if (components.empty()) fail(ErrorCode::DomainError, "separable generator needs components");
  std::vector<Interval> box;
  std::string name = "separable(";
  std::size_t n_probes = 0;
  for (std::size_t m = 0; m < components.size(); ++m) {
    if (components[m].dim() != 1) fail(ErrorCode::DomainError, "separable components must be scalar");
    box.push_back(components[m].domain.box()[0]);
    name += (m ? "," : "") + components[m].name;
    n_probes = std::max(n_probes, components[m].probes.size());
  }
  ConvexSpec spec;
  spec.name = name + ")";
  spec.domain = ActionDomain(box);
  const int k = static_cast<int>(components.size());
  auto comps = std::make_shared<const std::vector<ConvexSpec>>(std::move(components));
  spec.value = [comps](const Point& x) {
    double s = 0.0;
    for (int m = 0; m < x.size(); ++m) s += (*comps)[static_cast<std::size_t>(m)].value(point({x(m)}));
    return s;
  };
  spec.gradient = [comps](const Point& x) {
    Point g(x.size());
    for (int m = 0; m < x.size(); ++m) g(m) = (*comps)[static_cast<std::size_t>(m)].gradient(point({x(m)}))(0);
    return g;
  };
  spec.hessian = [comps](const Point& x) {
    Matrix H = Matrix::Zero(x.size(), x.size());
    for (int m = 0; m < x.size(); ++m) H(m, m) = (*comps)[static_cast<std::size_t>(m)].hessian(point({x(m)}))(0, 0);
    return H;
  };
  for (std::size_t i = 0; i < n_probes; ++i) {
    Point p(k);
    for (int m = 0; m < k; ++m) {
      const auto& pr = (*comps)[static_cast<std::size_t>(m)].probes;
      p(m) = pr[i % pr.size()](0);
    }
    spec.probes.push_back(p);
  }
  return spec;
}

PhiSpec huber_phi(double k) {
  if (!(k >= 0.0) || !std::isfinite(k)) fail(ErrorCode::DomainError, "huber threshold k must be >= 0");
  return {"huber(k=" + format_number(k) + ")",
          [k](double t) {
            const double a = std::fabs(t);
            return a < k ? 0.5 * t * t : k * a - 0.5 * k * k;
          },
          {-k, k}};
}

PhiSpec absolute_phi() {
  return {"absolute", [](double t) { return std::fabs(t); }, {0.0}};
}

PhiSpec squared_phi() {
  return {"squared", [](double t) { return t * t; }, {}};
}

}  // namespace elicit
