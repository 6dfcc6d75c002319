#include <doctest.h>

#include <cmath>
#include <random>

#include "elicit/convex.hpp"
#include "elicit/dist.hpp"
#include "elicit/error.hpp"
#include "elicit/scores.hpp"

using namespace elicit;

namespace {

const Distribution kTwo = Distribution::discrete({{0, 0.5}, {1, 0.5}});
const Distribution kThree = Distribution::discrete({{-10, 0.05}, {0, 0.9}, {10, 0.05}});

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::UsageError;
}

}  // namespace

TEST_CASE("hand evaluations") {
  CHECK(pinball(0.25)(point({2}), 1) == doctest::Approx(0.75));
  CHECK(huber(1)(point({2}), 0) == doctest::Approx(1.5));
  CHECK(huber(1)(point({0.5}), 0) == doctest::Approx(0.125));
  CHECK(mv_homogeneous()(point({0, 1}), 0) == doctest::Approx(-2.0));
  CHECK(var_es_translation(1, 0.5)(point({0, 0}), -1) == doctest::Approx(1.0));
  for (double a : {0.1, 0.5, 0.9})
    for (double y : {-3.0, 0.0, 2.5}) CHECK(pinball(a)(point({y}), y) == 0.0);
  CHECK(asym_squared(0.8)(point({0}), 1) == doctest::Approx(0.8));
  CHECK(mean_score()(point({3}), 1) == doctest::Approx(1.5));
}

TEST_CASE("parameter and domain errors") {
  CHECK(code_of([] { pinball(1.0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { asym_squared(0.0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { var_es_translation(-1, 0.5); }) == ErrorCode::DomainError);
  CHECK(code_of([] { mv_homogeneous()(point({0, 0}), 1); }) == ErrorCode::DomainViolation);
  CHECK(code_of([] { var_es_translation(1, 0.5)(point({2, 0}), 0); }) == ErrorCode::DomainViolation);
  CHECK(code_of([] { expected_score(mv_homogeneous(), point({0, -1}), kTwo); }) == ErrorCode::DomainViolation);
  auto concave = scalar_convex("concave", Interval::open(-kInf, kInf), [](double x) { return -x * x; },
                               [](double x) { return -2 * x; }, [](double) { return -2.0; }, {0.0, 1.0});
  CHECK(code_of([&] { var_es(0.1, concave); }) == ErrorCode::ConvexityError);
}

TEST_CASE("expected scores") {
  const auto S = mean_score();
  for (double d : {0.1, 0.7, 2.0}) {
    const auto F = Distribution::normal(1.3, 1);
    CHECK(std::fabs(expected_score(S, point({1.3 + d}), F) - expected_score(S, point({1.3}), F) - d * d / 2) < 1e-12);
  }
  CHECK(expected_score(pinball(0.5), point({0}), kTwo) == doctest::Approx(0.25));
  CHECK(expected_score(huber(1), point({0.3}), Distribution::point_mass(2)) == huber(1)(point({0.3}), 2));
  // pinball against a continuous law: closed form for the median of N(0,1)
  const double closed = 0.5 * std::sqrt(2.0 / M_PI);
  CHECK(std::fabs(expected_score(pinball(0.5), point({0}), Distribution::normal(0, 1)) - closed) < 1e-10);
}

TEST_CASE("equivalent scores keep the argmin") {
  const auto S = asym_squared(0.3);
  const auto E = equivalent(S, 2.5, {"y^3", [](double y) { return y * y * y; }});
  const auto F = Distribution::uniform(-1, 2);
  int best_s = 0, best_e = 0;
  double vs = kInf, ve = kInf;
  for (int i = 0; i <= 300; ++i) {
    const double x = -1 + 0.01 * i;
    const double a = expected_score(S, point({x}), F), b = expected_score(E, point({x}), F);
    if (a < vs) vs = a, best_s = i;
    if (b < ve) ve = b, best_e = i;
  }
  CHECK(best_s == best_e);
}

TEST_CASE("canonical identification") {
  const auto Vm = canonical_identification(Functional::mean());
  CHECK(expected_identification(Vm, point({0.5}), kTwo)(0) == doctest::Approx(0.0));
  const auto Vq = canonical_identification(Functional::quantile(0.1));
  CHECK(expected_identification(Vq, point({0}), kThree)(0) == doctest::Approx(0.85));
  const auto Vmv = canonical_identification(Functional::mean_variance());
  const Point e = expected_identification(Vmv, point({0, 1}), Distribution::normal(0, 1));
  CHECK(std::fabs(e(0)) < 1e-9);
  CHECK(std::fabs(e(1)) < 1e-9);
  const auto Vc = mean_variance_identification_centered();
  const Point ec = expected_identification(Vc, point({1, 4}), Distribution::normal(1, 2));
  CHECK(std::fabs(ec(1)) < 1e-9);
  const auto Ve = canonical_identification(Functional::expectile(0.8));
  CHECK(std::fabs(expected_identification(Ve, point({0.8}), kTwo)(0)) < 1e-12);
  const auto Vves = canonical_identification(Functional::var_es(0.1));
  const Point ev = expected_identification(Vves, point({0, -5}), kThree);
  CHECK(std::fabs(ev(1)) < 1e-12);
  CHECK(code_of([] { canonical_identification(Functional::center_of_symmetry()); }) == ErrorCode::Unsupported);
}

TEST_CASE("gradient of the expected score is h times the expected identification") {
  struct Case {
    Score s;
    Functional t;
    Point x;
  };
  const std::vector<Case> cases{
      {mean_score(), Functional::mean(), point({0.4})},
      {asym_squared(0.8), Functional::expectile(0.8), point({0.4})},
      {mv_homogeneous(), Functional::mean_variance(), point({0.3, 1.7})},
      {mean_variance(inverse_variance_generator()), Functional::mean_variance(), point({0.2, 1.5})},
      {var_es(0.2, phi_b(1)), Functional::var_es(0.2), point({-0.5, -1.5})},
      {var_es_translation(3, 0.2), Functional::var_es(0.2), point({-0.5, -1.5})},
  };
  const auto F = Distribution::normal(0.1, 1.2);
  for (const auto& c : cases) {
    CAPTURE(c.s.describe());
    const Point v = expected_identification(canonical_identification(c.t), c.x, F);
    const Point hv = c.s.identification_weight()(c.x) * v;
    for (int m = 0; m < c.x.size(); ++m) {
      const double h = 1e-5;
      Point up = c.x, dn = c.x;
      up(m) += h;
      dn(m) -= h;
      const double g = (expected_score(c.s, up, F) - expected_score(c.s, dn, F)) / (2 * h);
      CHECK(std::fabs(g - hv(m)) <= 1e-6 * std::max(1.0, std::fabs(g)));
    }
  }
}

TEST_CASE("normalization") {
  const auto S0 = normalize_score(mean_score(), Functional::mean());
  for (double x : {-1.0, 0.5, 2.0})
    for (double y : {-2.0, 0.0, 1.5}) CHECK(S0(point({x}), y) == doctest::Approx((x - y) * (x - y) / 2));
  const auto P0 = normalize_score(pinball(0.3), Functional::quantile(0.3));
  CHECK(P0(point({2}), 1) == pinball(0.3)(point({2}), 1));
  const auto V0 = normalize_score(var_es(0.1, phi_b(0.5)), Functional::var_es(0.1));
  for (double y : {-3.0, -1.0, -0.2}) CHECK(std::fabs(V0(point({y, y}), y)) < 1e-12);
  for (double x1 : {-2.0, -0.5})
    for (double x2 : {-3.0, -2.5})
      for (double y : {-4.0, -1.0, -0.1}) CHECK(V0(point({x1, x2}), y) >= -1e-12);
  const auto H0 = normalize_score(huber(1), Functional::center_of_symmetry());
  CHECK(H0(point({2}), 0.5) == huber(1)(point({2}), 0.5));
}

TEST_CASE("homogeneous mean-variance score scales with degree -2") {
  const auto S = mv_homogeneous();
  for (double c : {0.5, 2.0, 10.0}) {
    const Point x = point({0.7, 1.3});
    const Point cx = point({c * 0.7, c * c * 1.3});
    CHECK(std::fabs(S(cx, c * 0.4) - S(x, 0.4) / (c * c)) < 1e-12);
  }
}

TEST_CASE("phi_1 generator has positive first and second derivatives") {
  const auto phi = phi_b(1);
  for (double x : {-5.0, -1.0, -0.01}) {
    CHECK(phi.gradient(point({x}))(0) > 0);
    CHECK(phi.hessian(point({x}))(0, 0) > 0);
    CHECK(phi.value(point({x})) == doctest::Approx(-std::log(-x)));
  }
}

TEST_CASE("path integral reconstruction") {
  const auto ones = [](const Point& x) { return Matrix::Identity(x.size(), x.size()); };
  const auto Vm = canonical_identification(Functional::mean());
  const auto R = ActionDomain::real_line();
  const double got = score_difference_via_path(ones, Vm, point({1.5}), point({-0.5}), 0.3, R);
  const double want = 1.5 * 1.5 / 2 - 0.25 / 2 - 0.3 * 2.0;
  CHECK(std::fabs(got - want) < 1e-10);
  CHECK(score_difference_via_path(ones, Vm, point({1}), point({1}), 0.3, R) == 0.0);
  const auto Vq = canonical_identification(Functional::quantile(0.5));
  CHECK(std::fabs(score_difference_via_path(ones, Vq, point({2}), point({0}), 1, R)) < 1e-12);

  // polyline around a forbidden region; the straight segment leaves the domain
  const auto S = mv_homogeneous();
  const auto dom = S.domain();
  const auto h = S.identification_weight();
  const auto Vmv = canonical_identification(Functional::mean_variance());
  const Point x = point({-1, 1}), z = point({1, 1});
  const double direct = score_difference_via_path(h, Vmv, x, z, 0.2, dom, 16);
  CHECK(std::fabs(direct - (S(x, 0.2) - S(z, 0.2))) < 1e-9);
  const double bent = score_difference_via_path(h, Vmv, x, z, 0.2, dom, 16, {point({0, 3})});
  CHECK(std::fabs(bent - direct) < 1e-9);
  CHECK(code_of([&] { score_difference_via_path(h, Vmv, x, z, 0.2, dom, 8, {point({0, -1})}); }) ==
        ErrorCode::PathOutsideDomain);
}
