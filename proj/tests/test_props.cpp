#include <doctest.h>

#include <cmath>

#include "elicit/convex.hpp"
#include "elicit/error.hpp"
#include "elicit/props.hpp"

using namespace elicit;

namespace {

const Distribution kTwo = Distribution::discrete({{0, 0.5}, {1, 0.5}});
const Distribution kSkew = Distribution::discrete({{-1, 0.2}, {0, 0.5}, {2, 0.3}});
const Distribution kN = Distribution::normal(0, 1);

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::UsageError;
}

NamedFn id_fn() { return {"y", [](double y) { return y; }}; }
NamedFn sq_fn() { return {"y^2", [](double y) { return y * y; }}; }
NamedFn one_fn() { return {"1", [](double) { return 1.0; }}; }

}  // namespace

TEST_CASE("config validation") {
  auto cfg = cube_config(1, -1, 1, 2);
  CHECK(code_of([&] { cfg.validate(1); }) == ErrorCode::Precondition);
  cfg = cube_config(2, -1, 1, 11);
  CHECK(code_of([&] { cfg.validate(1); }) == ErrorCode::Precondition);
  cfg.directions = {point({1, 1})};
  CHECK(code_of([&] { cfg.validate(2); }) == ErrorCode::Precondition);
  cfg.directions.clear();
  CHECK(probe_directions(cfg, 2).size() == 4 + 16);
  CHECK(probe_directions(cfg, 2) == probe_directions(cfg, 2));
}

TEST_CASE("consistency") {
  const auto r = check_consistency(pinball(0.5), Functional::quantile(0.5), {kN}, cube_config(1, -3, 3, 201));
  CHECK(r.verdict == Verdict::HoldsOnProbes);
  const auto e = check_consistency(asym_squared(0.8), Functional::expectile(0.8), {kTwo}, cube_config(1, -1, 2, 201));
  CHECK(e.verdict == Verdict::HoldsOnProbes);
  const double argmin = e.measurements["per_distribution"][0]["grid_argmin"][0].get<double>();
  CHECK(std::fabs(argmin - 0.8) <= 3.0 / 200);

  // a score for the wrong functional is caught
  const auto w = check_consistency(mean_score(), Functional::quantile(0.2), {kN}, cube_config(1, -3, 3, 201));
  CHECK(w.verdict == Verdict::Violated);
  CHECK(code_of([] { check_consistency(mean_score(), Functional::mean(), {kN}, cube_config(1, 2, 3, 11)); }) ==
        ErrorCode::Precondition);
}

TEST_CASE("translation-invariant VaR/ES score off its stripe") {
  const auto half = ActionDomain(2).with_constraint({{-1.0, 1.0}, Relation::LessEqual, 0.0});
  const auto wide = var_es_translation(1.0, 0.5).with_domain(half);
  const auto r = check_consistency(wide, Functional::var_es(0.5), {kN}, cube_config(2, -6, 2, 81));
  REQUIRE(r.verdict == Verdict::Violated);
  const auto& x = r.witnesses.front().data["x"];
  CHECK(x[0].get<double>() - x[1].get<double>() >= 1.0);
  // on the stripe itself the grid scan finds nothing
  const auto s = check_consistency(var_es_translation(1.0, 0.5), Functional::var_es(0.5), {kN}, cube_config(2, -6, 2, 81));
  CHECK(s.verdict == Verdict::HoldsOnProbes);
}

TEST_CASE("order sensitivity") {
  auto cfg = cube_config(1, -3, 3, 121);
  cfg.radii = {0.1, 0.5, 1, 2};
  const auto m = check_order_sensitivity(mean_score(), Functional::mean(), OrderNotion::metrical(2), {kN, kSkew}, cfg);
  CHECK(m.verdict == Verdict::HoldsOnProbes);
  const auto q = check_order_sensitivity(pinball(0.1), Functional::quantile(0.1), OrderNotion::metrical(2), {kN}, cfg);
  CHECK(q.verdict == Verdict::Violated);
  CHECK(q.worst_margin() > 1e-6);
  for (const auto& s : {pinball(0.3), asym_squared(0.7), huber(1)}) {
    CAPTURE(s.describe());
    const auto t = s.family() == "pinball" ? Functional::quantile(0.3)
                   : s.family() == "asym_squared" ? Functional::expectile(0.7) : Functional::center_of_symmetry();
    const auto r = check_order_sensitivity(s, t, OrderNotion::line_segments(), {kN}, cfg);
    CHECK(r.verdict == Verdict::HoldsOnProbes);
  }
  auto cfg2 = cube_config(2, -2, 3, 41);
  const auto mv = check_order_sensitivity(mv_homogeneous(), Functional::mean_variance(), OrderNotion::line_segments(), {kN}, cfg2);
  CHECK(mv.verdict == Verdict::HoldsOnProbes);
  const auto cw = check_order_sensitivity(bregman_ratio_multi({id_fn(), sq_fn()}, one_fn()), Functional::moments(2),
                                          OrderNotion::componentwise(), {kN, kSkew}, cube_config(2, -2, 4, 31));
  CHECK(cw.verdict == Verdict::HoldsOnProbes);
}

TEST_CASE("metrical order-sensitivity depends on the norm") {
  // the expected score is half the squared euclidean distance plus a constant
  const auto s = bregman_ratio_multi({id_fn(), sq_fn()}, one_fn());
  const auto t = Functional::moments(2);
  auto cfg = cube_config(2, -2, 4, 31);
  CHECK(check_order_sensitivity(s, t, OrderNotion::metrical(2), {kN, kSkew}, cfg).verdict == Verdict::HoldsOnProbes);
  CHECK(check_order_sensitivity(s, t, OrderNotion::metrical(1), {kN, kSkew}, cfg).verdict == Verdict::Violated);
  CHECK(check_order_sensitivity(s, t, OrderNotion::metrical(kInf), {kN, kSkew}, cfg).verdict == Verdict::Violated);
  // metrical for p = 2 implies componentwise on the same grid
  CHECK(check_order_sensitivity(s, t, OrderNotion::componentwise(), {kN, kSkew}, cfg).verdict == Verdict::HoldsOnProbes);
}

TEST_CASE("self-calibration") {
  const auto r = check_self_calibration(mean_score(), Functional::mean(), {kN, kSkew}, {0.25, 0.5, 1.0},
                                        cube_config(1, -3, 3, 241));
  CHECK(r.verdict == Verdict::HoldsOnProbes);
  for (const auto& row : r.measurements["curve"]) {
    const double eps = row["epsilon"].get<double>();
    CHECK(std::fabs(row["delta"].get<double>() - eps * eps / 2) < 1e-9);
  }
  const auto big = check_self_calibration(mean_score(), Functional::mean(), {kN}, {10.0}, cube_config(1, -3, 3, 61));
  CHECK(big.verdict == Verdict::Inconclusive);
  CHECK(big.witnesses.front().kind == "empty_probe_set");
  CHECK(code_of([] {
          check_self_calibration(pinball(0.5), Functional::quantile(0.5), {kTwo}, {0.5}, cube_config(1, -1, 2, 31));
        }) == ErrorCode::Precondition);
}

TEST_CASE("orientation") {
  auto cfg = cube_config(1, -3, 3, 61);
  CHECK(check_orientation(canonical_identification(Functional::quantile(0.3)), Functional::quantile(0.3), {kN}, cfg)
            .verdict == Verdict::HoldsOnProbes);
  CHECK(check_orientation(negated(canonical_identification(Functional::mean())), Functional::mean(), {kN, kSkew}, cfg)
            .verdict == Verdict::Violated);
  auto cfg2 = cube_config(2, -2, 3, 21);
  cfg2.directions = {point({1, 0})};
  CHECK(check_orientation(canonical_identification(Functional::mean_variance()), Functional::mean_variance(), {kN}, cfg2)
            .verdict == Verdict::HoldsOnProbes);
}

TEST_CASE("equivariance") {
  const auto sc = var_es_translation(1, 0.5);
  Matrix mo(1, 1), ma(2, 1);
  mo << 1;
  ma << 1, 1;
  const auto tr = Equivariance::translation(mo, ma);
  const auto r = check_equivariance(sc, tr, std::vector<ProbeTriple>{{point({0, 0}), point({0.5, -0.2}), -1}}, {1.0}, 1e-12);
  CHECK(r.verdict == Verdict::HoldsOnProbes);
  CHECK(check_equivariance(pinball(0.2), Equivariance::homogeneity(1), {point({-1}), point({0.5}), point({2})},
                           {-1.0, 0.3, 2.0}, {0.5, 2.0, 10.0}, 1e-12)
            .verdict == Verdict::HoldsOnProbes);
  // the mean score is homogeneous of degree 2, not 1
  CHECK(check_equivariance(mean_score(), Equivariance::homogeneity(1), {point({-1}), point({0.5})}, {0.3}, {2.0})
            .verdict == Verdict::Violated);
  CHECK(check_equivariance(mv_homogeneous(), Equivariance::mixed_homogeneity(-2, {1, 2}),
                           {point({0, 1}), point({1, 2}), point({-0.5, 0.3})}, {-1.0, 0.0, 2.0}, {0.5, 2.0, 10.0}, 1e-12)
            .verdict == Verdict::HoldsOnProbes);
}

TEST_CASE("convex conditions") {
  std::vector<Point> grid;
  for (double m1 : {-1.0, 0.0, 0.5})
    for (double d : {0.5, 1.0, 3.0}) grid.push_back(point({m1, m1 * m1 + d}));
  const auto iv = inverse_variance_generator();
  const auto eq = check_convex_conditions(iv, ConvexCondition::mv_eq(), grid);
  CHECK(eq.verdict == Verdict::HoldsOnProbes);
  const auto ineq = check_convex_conditions(iv, ConvexCondition::mv_ineq(), grid);
  CHECK(ineq.verdict == Verdict::HoldsOnProbes);
  CHECK(std::fabs(ineq.measurements["min_margin"].get<double>()) < 1e-9);
  // the quadratic generator is not of the required form
  const auto q = check_convex_conditions(quadratic_generator(2), ConvexCondition::mv_eq(), grid);
  CHECK(q.verdict == Verdict::Violated);

  std::vector<Point> xs;
  for (double x : {-4.0, -2.0, -1.0, -0.5, -0.1}) xs.push_back(point({x}));
  const auto es = check_convex_conditions(phi_b(1), ConvexCondition::es_sufficient(), xs);
  CHECK(es.verdict == Verdict::HoldsOnProbes);
  CHECK(es.measurements["min_margin"].get<double>() >= -1e-12);

  std::vector<Point> pos;
  for (double a : {0.5, 1.0, 3.0})
    for (double b : {0.2, 2.0}) pos.push_back(point({a, b}));
  const auto sep = separable({psi_b(1.0), psi_b(0.5)});
  CHECK(check_convex_conditions(sep, ConvexCondition::mixed_hom(1.0, {1, 2}), pos).verdict == Verdict::HoldsOnProbes);
  CHECK(check_convex_conditions(exp_generator(2), ConvexCondition::mixed_hom(1.0, {1, 2}), pos).verdict ==
        Verdict::Violated);
}

TEST_CASE("phi losses for the center of symmetry") {
  const auto gap = Distribution::discrete({{-1, 0.5}, {1, 0.5}});
  const auto r = check_phi_symmetric(absolute_phi(), gap, {{0.5, 0.0}, {0.9, 0.2}});
  CHECK(r.verdict == Verdict::Violated);
  const auto full = Distribution::discrete({{-1, 0.25}, {0, 0.5}, {1, 0.25}});
  CHECK(check_phi_symmetric(squared_phi(), full, {{0.5, 0.0}, {1.5, 1.0}}).verdict == Verdict::HoldsOnProbes);
  CHECK(code_of([] { check_phi_symmetric(absolute_phi(), kSkew, {{1, 0}}); }) == ErrorCode::Precondition);
}

TEST_CASE("separability") {
  const auto t = Functional::ratio({id_fn(), sq_fn()}, one_fn());
  auto cfg = cube_config(2, -2, 3, 21);
  const auto ok = check_separability(bregman_ratio_multi({id_fn(), sq_fn()}, one_fn()), t, {kN, kSkew}, cfg);
  CHECK(ok.verdict == Verdict::HoldsOnProbes);
  const auto bad = check_separability(bregman_general({id_fn(), sq_fn()}, one_fn(), exp_generator(2)), t, {kN}, cfg);
  CHECK(bad.verdict == Verdict::Violated);
  CHECK(code_of([&] { check_separability(mean_score(), Functional::mean(), {kN}, cube_config(1, -1, 1, 5)); }) ==
        ErrorCode::Precondition);
}

TEST_CASE("expected score decreases along mixture paths toward the truth") {
  auto cfg = cube_config(1, -3, 3, 61);
  const auto r = check_mixture_path(asym_squared(0.7), Functional::expectile(0.7), kN, kSkew, 21, cfg);
  CHECK(r.verdict == Verdict::HoldsOnProbes);
}

TEST_CASE("reports are reproducible") {
  auto cfg = cube_config(2, -2, 3, 21);
  cfg.rng_seed = 11;
  const auto a = check_order_sensitivity(mv_homogeneous(), Functional::mean_variance(), OrderNotion::line_segments(), {kN}, cfg);
  const auto b = check_order_sensitivity(mv_homogeneous(), Functional::mean_variance(), OrderNotion::line_segments(), {kN}, cfg);
  CHECK(a.to_json().dump() == b.to_json().dump());
}
