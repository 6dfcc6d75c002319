#include "elicit/props.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "elicit/error.hpp"
#include "elicit/rng.hpp"

namespace elicit {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Point target_value(const Functional& t, const Distribution& F) {
  try {
    return evaluate_functional(t, F);
  } catch (const Error& e) {
    fail(ErrorCode::Precondition, "test distribution " + F.literal() + " rejected: " + e.detail());
  }
}

// Expected score with domain skipping and probe counting.
struct Probe {
  const Score& s;
  const QuadratureOptions& q;
  PropertyReport& rep;

  std::optional<double> operator()(const Point& x, const Distribution& F) const {
    ++rep.probes;
    if (!s.domain().contains(x)) {
      ++rep.skipped;
      return std::nullopt;
    }
    try {
      return expected_score(s, x, F, q);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DomainViolation) throw;
      ++rep.skipped;
      return std::nullopt;
    }
  }
};

// Final verdict: any witness above tol is conclusive; soft failures (ties,
// non-strict steps, empty probe sets) leave the check inconclusive.
void settle(PropertyReport& rep, std::size_t soft) {
  if (!rep.witnesses.empty() && rep.worst_margin() > rep.tol)
    rep.verdict = Verdict::Violated;
  else if (soft > 0 || rep.probes == rep.skipped)
    rep.verdict = Verdict::Inconclusive;
  else
    rep.verdict = Verdict::HoldsOnProbes;
  rep.measurements["soft_failures"] = soft;
}

std::size_t grid_size(const CheckConfig& cfg) {
  std::size_t n = 1;
  for (const auto& a : cfg.grid) n *= static_cast<std::size_t>(a.n);
  return n;
}

std::vector<int> grid_index(const CheckConfig& cfg, std::size_t flat) {
  std::vector<int> idx(cfg.grid.size());
  for (std::size_t c = 0; c < cfg.grid.size(); ++c) {
    idx[c] = static_cast<int>(flat % static_cast<std::size_t>(cfg.grid[c].n));
    flat /= static_cast<std::size_t>(cfg.grid[c].n);
  }
  return idx;
}

std::size_t grid_flat(const CheckConfig& cfg, const std::vector<int>& idx) {
  std::size_t flat = 0;
  for (std::size_t c = cfg.grid.size(); c-- > 0;) flat = flat * static_cast<std::size_t>(cfg.grid[c].n) + idx[c];
  return flat;
}

Point grid_point(const CheckConfig& cfg, const std::vector<int>& idx) {
  Point x(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) x(static_cast<Eigen::Index>(c)) = cfg.grid[c].at(idx[c]);
  return x;
}

// Expected scores on the whole grid, NaN where skipped.
std::vector<double> grid_values(const Probe& probe, const CheckConfig& cfg, const Distribution& F) {
  const std::size_t n = grid_size(cfg);
  std::vector<double> vals(n, kNaN);
  for (std::size_t i = 0; i < n; ++i) {
    if (auto v = probe(grid_point(cfg, grid_index(cfg, i)), F)) vals[i] = *v;
  }
  return vals;
}

// Largest |x_c - t_c| measured in grid steps.
double steps_from(const CheckConfig& cfg, const Point& x, const Point& t) {
  double worst = 0.0;
  for (std::size_t c = 0; c < cfg.grid.size(); ++c) {
    const auto i = static_cast<Eigen::Index>(c);
    worst = std::max(worst, std::fabs(x(i) - t(i)) / cfg.grid[c].step());
  }
  return worst;
}

bool inside_grid(const CheckConfig& cfg, const Point& x, double slack) {
  for (std::size_t c = 0; c < cfg.grid.size(); ++c) {
    const auto i = static_cast<Eigen::Index>(c);
    if (x(i) < cfg.grid[c].lo - slack || x(i) > cfg.grid[c].hi + slack) return false;
  }
  return true;
}

double p_norm(const Point& v, double p) {
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::fabs(v(i)), p);
  return std::pow(s, 1.0 / p);
}

Json base_config(const CheckConfig& cfg, const std::string& score, const std::string& functional) {
  Json j = cfg.echo();
  j["score"] = score;
  j["functional"] = functional;
  return j;
}

void check_family(const Score& s, const Functional& t) {
  if (s.dim() != t.output_dim())
    fail(ErrorCode::Precondition, s.describe() + " and " + t.name() + " differ in dimension");
}

}  // namespace

void CheckConfig::validate(int k) const {
  if (static_cast<int>(grid.size()) != k)
    fail(ErrorCode::Precondition, "grid has " + std::to_string(grid.size()) + " axes, expected " + std::to_string(k));
  for (const auto& a : grid) {
    if (a.n < 3) fail(ErrorCode::Precondition, "grid axes need at least 3 points");
    if (!(a.hi > a.lo) || !std::isfinite(a.lo) || !std::isfinite(a.hi))
      fail(ErrorCode::Precondition, "grid axis bounds must be finite with lo < hi");
  }
  for (const auto& d : directions) {
    if (d.size() != k) fail(ErrorCode::Precondition, "direction of wrong dimension");
    if (std::fabs(d.norm() - 1.0) > 1e-12) fail(ErrorCode::Precondition, "direction " + format_point(d) + " is not unit");
  }
  for (double r : radii) {
    if (!(r > 0.0)) fail(ErrorCode::Precondition, "metrical radii must be positive");
  }
  if (!(tol_eq >= 0.0) || !(tol_mono >= 0.0)) fail(ErrorCode::Precondition, "tolerances must be non-negative");
  if (n_random < 0) fail(ErrorCode::Precondition, "n_random must be non-negative");
}

Json CheckConfig::echo() const {
  Json j;
  Json g = Json::array();
  for (const auto& a : grid) g.push_back({json_number(a.lo), json_number(a.hi), a.n});
  j["grid"] = std::move(g);
  if (directions.empty()) {
    j["directions"] = "axes+random";
    j["n_random"] = n_random;
  } else {
    Json d = Json::array();
    for (const auto& v : directions) d.push_back(json_point(v));
    j["directions"] = std::move(d);
  }
  if (!radii.empty()) {
    Json r = Json::array();
    for (double v : radii) r.push_back(json_number(v));
    j["radii"] = std::move(r);
  }
  j["tol_eq"] = json_number(tol_eq);
  j["tol_mono"] = json_number(tol_mono);
  j["seed"] = rng_seed;
  return j;
}

CheckConfig cube_config(int k, double lo, double hi, int n) {
  CheckConfig cfg;
  cfg.grid.assign(static_cast<std::size_t>(k), GridAxis{lo, hi, n});
  return cfg;
}

std::vector<Point> probe_directions(const CheckConfig& cfg, int k) {
  if (!cfg.directions.empty()) return cfg.directions;
  std::vector<Point> out;
  for (int c = 0; c < k; ++c) {
    for (double sign : {1.0, -1.0}) {
      Point e = Point::Zero(k);
      e(c) = sign;
      out.push_back(e);
    }
  }
  if (k == 1) return out;  // random unit vectors in R^1 are the axes again
  Rng rng(cfg.rng_seed);
  for (int i = 0; i < cfg.n_random; ++i) {
    Point v(k);
    for (int c = 0; c < k; ++c) v(c) = rng.normal();
    out.push_back(v / v.norm());
  }
  return out;
}

std::vector<double> ray_steps(const CheckConfig& cfg) {
  double width = std::numeric_limits<double>::infinity();
  int n = std::numeric_limits<int>::max();
  for (const auto& a : cfg.grid) {
    width = std::min(width, a.hi - a.lo);
    n = std::min(n, a.n);
  }
  const int m = std::max(1, (n - 1) / 2);
  const double r = 0.5 * width;
  std::vector<double> s;
  for (int j = 1; j <= m; ++j) s.push_back(r * j / m);
  return s;
}

std::string OrderNotion::name() const {
  switch (kind) {
    case Kind::Componentwise: return "componentwise";
    case Kind::LineSegments: return "line_segments";
    case Kind::Metrical: return "metrical(" + (std::isinf(p) ? std::string("inf") : format_number(p)) + ")";
  }
  return "?";
}

// --- consistency ----------------------------------------------------------------

PropertyReport check_consistency(const Score& s, const Functional& t, const std::vector<Distribution>& dists,
                                 const CheckConfig& cfg) {
  check_family(s, t);
  const int k = s.dim();
  cfg.validate(k);
  PropertyReport rep;
  rep.property = "consistency";
  rep.tol = cfg.tol_eq;
  rep.config = base_config(cfg, s.describe(), t.name());
  Probe probe{s, cfg.quadrature, rep};
  std::size_t soft = 0;
  Json per = Json::array();

  for (const auto& F : dists) {
    const Point tv = target_value(t, F);
    if (!inside_grid(cfg, tv, 1e-12))
      fail(ErrorCode::Precondition, "T(F) = " + format_point(tv) + " for " + F.literal() + " lies outside the grid");
    if (!s.domain().contains(tv))
      fail(ErrorCode::Precondition, "T(F) = " + format_point(tv) + " for " + F.literal() + " lies outside the score's domain " +
                                        s.domain().describe());
    const double st = expected_score(s, tv, F, cfg.quadrature);
    const auto vals = grid_values(probe, cfg, F);

    std::size_t best = vals.size();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (std::isnan(vals[i])) continue;
      if (best == vals.size() || vals[i] < vals[best]) best = i;
    }
    Json m;
    m["distribution"] = F.literal();
    m["target"] = json_point(tv);
    m["score_at_target"] = json_number(st);
    if (best == vals.size()) {
      ++soft;
      rep.notes.push_back("no grid point inside the action domain for " + F.literal());
      per.push_back(std::move(m));
      continue;
    }
    const Point xb = grid_point(cfg, grid_index(cfg, best));
    m["grid_argmin"] = json_point(xb);
    m["grid_min"] = json_number(vals[best]);
    per.push_back(m);

    const double gap = st - vals[best];
    const double off = steps_from(cfg, xb, tv);
    if (gap > cfg.tol_eq || off > 1.0 + 1e-9) {
      Witness w{gap > cfg.tol_eq ? "lower_score_away_from_target" : "tie_away_from_target", std::max(gap, 0.0), {}};
      w.data["distribution"] = F.literal();
      w.data["target"] = json_point(tv);
      w.data["score_at_target"] = json_number(st);
      w.data["x"] = json_point(xb);
      w.data["score_at_x"] = json_number(vals[best]);
      w.data["grid_steps_from_target"] = json_number(off);
      if (gap <= cfg.tol_eq) ++soft;
      rep.add_witness(std::move(w));
    }

    // strict interior local minima away from T(F)
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (std::isnan(vals[i])) continue;
      const auto idx = grid_index(cfg, i);
      double lowest_nb = std::numeric_limits<double>::infinity();
      bool interior = true;
      for (std::size_t c = 0; c < idx.size() && interior; ++c) {
        for (int d : {-1, 1}) {
          auto nb = idx;
          nb[c] += d;
          if (nb[c] < 0 || nb[c] >= cfg.grid[c].n) {
            interior = false;
            break;
          }
          const double v = vals[grid_flat(cfg, nb)];
          if (std::isnan(v)) {
            interior = false;
            break;
          }
          lowest_nb = std::min(lowest_nb, v);
        }
      }
      if (!interior || !(vals[i] < lowest_nb - cfg.tol_mono)) continue;
      const Point x = grid_point(cfg, idx);
      if (steps_from(cfg, x, tv) <= 1.0 + 1e-9) continue;
      Witness w{"local_minimum_away_from_target", lowest_nb - vals[i], {}};
      w.data["distribution"] = F.literal();
      w.data["target"] = json_point(tv);
      w.data["x"] = json_point(x);
      w.data["score_at_x"] = json_number(vals[i]);
      rep.add_witness(std::move(w));
    }
  }
  rep.measurements["per_distribution"] = std::move(per);
  settle(rep, soft);
  return rep;
}

// --- order sensitivity ---------------------------------------------------------

namespace {

// Walks x_0 = t, x_1, ... away from t; expected scores must not decrease.
struct Chain {
  const CheckConfig& cfg;
  PropertyReport& rep;
  std::size_t& soft;

  void step(const std::optional<double>& prev, const std::optional<double>& cur, const Point& a, const Point& b,
            const Distribution& F, const Point& t, const char* kind) const {
    if (!prev || !cur) return;
    const double diff = *cur - *prev;
    if (diff > cfg.tol_mono) return;
    if (diff >= -cfg.tol_eq) {
      ++soft;
      return;
    }
    Witness w{kind, -diff, {}};
    w.data["distribution"] = F.literal();
    w.data["target"] = json_point(t);
    w.data["nearer"] = json_point(a);
    w.data["farther"] = json_point(b);
    w.data["score_nearer"] = json_number(*prev);
    w.data["score_farther"] = json_number(*cur);
    rep.add_witness(std::move(w));
  }
};

void componentwise(const Probe& probe, const Chain& chain, const CheckConfig& cfg, const Distribution& F,
                   const Point& t) {
  const int k = static_cast<int>(t.size());
  for (int m = 0; m < k; ++m) {
    // base values of the other coordinates: a thinned grid plus t itself
    std::vector<std::vector<double>> others(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
      if (c == m) continue;
      const auto& a = cfg.grid[static_cast<std::size_t>(c)];
      const int stride = std::max(1, (a.n - 1) / 8);
      for (int i = 0; i < a.n; i += stride) others[static_cast<std::size_t>(c)].push_back(a.at(i));
      others[static_cast<std::size_t>(c)].push_back(t(c));
    }
    std::vector<double> up, down;
    const auto& am = cfg.grid[static_cast<std::size_t>(m)];
    // points within half a step of t are not compared with it
    const double near = 0.5 * am.step();
    for (int i = 0; i < am.n; ++i) {
      const double v = am.at(i);
      if (v > t(m) + near) up.push_back(v);
      if (v < t(m) - near) down.push_back(v);
    }
    std::reverse(down.begin(), down.end());

    std::vector<int> pos(static_cast<std::size_t>(k), 0);
    while (true) {
      Point base = t;
      for (int c = 0; c < k; ++c)
        if (c != m) base(c) = others[static_cast<std::size_t>(c)][static_cast<std::size_t>(pos[static_cast<std::size_t>(c)])];
      const auto at_t = probe(base, F);
      for (const auto* side : {&up, &down}) {
        auto prev = at_t;
        Point a = base;
        for (double v : *side) {
          Point b = base;
          b(m) = v;
          const auto cur = probe(b, F);
          chain.step(prev, cur, a, b, F, t, "componentwise_increase_toward_target");
          if (cur) {
            prev = cur;
            a = b;
          }
        }
      }
      int c = 0;
      for (; c < k; ++c) {
        if (c == m) continue;
        auto& p = pos[static_cast<std::size_t>(c)];
        if (++p < static_cast<int>(others[static_cast<std::size_t>(c)].size())) break;
        p = 0;
      }
      if (c == k) break;
    }
  }
}

void along_rays(const Probe& probe, const Chain& chain, const std::vector<Point>& dirs, const std::vector<double>& ss,
                const Distribution& F, const Point& t, const char* kind) {
  const auto at_t = probe(t, F);
  for (const auto& v : dirs) {
    auto prev = at_t;
    Point a = t;
    for (double s : ss) {
      const Point b = t + s * v;
      const auto cur = probe(b, F);
      chain.step(prev, cur, a, b, F, t, kind);
      if (cur) {
        prev = cur;
        a = b;
      }
    }
  }
}

}  // namespace

PropertyReport check_order_sensitivity(const Score& s, const Functional& t, const OrderNotion& notion,
                                       const std::vector<Distribution>& dists, const CheckConfig& cfg) {
  check_family(s, t);
  const int k = s.dim();
  cfg.validate(k);
  if (notion.kind == OrderNotion::Kind::Metrical && !(notion.p >= 1.0))
    fail(ErrorCode::Precondition, "metrical order-sensitivity needs p in [1, inf]");
  PropertyReport rep;
  rep.property = "order_sensitivity:" + notion.name();
  rep.tol = cfg.tol_eq;
  rep.config = base_config(cfg, s.describe(), t.name());
  Probe probe{s, cfg.quadrature, rep};
  std::size_t soft = 0;
  Chain chain{cfg, rep, soft};
  const auto dirs = probe_directions(cfg, k);
  const auto ss = ray_steps(cfg);

  double max_spread = 0.0;
  for (const auto& F : dists) {
    const Point tv = target_value(t, F);
    switch (notion.kind) {
      case OrderNotion::Kind::Componentwise:
        componentwise(probe, chain, cfg, F, tv);
        break;
      case OrderNotion::Kind::LineSegments:
        along_rays(probe, chain, dirs, ss, F, tv, "decrease_along_ray");
        break;
      case OrderNotion::Kind::Metrical: {
        std::vector<Point> units;
        for (const auto& v : dirs) units.push_back(v / p_norm(v, notion.p));
        std::vector<double> radii = cfg.radii.empty() ? ss : cfg.radii;
        std::sort(radii.begin(), radii.end());
        // symmetry on spheres: equidistant forecasts share the expected score
        for (double r : radii) {
          std::optional<std::pair<double, Point>> lo, hi;
          for (const auto& u : units) {
            const Point x = tv + r * u;
            const auto v = probe(x, F);
            if (!v) continue;
            if (!lo || *v < lo->first) lo = std::make_pair(*v, x);
            if (!hi || *v > hi->first) hi = std::make_pair(*v, x);
          }
          if (!lo) continue;
          const double spread = hi->first - lo->first;
          max_spread = std::max(max_spread, spread);
          if (spread > cfg.tol_eq) {
            Witness w{"unequal_on_sphere", spread, {}};
            w.data["distribution"] = F.literal();
            w.data["target"] = json_point(tv);
            w.data["radius"] = json_number(r);
            w.data["x"] = json_point(hi->second);
            w.data["z"] = json_point(lo->second);
            w.data["score_x"] = json_number(hi->first);
            w.data["score_z"] = json_number(lo->first);
            rep.add_witness(std::move(w));
          }
        }
        along_rays(probe, chain, units, radii, F, tv, "decrease_in_radius");
        break;
      }
    }
  }
  if (notion.kind == OrderNotion::Kind::Metrical) {
    rep.measurements["max_sphere_spread"] = json_number(max_spread);
    rep.notes.push_back(
        "symmetry criterion assumes a convex class, mixture-continuity and surjectivity; these are caller-asserted");
    rep.notes.push_back("a violation shows that this score fails, not that no such score exists");
  }
  settle(rep, soft);
  return rep;
}

// --- self-calibration -------------------------------------------------------------

PropertyReport check_self_calibration(const Score& s, const Functional& t, const std::vector<Distribution>& dists,
                                      const std::vector<double>& epsilons, const CheckConfig& cfg) {
  check_family(s, t);
  const int k = s.dim();
  cfg.validate(k);
  for (double e : epsilons)
    if (!(e > 0.0)) fail(ErrorCode::Precondition, "epsilons must be positive");
  PropertyReport rep;
  rep.property = "self_calibration";
  rep.tol = cfg.tol_eq;
  rep.config = base_config(cfg, s.describe(), t.name());
  Probe probe{s, cfg.quadrature, rep};
  std::size_t soft = 0;
  const auto dirs = probe_directions(cfg, k);
  Json curve = Json::array();

  for (const auto& F : dists) {
    const Point tv = target_value(t, F);
    const double st = expected_score(s, tv, F, cfg.quadrature);
    const auto vals = grid_values(probe, cfg, F);
    for (double eps : epsilons) {
      double best = std::numeric_limits<double>::infinity();
      Point arg;
      for (std::size_t i = 0; i < vals.size(); ++i) {
        if (std::isnan(vals[i])) continue;
        const Point x = grid_point(cfg, grid_index(cfg, i));
        if ((x - tv).norm() < eps - 1e-12) continue;
        if (vals[i] < best) {
          best = vals[i];
          arg = x;
        }
      }
      for (const auto& v : dirs) {
        const Point x = tv + eps * v;
        if (!inside_grid(cfg, x, 1e-12)) continue;
        const auto val = probe(x, F);
        if (val && *val < best) {
          best = *val;
          arg = x;
        }
      }
      Json row;
      row["distribution"] = F.literal();
      row["epsilon"] = json_number(eps);
      if (std::isinf(best)) {
        ++soft;
        row["delta"] = nullptr;
        curve.push_back(std::move(row));
        Witness w{"empty_probe_set", 0.0, {}};
        w.data["distribution"] = F.literal();
        w.data["epsilon"] = json_number(eps);
        w.data["reason"] = "no grid point at distance >= epsilon from T(F)";
        rep.add_witness(std::move(w));
        continue;
      }
      const double delta = best - st;
      row["delta"] = json_number(delta);
      row["argmin"] = json_point(arg);
      curve.push_back(std::move(row));
      if (delta > cfg.tol_mono) continue;
      Witness w{"not_well_separated", std::max(-delta, 0.0), {}};
      w.data["distribution"] = F.literal();
      w.data["epsilon"] = json_number(eps);
      w.data["delta"] = json_number(delta);
      w.data["x"] = json_point(arg);
      if (delta >= -cfg.tol_eq) ++soft;
      rep.add_witness(std::move(w));
    }
  }
  rep.measurements["curve"] = std::move(curve);
  settle(rep, soft);
  return rep;
}

// --- orientation ---------------------------------------------------------------------

PropertyReport check_orientation(const IdentificationFn& v, const Functional& t,
                                 const std::vector<Distribution>& dists, const CheckConfig& cfg) {
  if (v.target.kind() != t.kind() || v.target.level() != t.level() || v.target.output_dim() != t.output_dim())
    fail(ErrorCode::Precondition, v.name + " does not identify " + t.name());
  const int k = t.output_dim();
  cfg.validate(k);
  PropertyReport rep;
  rep.property = "orientation";
  rep.tol = cfg.tol_eq;
  rep.config = base_config(cfg, v.name, t.name());
  std::size_t soft = 0;
  const auto dirs = probe_directions(cfg, k);
  const auto ss = ray_steps(cfg);
  for (const auto& F : dists) {
    const Point tv = target_value(t, F);
    for (const auto& d : dirs) {
      for (double s : ss) {
        const Point x = tv + s * d;
        ++rep.probes;
        if (!t.domain().contains(x)) {
          ++rep.skipped;
          continue;
        }
        const double val = d.dot(expected_identification(v, x, F, cfg.quadrature));
        if (val > cfg.tol_mono) continue;
        if (val >= -cfg.tol_eq) {
          ++soft;
          continue;
        }
        Witness w{"wrong_sign", -val, {}};
        w.data["distribution"] = F.literal();
        w.data["target"] = json_point(tv);
        w.data["direction"] = json_point(d);
        w.data["s"] = json_number(s);
        w.data["projected_identification"] = json_number(val);
        rep.add_witness(std::move(w));
      }
    }
  }
  settle(rep, soft);
  return rep;
}

// --- equivariance -----------------------------------------------------------------------

Equivariance Equivariance::translation(Matrix m_obs, Matrix m_action) {
  if (m_obs.rows() != 1 || m_obs.cols() != 1 || m_action.cols() != 1)
    fail(ErrorCode::Precondition, "translation needs a 1x1 observation map and a k x 1 action map");
  Equivariance e;
  e.kind = Kind::Translation;
  e.obs_map = std::move(m_obs);
  e.action_map = std::move(m_action);
  return e;
}

Equivariance Equivariance::homogeneity(double b) {
  Equivariance e;
  e.kind = Kind::Homogeneity;
  e.b = b;
  return e;
}

Equivariance Equivariance::mixed_homogeneity(double b, std::vector<double> degrees) {
  Equivariance e;
  e.kind = Kind::MixedHomogeneity;
  e.b = b;
  e.degrees = std::move(degrees);
  return e;
}

std::string Equivariance::name() const {
  switch (kind) {
    case Kind::Translation: return "translation";
    case Kind::Homogeneity: return "homogeneity(b=" + format_number(b) + ")";
    case Kind::MixedHomogeneity: {
      std::string d;
      for (std::size_t i = 0; i < degrees.size(); ++i) d += (i ? "," : "") + format_number(degrees[i]);
      return "mixed_homogeneity(b=" + format_number(b) + ",degrees=" + d + ")";
    }
  }
  return "?";
}

PropertyReport check_equivariance(const Score& s, const Equivariance& kind, const std::vector<ProbeTriple>& probes,
                                  const std::vector<double>& params, double tol) {
  const int k = s.dim();
  if (kind.kind == Equivariance::Kind::Translation && kind.action_map.rows() != k)
    fail(ErrorCode::Precondition, "translation action map has the wrong dimension");
  if (kind.kind == Equivariance::Kind::MixedHomogeneity && static_cast<int>(kind.degrees.size()) != k)
    fail(ErrorCode::Precondition, "degree vector has the wrong dimension");
  if (kind.kind != Equivariance::Kind::Translation)
    for (double c : params)
      if (!(c > 0.0)) fail(ErrorCode::Precondition, "scales must be positive");

  PropertyReport rep;
  rep.property = "equivariance:" + kind.name();
  rep.tol = tol;
  rep.config["score"] = s.describe();
  rep.config["tol"] = json_number(tol);
  Json ps = Json::array();
  for (double c : params) ps.push_back(json_number(c));
  rep.config[kind.kind == Equivariance::Kind::Translation ? "shifts" : "scales"] = std::move(ps);

  double worst = 0.0, worst_pointwise = 0.0;
  bool first = true;
  for (const auto& pr : probes) {
    for (double c : params) {
      ++rep.probes;
      Point gx, gz;
      double gy = 0.0, lambda = 1.0;
      switch (kind.kind) {
        case Equivariance::Kind::Translation:
          gx = pr.x + kind.action_map.col(0) * c;
          gz = pr.z + kind.action_map.col(0) * c;
          gy = pr.y + kind.obs_map(0, 0) * c;
          break;
        case Equivariance::Kind::Homogeneity:
          gx = c * pr.x;
          gz = c * pr.z;
          gy = c * pr.y;
          lambda = std::pow(c, kind.b);
          break;
        case Equivariance::Kind::MixedHomogeneity: {
          Point scale(k);
          for (int i = 0; i < k; ++i) scale(i) = std::pow(c, kind.degrees[static_cast<std::size_t>(i)]);
          gx = scale.cwiseProduct(pr.x);
          gz = scale.cwiseProduct(pr.z);
          gy = c * pr.y;
          lambda = std::pow(c, kind.b);
          break;
        }
      }
      const auto& dom = s.domain();
      if (!dom.contains(pr.x) || !dom.contains(pr.z) || !dom.contains(gx) || !dom.contains(gz)) {
        ++rep.skipped;
        continue;
      }
      const double sx = s(pr.x, pr.y), sz = s(pr.z, pr.y);
      const double tx = s(gx, gy), tz = s(gz, gy);
      const double scale = std::max({1.0, std::fabs(tx), std::fabs(tz), std::fabs(lambda * sx), std::fabs(lambda * sz)});
      const double dev = std::fabs((tx - tz) - lambda * (sx - sz)) / scale;
      const double pdev = std::max(std::fabs(tx - lambda * sx), std::fabs(tz - lambda * sz)) / scale;
      worst = std::max(worst, dev);
      worst_pointwise = std::max(worst_pointwise, pdev);
      if (first) {
        Json f;
        f["x"] = json_point(pr.x);
        f["y"] = json_number(pr.y);
        f["param"] = json_number(c);
        f["score"] = json_number(sx);
        f["transformed_score"] = json_number(tx);
        rep.measurements["first_probe"] = std::move(f);
        first = false;
      }
      if (dev > tol) {
        Witness w{"difference_not_equivariant", dev, {}};
        w.data["x"] = json_point(pr.x);
        w.data["z"] = json_point(pr.z);
        w.data["y"] = json_number(pr.y);
        w.data["param"] = json_number(c);
        w.data["transformed_difference"] = json_number(tx - tz);
        w.data["scaled_difference"] = json_number(lambda * (sx - sz));
        rep.add_witness(std::move(w));
      }
    }
  }
  rep.measurements["worst_deviation"] = json_number(worst);
  rep.measurements["worst_pointwise_deviation"] = json_number(worst_pointwise);
  settle(rep, 0);
  return rep;
}

PropertyReport check_equivariance(const Score& s, const Equivariance& kind, const std::vector<Point>& points,
                                  const std::vector<double>& obs, const std::vector<double>& params, double tol) {
  std::vector<ProbeTriple> triples;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (double y : obs) triples.push_back({points[i], points[(i + 1) % points.size()], y});
  return check_equivariance(s, kind, triples, params, tol);
}

// --- conditions on generators --------------------------------------------------------------

std::string ConvexCondition::name() const {
  switch (kind) {
    case Kind::MvEq: return "mv_eq";
    case Kind::MvIneq: return "mv_ineq";
    case Kind::EsSufficient: return "es_sufficient";
    case Kind::MixedHom: return "mixed_hom(b=" + format_number(b) + ")";
  }
  return "?";
}

PropertyReport check_convex_conditions(const ConvexSpec& phi, const ConvexCondition& which,
                                       const std::vector<Point>& probes, double tol) {
  PropertyReport rep;
  rep.property = "convex_condition:" + which.name();
  rep.tol = tol;
  rep.config["generator"] = phi.name;
  rep.config["tol"] = json_number(tol);
  rep.config["probes"] = probes.size();
  std::size_t soft = 0;
  const int k = phi.dim();

  auto failure = [&](const Point& at, const std::string& why) {
    ++soft;
    Witness w{"derivative_failure", 0.0, {}};
    w.data["at"] = json_point(at);
    w.data["reason"] = why;
    rep.add_witness(std::move(w));
  };
  auto safe_hessian = [&](const Point& m) -> std::optional<Matrix> {
    try {
      Matrix h = phi.hessian(m);
      if (!h.allFinite()) {
        failure(m, "non-finite Hessian");
        return std::nullopt;
      }
      return h;
    } catch (const Error& e) {
      failure(m, e.detail());
      return std::nullopt;
    }
  };
  auto safe_gradient = [&](const Point& m) -> std::optional<Point> {
    try {
      Point g = phi.gradient(m);
      if (!g.allFinite()) {
        failure(m, "non-finite gradient");
        return std::nullopt;
      }
      return g;
    } catch (const Error& e) {
      failure(m, e.detail());
      return std::nullopt;
    }
  };

  switch (which.kind) {
    case ConvexCondition::Kind::MvEq:
    case ConvexCondition::Kind::MvIneq: {
      if (k != 2) fail(ErrorCode::Precondition, which.name() + " needs a generator on R^2");
      double worst_gap = 0.0;
      double min_slack = std::numeric_limits<double>::infinity();
      for (const auto& m : probes) {
        ++rep.probes;
        if (!phi.contains(m)) {
          ++rep.skipped;
          continue;
        }
        const auto h = safe_hessian(m);
        if (!h) continue;
        const double m1 = m(0), m2 = m(1);
        double lhs, rhs;
        if (which.kind == ConvexCondition::Kind::MvEq) {
          lhs = (*h)(0, 1);
          rhs = -2.0 * m1 * (*h)(1, 1);
        } else {
          lhs = (*h)(0, 0);
          rhs = (m2 + 3.0 * m1 * m1) * (*h)(1, 1);
        }
        const double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
        const double rel = (lhs - rhs) / scale;
        worst_gap = std::max(worst_gap, std::fabs(rel));
        min_slack = std::min(min_slack, rel);
        const double margin = which.kind == ConvexCondition::Kind::MvEq ? std::fabs(rel) : -rel;
        if (margin > tol) {
          Witness w{which.kind == ConvexCondition::Kind::MvEq ? "equality_fails" : "inequality_fails", margin, {}};
          w.data["m"] = json_point(m);
          w.data["lhs"] = json_number(lhs);
          w.data["rhs"] = json_number(rhs);
          rep.add_witness(std::move(w));
        }
      }
      rep.measurements["worst_equality_gap"] = json_number(worst_gap);
      if (which.kind == ConvexCondition::Kind::MvIneq) rep.measurements["min_margin"] = json_number(min_slack);
      break;
    }
    case ConvexCondition::Kind::EsSufficient: {
      if (k != 1) fail(ErrorCode::Precondition, "es_sufficient needs a scalar generator");
      double min_margin = std::numeric_limits<double>::infinity();
      for (const auto& x : probes) {
        if (!phi.contains(x)) {
          rep.probes += probes.size();
          rep.skipped += probes.size();
          continue;
        }
        const auto g = safe_gradient(x);
        const auto h = safe_hessian(x);
        if (!g || !h) continue;
        for (const auto& z : probes) {
          ++rep.probes;
          if (!phi.contains(z)) {
            ++rep.skipped;
            continue;
          }
          const double margin = (*g)(0) + (x(0) - z(0)) * (*h)(0, 0);
          min_margin = std::min(min_margin, margin);
          if (margin < -tol) {
            Witness w{"sufficient_condition_fails", -margin, {}};
            w.data["x"] = json_number(x(0));
            w.data["z"] = json_number(z(0));
            w.data["value"] = json_number(margin);
            rep.add_witness(std::move(w));
          }
        }
      }
      rep.measurements["min_margin"] = json_number(min_margin);
      break;
    }
    case ConvexCondition::Kind::MixedHom: {
      if (static_cast<int>(which.degrees.size()) != k)
        fail(ErrorCode::Precondition, "degree vector has the wrong dimension");
      double worst = 0.0;
      for (double c : which.scales) {
        if (!(c > 0.0)) fail(ErrorCode::Precondition, "scales must be positive");
        Point lam(k);
        for (int i = 0; i < k; ++i) lam(i) = std::pow(c, which.degrees[static_cast<std::size_t>(i)]);
        const double cb = std::pow(c, which.b);
        std::vector<std::pair<Point, Point>> maps;
        for (const auto& x : probes) {
          ++rep.probes;
          const Point lx = lam.cwiseProduct(x);
          if (!phi.contains(x) || !phi.contains(lx)) {
            ++rep.skipped;
            continue;
          }
          const auto g1 = safe_gradient(lx);
          const auto g0 = safe_gradient(x);
          if (!g1 || !g0) continue;
          maps.emplace_back(x, Point(g1->cwiseProduct(lam) - cb * *g0));
        }
        if (maps.empty()) continue;
        for (int i = 0; i < k; ++i) {
          double lo = maps.front().second(i), hi = lo, mag = 1.0;
          Point at_lo = maps.front().first, at_hi = at_lo;
          for (const auto& [x, w] : maps) {
            mag = std::max(mag, std::fabs(w(i)));
            if (w(i) < lo) {
              lo = w(i);
              at_lo = x;
            }
            if (w(i) > hi) {
              hi = w(i);
              at_hi = x;
            }
          }
          const double spread = (hi - lo) / mag;
          worst = std::max(worst, spread);
          if (spread > tol) {
            Witness w{"map_not_constant", spread, {}};
            w.data["c"] = json_number(c);
            w.data["component"] = i;
            w.data["x_low"] = json_point(at_lo);
            w.data["x_high"] = json_point(at_hi);
            w.data["low"] = json_number(lo);
            w.data["high"] = json_number(hi);
            rep.add_witness(std::move(w));
          }
        }
      }
      rep.measurements["worst_spread"] = json_number(worst);
      break;
    }
  }
  settle(rep, soft);
  return rep;
}

PropertyReport check_phi_symmetric(const PhiSpec& phi, const Distribution& F,
                                   const std::vector<std::pair<double, double>>& pairs, double tol) {
  if (!F.is_discrete()) fail(ErrorCode::Precondition, "phi_symmetric sums over a finite discrete support");
  const double center = target_value(Functional::center_of_symmetry(), F)(0);
  PropertyReport rep;
  rep.property = "phi_symmetric:" + phi.name;
  rep.tol = tol;
  rep.config["phi"] = phi.name;
  rep.config["distribution"] = F.literal();
  rep.config["tol"] = json_number(tol);
  auto psi = [&](double x, double u) { return 0.5 * (phi.fn(x - u) + phi.fn(-x - u)); };
  Json masses = Json::array();
  for (const auto& [x, z] : pairs) {
    ++rep.probes;
    if (!(std::fabs(x) > std::fabs(z))) {
      ++rep.skipped;
      continue;
    }
    double mass = 0.0;
    for (const auto& a : F.atoms()) {
      const double u = a.value - center;
      if (psi(x, u) - psi(z, u) > tol) mass += a.weight;
    }
    masses.push_back({json_number(x), json_number(z), json_number(mass)});
    if (mass > 0.0) continue;
    // zero mass: the strictness criterion has nothing to stand on
    Witness w{"zero_mass", 1.0, {}};
    w.data["x"] = json_number(x);
    w.data["z"] = json_number(z);
    w.data["center"] = json_number(center);
    w.data["mass"] = 0.0;
    rep.add_witness(std::move(w));
  }
  rep.measurements["center"] = json_number(center);
  rep.measurements["masses"] = std::move(masses);
  settle(rep, 0);
  return rep;
}

// --- separability -------------------------------------------------------------------------

PropertyReport check_separability(const Score& s, const Functional& t, const std::vector<Distribution>& dists,
                                  const CheckConfig& cfg) {
  if (t.kind() != FunctionalKind::RatioOfExpectations)
    fail(ErrorCode::Precondition, "separability is checked for ratios of expectations");
  const int k = s.dim();
  if (k < 2) fail(ErrorCode::Precondition, "separability needs k >= 2");
  check_family(s, t);
  cfg.validate(k);
  PropertyReport rep;
  rep.property = "separability";
  rep.tol = cfg.tol_eq;
  rep.config = base_config(cfg, s.describe(), t.name());

  std::vector<double> ys;
  for (const auto& F : dists) {
    if (F.is_discrete()) {
      for (const auto& a : F.atoms()) ys.push_back(a.value);
    } else {
      for (double q : {0.1, 0.5, 0.9}) ys.push_back(lower_quantile(F, q));
    }
  }
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  // thinned grid, at most 9 values per axis
  CheckConfig thin = cfg;
  for (auto& a : thin.grid) a.n = std::min(a.n, 9);
  const std::size_t n = grid_size(thin);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point x = grid_point(thin, grid_index(thin, i));
    for (int l = 0; l < k; ++l) {
      for (int r = l + 1; r < k; ++r) {
        Point el = Point::Zero(k), er = Point::Zero(k);
        el(l) = cfg.grid[static_cast<std::size_t>(l)].step();
        er(r) = cfg.grid[static_cast<std::size_t>(r)].step();
        for (double y : ys) {
          ++rep.probes;
          const auto& dom = s.domain();
          if (!dom.contains(x) || !dom.contains(x + el) || !dom.contains(x + er) || !dom.contains(x + el + er)) {
            ++rep.skipped;
            continue;
          }
          const double d = s(x + el + er, y) - s(x + el, y) - s(x + er, y) + s(x, y);
          worst = std::max(worst, std::fabs(d));
          if (std::fabs(d) > cfg.tol_eq) {
            Witness w{"mixed_difference", std::fabs(d), {}};
            w.data["x"] = json_point(x);
            w.data["y"] = json_number(y);
            w.data["coordinates"] = {l, r};
            w.data["steps"] = {json_number(el(l)), json_number(er(r))};
            w.data["difference"] = json_number(d);
            rep.add_witness(std::move(w));
          }
        }
      }
    }
  }
  rep.measurements["worst_mixed_difference"] = json_number(worst);
  settle(rep, 0);
  return rep;
}

// --- mixture paths -------------------------------------------------------------------------

PropertyReport check_mixture_path(const Score& s, const Functional& t, const Distribution& F, const Distribution& G,
                                  int n_grid, const CheckConfig& cfg) {
  check_family(s, t);
  PropertyReport rep;
  rep.property = "mixture_path_descent";
  rep.tol = cfg.tol_eq;
  rep.config["score"] = s.describe();
  rep.config["functional"] = t.name();
  rep.config["F"] = F.literal();
  rep.config["G"] = G.literal();
  rep.config["n_grid"] = n_grid;
  Probe probe{s, cfg.quadrature, rep};
  const auto path = mixture_path(t, G, F, n_grid);
  std::optional<double> prev;
  std::size_t prev_i = 0;
  Json vals = Json::array();
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    const auto cur = probe(path.values[i], F);
    vals.push_back(cur ? json_number(*cur) : Json(nullptr));
    if (!cur) continue;
    if (prev && *cur - *prev > cfg.tol_eq) {
      Witness w{"increase_toward_target", *cur - *prev, {}};
      w.data["lambda_from"] = json_number(path.lambdas[prev_i]);
      w.data["lambda_to"] = json_number(path.lambdas[i]);
      w.data["score_from"] = json_number(*prev);
      w.data["score_to"] = json_number(*cur);
      rep.add_witness(std::move(w));
    }
    prev = cur;
    prev_i = i;
  }
  rep.measurements["path_shape"] = std::string(to_string(path.shape));
  rep.measurements["expected_scores"] = std::move(vals);
  settle(rep, 0);
  return rep;
}

}  // namespace elicit
