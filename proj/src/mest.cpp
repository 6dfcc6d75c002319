#include "elicit/mest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "elicit/error.hpp"
#include "elicit/rng.hpp"

namespace elicit {
namespace {

constexpr double kInfty = std::numeric_limits<double>::infinity();

// Neumaier-compensated sum; keeps flat stretches of empirical scores flat.
class Accumulator {
 public:
  void add(double v) {
    const double t = sum_ + v;
    comp_ += std::fabs(sum_) >= std::fabs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double draw(const Distribution& F, Rng& rng) {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, FiniteDiscrete>) {
          const double u = rng.uniform();
          double cum = 0.0;
          for (const auto& a : d.atoms) {
            cum += a.weight;
            if (u < cum) return a.value;
          }
          return d.atoms.back().value;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return d.mu + d.sigma * rng.normal();
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return d.a + (d.b - d.a) * rng.uniform();
        } else {
          return rng.uniform() < d.lambda ? draw(*d.right, rng) : draw(*d.left, rng);
        }
      },
      F.variant());
}

using Objective = std::function<double(const Point&)>;

struct Problem {
  int k = 1;
  const ActionDomain* domain = nullptr;
  Objective f;
  std::vector<double> kinks;  // sorted; candidate ends of flat stretches
  std::vector<bool> snap;     // coordinates whose score kinks at x_c = y
  std::vector<std::pair<double, double>> box;
  std::vector<bool> free_lo, free_hi;  // box face is data-derived, not a domain bound
};

double flat_tol(double v) { return 1e-12 * std::max(1.0, std::fabs(v)); }

double golden(const std::function<double(double)>& g, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = g(c), fd = g(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = g(d);
    }
  }
  return fc <= fd ? c : d;
}

// Leftmost kink in [lo, x] whose value stays within the flat tolerance of g(x).
double snap_left(const std::function<double(double)>& g, const std::vector<double>& kinks, double lo, double x) {
  const double gx = g(x);
  auto first = std::lower_bound(kinks.begin(), kinks.end(), lo);
  auto last = std::upper_bound(kinks.begin(), kinks.end(), x);
  // g is non-increasing towards the flat stretch, so the predicate is monotone
  auto it = std::partition_point(first, last, [&](double v) { return !(g(v) <= gx + flat_tol(gx)); });
  if (it == last) return x;
  return *it;
}

Point minimize(Problem& p, const FitOptions& o) {
  const int k = p.k;
  const int n = o.grid_points > 0 ? o.grid_points : (k == 1 ? 201 : k == 2 ? 61 : 21);
  if (n < 3) fail(ErrorCode::Precondition, "fit needs at least 3 grid points per coordinate");
  std::size_t total = 1;
  for (int c = 0; c < k; ++c) total *= static_cast<std::size_t>(n);

  auto at = [&](std::size_t flat) {
    Point x(k);
    for (int c = 0; c < k; ++c) {
      const int i = static_cast<int>(flat % static_cast<std::size_t>(n));
      flat /= static_cast<std::size_t>(n);
      const auto [lo, hi] = p.box[static_cast<std::size_t>(c)];
      x(c) = i == n - 1 ? hi : lo + i * (hi - lo) / (n - 1);
    }
    return x;
  };

  std::vector<double> vals(total);
  std::size_t best = total;
  for (int expansion = 0;; ++expansion) {
    best = total;
    for (std::size_t i = 0; i < total; ++i) {
      vals[i] = p.f(at(i));
      if (vals[i] == -kInfty) fail(ErrorCode::Diverged, "empirical score is -inf at " + format_point(at(i)));
      if (std::isnan(vals[i]) || vals[i] == kInfty) continue;
      if (best == total || vals[i] < vals[best]) best = i;
    }
    if (best == total) fail(ErrorCode::Diverged, "empirical score is not finite anywhere on the search grid");
    bool grown = false;
    std::size_t flat = best;
    for (int c = 0; c < k; ++c) {
      const int i = static_cast<int>(flat % static_cast<std::size_t>(n));
      flat /= static_cast<std::size_t>(n);
      auto& [lo, hi] = p.box[static_cast<std::size_t>(c)];
      const double w = hi - lo;
      const auto& iv = p.domain->box()[static_cast<std::size_t>(c)];
      if (i == 0 && p.free_lo[static_cast<std::size_t>(c)]) {
        lo -= w;
        if (lo <= iv.lo) {
          lo = iv.lo_open ? iv.lo + 1e-9 * std::max(1.0, std::fabs(iv.lo)) : iv.lo;
          p.free_lo[static_cast<std::size_t>(c)] = false;
        }
        grown = true;
      }
      if (i == n - 1 && p.free_hi[static_cast<std::size_t>(c)]) {
        hi += w;
        if (hi >= iv.hi) {
          hi = iv.hi_open ? iv.hi - 1e-9 * std::max(1.0, std::fabs(iv.hi)) : iv.hi;
          p.free_hi[static_cast<std::size_t>(c)] = false;
        }
        grown = true;
      }
    }
    if (!grown) break;
    if (expansion == o.max_expansions)
      fail(ErrorCode::Diverged, "minimum keeps running off the search region near " + format_point(at(best)) +
                                    "; the empirical score looks unbounded below");
  }

  Point x = at(best);
  double fx = vals[best];
  const int sweeps = k == 1 ? 1 : o.sweeps;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int c = 0; c < k; ++c) {
      const auto [blo, bhi] = p.box[static_cast<std::size_t>(c)];
      const double step = (bhi - blo) / (n - 1);
      auto [flo, fhi] = p.domain->feasible_range(x, c);
      double a = std::max({blo, flo, x(c) - step});
      double b = std::min({bhi, fhi, x(c) + step});
      if (!(b > a)) continue;
      auto g = [&](double t) {
        Point y = x;
        y(c) = t;
        return p.f(y);
      };
      double t = golden(g, a, b, o.tol);
      double ft = g(t);
      if (ft <= fx) {
        x(c) = t;
        fx = ft;
      }
      if (p.snap[static_cast<std::size_t>(c)] && !p.kinks.empty()) {
        double left = a;
        if (k == 1) {
          // walk the grid left across a flat stretch
          std::size_t i = best;
          while (i > 0 && vals[i - 1] <= fx + flat_tol(fx)) --i;
          left = std::max(blo, at(i)(0) - step);
        }
        const double s = snap_left(g, p.kinks, left, x(c));
        const double fs = g(s);
        if (fs <= fx + flat_tol(fx)) {
          x(c) = s;
          fx = std::min(fx, fs);
        }
      }
    }
  }
  return x;
}

Problem make_problem(const Score& s, const ActionDomain& domain, double ylo, double yhi, const FitOptions& o) {
  const int k = s.dim();
  if (domain.dim() != k) fail(ErrorCode::Precondition, "fit: domain and score differ in dimension");
  Problem p;
  p.k = k;
  p.domain = &domain;
  p.snap.assign(static_cast<std::size_t>(k), false);
  p.box.resize(static_cast<std::size_t>(k));
  p.free_lo.assign(static_cast<std::size_t>(k), true);
  p.free_hi.assign(static_cast<std::size_t>(k), true);
  const double pad = std::max(1.0, yhi - ylo);
  for (int c = 0; c < k; ++c) {
    const auto uc = static_cast<std::size_t>(c);
    if (!o.box.empty()) {
      if (o.box.size() != static_cast<std::size_t>(k) || !(o.box[uc].second > o.box[uc].first))
        fail(ErrorCode::Precondition, "fit: explicit search box is malformed");
      p.box[uc] = o.box[uc];
      p.free_lo[uc] = p.free_hi[uc] = false;
      continue;
    }
    double lo = ylo - pad, hi = yhi + pad;
    const auto& iv = domain.box()[uc];
    if (iv.lo >= lo) {
      lo = iv.lo_open ? iv.lo + 1e-9 * std::max(1.0, std::fabs(iv.lo)) : iv.lo;
      p.free_lo[uc] = false;
    }
    if (iv.hi <= hi) {
      hi = iv.hi_open ? iv.hi - 1e-9 * std::max(1.0, std::fabs(iv.hi)) : iv.hi;
      p.free_hi[uc] = false;
    }
    if (!(hi > lo)) {
      // data range misses the domain: search a unit window inside it
      lo = std::isfinite(iv.lo) ? iv.lo + 1e-9 * std::max(1.0, std::fabs(iv.lo)) : iv.hi - pad;
      hi = std::isfinite(iv.hi) ? iv.hi - 1e-9 * std::max(1.0, std::fabs(iv.hi)) : iv.lo + pad;
      p.free_lo[uc] = !std::isfinite(iv.lo);
      p.free_hi[uc] = !std::isfinite(iv.hi);
    }
    p.box[uc] = {lo, hi};
  }
  // coordinates at which y -> S(x, y) kinks exactly at y = x_c
  Point probe(k);
  for (int c = 0; c < k; ++c) probe(c) = 0.5 * (p.box[static_cast<std::size_t>(c)].first + p.box[static_cast<std::size_t>(c)].second) + 0.1 * (c + 1);
  const auto bps = s.breakpoints(probe);
  for (int c = 0; c < k; ++c)
    p.snap[static_cast<std::size_t>(c)] = std::find(bps.begin(), bps.end(), probe(c)) != bps.end();
  return p;
}

bool admissible(const Score& s, const ActionDomain& domain, const Point& x) {
  return domain.contains(x) && s.domain().contains(x);
}

}  // namespace

Sample sample(const Distribution& F, int n, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::Precondition, "sample size must be at least 1");
  Rng rng(seed);
  Sample out;
  out.seed = seed;
  out.source = F.literal();
  out.observations.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.observations.push_back(draw(F, rng));
  return out;
}

Point fit(const Score& s, const ActionDomain& domain, const std::vector<double>& ys, const FitOptions& opts) {
  if (ys.empty()) fail(ErrorCode::Precondition, "fit needs at least one observation");
  for (double y : ys)
    if (!std::isfinite(y)) fail(ErrorCode::Precondition, "observations must be finite");
  const auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
  Problem p = make_problem(s, domain, *mn, *mx, opts);
  p.kinks = ys;
  std::sort(p.kinks.begin(), p.kinks.end());
  p.kinks.erase(std::unique(p.kinks.begin(), p.kinks.end()), p.kinks.end());
  const double inv_n = 1.0 / static_cast<double>(ys.size());
  p.f = [&](const Point& x) {
    if (!admissible(s, domain, x)) return kInfty;
    BoundScore b;
    try {
      b = s.bind_unchecked(x);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DomainViolation) return kInfty;
      throw;
    }
    Accumulator acc;
    for (double y : ys) acc.add(b(y));
    return acc.value() * inv_n;
  };
  return minimize(p, opts);
}

Point fit(const Score& s, const ActionDomain& domain, const Sample& smp, const FitOptions& opts) {
  return fit(s, domain, smp.observations, opts);
}

Point fit_population(const Score& s, const ActionDomain& domain, const Distribution& F, const FitOptions& opts) {
  const auto [lo, hi] = F.effective_support();
  Problem p = make_problem(s, domain, lo, hi, opts);
  p.kinks = F.atom_values();
  p.f = [&](const Point& x) {
    if (!admissible(s, domain, x)) return kInfty;
    try {
      return expected_score(s, x, F);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DomainViolation) return kInfty;
      throw;
    }
  };
  return minimize(p, opts);
}

// --- experiments ------------------------------------------------------------------

namespace {

std::string csv_point_header(const std::string& name, int k) {
  if (k == 1) return name;
  std::string out;
  for (int c = 0; c < k; ++c) out += (c ? "," : "") + name + "." + std::to_string(c + 1);
  return out;
}

std::string csv_point(const Point& x) {
  std::string out;
  for (Eigen::Index c = 0; c < x.size(); ++c) out += (c ? "," : "") + format_number(x(c));
  return out;
}

const char* preference(double diff, double tol) {
  if (diff < -tol) return "a";
  if (diff > tol) return "b";
  return "tie";
}

}  // namespace

ExperimentResult consistency_experiment(const Score& s, const Functional& t, const Distribution& F,
                                        const std::vector<int>& ns, int reps, std::uint64_t seed,
                                        const FitOptions& opts, double slack) {
  if (reps < 1) fail(ErrorCode::Precondition, "reps must be at least 1");
  if (ns.empty()) fail(ErrorCode::Precondition, "ns must not be empty");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 1) fail(ErrorCode::Precondition, "sample sizes must be positive");
    if (i && ns[i] <= ns[i - 1]) fail(ErrorCode::Precondition, "ns must be increasing");
  }
  if (!(slack >= 1.0)) fail(ErrorCode::Precondition, "slack must be at least 1");
  if (s.dim() != t.output_dim()) fail(ErrorCode::Precondition, "score and functional differ in dimension");

  ExperimentResult res;
  res.score = s.describe();
  res.functional = t.name();
  res.distribution = F.literal();
  res.truth = evaluate_functional(t, F);
  res.slack = slack;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    ExperimentAggregate agg;
    agg.n = ns[i];
    Accumulator acc;
    for (int r = 0; r < reps; ++r) {
      ExperimentRow row;
      row.n = ns[i];
      row.rep = r;
      row.seed = derive_seed(seed, {i, static_cast<std::uint64_t>(r)});
      row.estimate = fit(s, s.domain(), sample(F, ns[i], row.seed), opts);
      row.error = (row.estimate - res.truth).norm();
      acc.add(row.error);
      agg.max_error = std::max(agg.max_error, row.error);
      res.rows.push_back(std::move(row));
    }
    agg.mean_error = acc.value() / reps;
    res.aggregates.push_back(agg);
  }
  bool trend = true;
  for (std::size_t i = 1; i < res.aggregates.size(); ++i)
    if (res.aggregates[i].mean_error > slack * res.aggregates[i - 1].mean_error) trend = false;
  res.verdict = trend ? "consistent-trend" : "no-trend";
  return res;
}

std::string ExperimentResult::to_csv() const {
  std::ostringstream os;
  os << "n,rep,seed," << csv_point_header("estimate", static_cast<int>(truth.size())) << ",error\n";
  for (const auto& r : rows)
    os << r.n << ',' << r.rep << ',' << r.seed << ',' << csv_point(r.estimate) << ',' << format_number(r.error)
       << '\n';
  return os.str();
}

Json ExperimentResult::to_json() const {
  Json j;
  j["experiment"] = "consistency";
  j["score"] = score;
  j["functional"] = functional;
  j["distribution"] = distribution;
  j["truth"] = json_point(truth);
  Json aggs = Json::array();
  for (const auto& a : aggregates)
    aggs.push_back({{"n", a.n}, {"mean_error", json_number(a.mean_error)}, {"max_error", json_number(a.max_error)}});
  j["aggregates"] = std::move(aggs);
  j["slack"] = json_number(slack);
  j["verdict"] = verdict;
  j["notes"] = Json::array(
      {"uniform convergence of the empirical score is not verified; only the estimates' trend is observed"});
  return j;
}

RankingResult ranking_experiment(const Score& s1, const Score& s2, const Functional& t, const Distribution& F,
                                 const Point& forecast_a, const Point& forecast_b, int n, int reps,
                                 std::uint64_t seed) {
  if (reps < 1) fail(ErrorCode::Precondition, "reps must be at least 1");
  if (n < 1) fail(ErrorCode::Precondition, "sample size must be at least 1");
  RankingResult res;
  res.score1 = s1.describe();
  res.score2 = s2.describe();
  res.functional = t.name();
  res.distribution = F.literal();
  res.truth = evaluate_functional(t, F);
  res.forecast_a = forecast_a;
  res.forecast_b = forecast_b;
  res.n = n;

  auto pop = [&](const Score& s, double& diff) {
    const double ea = expected_score(s, forecast_a, F);
    const double eb = expected_score(s, forecast_b, F);
    diff = ea - eb;
    return 1e-12 * (1.0 + std::fabs(ea) + std::fabs(eb));
  };
  const double tol1 = pop(s1, res.population_diff1);
  const double tol2 = pop(s2, res.population_diff2);
  res.preferred1 = preference(res.population_diff1, tol1);
  res.preferred2 = preference(res.population_diff2, tol2);
  res.population_disagree =
      res.preferred1 != "tie" && res.preferred2 != "tie" && res.preferred1 != res.preferred2;

  const auto a1 = s1.bind(forecast_a), b1 = s1.bind(forecast_b);
  const auto a2 = s2.bind(forecast_a), b2 = s2.bind(forecast_b);
  int disagreements = 0;
  for (int r = 0; r < reps; ++r) {
    RankingRow row;
    row.rep = r;
    row.seed = derive_seed(seed, {static_cast<std::uint64_t>(r)});
    const auto smp = sample(F, n, row.seed);
    Accumulator sa1, sb1, sa2, sb2;
    for (double y : smp.observations) {
      sa1.add(a1(y));
      sb1.add(b1(y));
      sa2.add(a2(y));
      sb2.add(b2(y));
    }
    const double m1a = sa1.value() / n, m1b = sb1.value() / n, m2a = sa2.value() / n, m2b = sb2.value() / n;
    row.diff1 = m1a - m1b;
    row.diff2 = m2a - m2b;
    const std::string p1 = preference(row.diff1, 1e-12 * (1.0 + std::fabs(m1a) + std::fabs(m1b)));
    const std::string p2 = preference(row.diff2, 1e-12 * (1.0 + std::fabs(m2a) + std::fabs(m2b)));
    row.disagree = p1 != "tie" && p2 != "tie" && p1 != p2;
    disagreements += row.disagree ? 1 : 0;
    res.rows.push_back(row);
  }
  res.disagreement_fraction = static_cast<double>(disagreements) / reps;
  return res;
}

std::string RankingResult::to_csv() const {
  std::ostringstream os;
  os << "rep,seed,diff_score1,diff_score2,disagree\n";
  for (const auto& r : rows)
    os << r.rep << ',' << r.seed << ',' << format_number(r.diff1) << ',' << format_number(r.diff2) << ','
       << (r.disagree ? 1 : 0) << '\n';
  return os.str();
}

Json RankingResult::to_json() const {
  Json j;
  j["experiment"] = "ranking";
  j["score1"] = score1;
  j["score2"] = score2;
  j["functional"] = functional;
  j["distribution"] = distribution;
  j["truth"] = json_point(truth);
  j["forecast_a"] = json_point(forecast_a);
  j["forecast_b"] = json_point(forecast_b);
  j["n"] = n;
  j["reps"] = rows.size();
  j["population"] = {{"diff_score1", json_number(population_diff1)},
                     {"diff_score2", json_number(population_diff2)},
                     {"preferred_score1", preferred1},
                     {"preferred_score2", preferred2},
                     {"disagree", population_disagree}};
  j["disagreement_fraction"] = json_number(disagreement_fraction);
  return j;
}

}  // namespace elicit
