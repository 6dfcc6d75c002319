#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elicit/dist.hpp"
#include "elicit/report.hpp"
#include "elicit/scores.hpp"

namespace elicit {

struct Sample {
  std::vector<double> observations;
  std::uint64_t seed = 0;
  std::string source;
};

// n draws from F; a pure function of (F, n, seed).
Sample sample(const Distribution& F, int n, std::uint64_t seed);

struct FitOptions {
  int grid_points = 0;  // per coordinate; 0 picks 201 / 61 / 21 for k = 1 / 2 / >= 3
  double tol = 1e-8;    // golden-section tolerance in x
  int sweeps = 3;       // coordinate sweeps for k >= 2
  int max_expansions = 8;
  // Optional explicit search box; otherwise derived from the data and the domain.
  std::vector<std::pair<double, double>> box;
};

// argmin over the domain of the mean score (1/n) sum S(x, Y_i). Grid scan, then
// coordinate-wise golden section. Where the empirical score is flat the
// leftmost minimizer is returned (lower sample quantile for pinball losses).
// Throws Diverged when the score looks unbounded below on the search region.
Point fit(const Score& s, const ActionDomain& domain, const Sample& sample, const FitOptions& opts = {});
Point fit(const Score& s, const ActionDomain& domain, const std::vector<double>& ys, const FitOptions& opts = {});

// Same optimizer on the population objective E_F S(x, Y).
Point fit_population(const Score& s, const ActionDomain& domain, const Distribution& F, const FitOptions& opts = {});

struct ExperimentRow {
  int n = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  Point estimate;
  double error = 0.0;  // Euclidean distance to T(F)
};

struct ExperimentAggregate {
  int n = 0;
  double mean_error = 0.0;
  double max_error = 0.0;
};

struct ExperimentResult {
  std::string score;
  std::string functional;
  std::string distribution;
  Point truth;
  std::vector<ExperimentRow> rows;
  std::vector<ExperimentAggregate> aggregates;
  double slack = 1.5;
  std::string verdict;  // "consistent-trend" or "no-trend"

  std::string to_csv() const;
  Json to_json() const;
};

ExperimentResult consistency_experiment(const Score& s, const Functional& t, const Distribution& F,
                                        const std::vector<int>& ns, int reps, std::uint64_t seed,
                                        const FitOptions& opts = {}, double slack = 1.5);

struct RankingRow {
  int rep = 0;
  std::uint64_t seed = 0;
  double diff1 = 0.0;  // mean S1(a, Y) - mean S1(b, Y)
  double diff2 = 0.0;
  bool disagree = false;
};

struct RankingResult {
  std::string score1;
  std::string score2;
  std::string functional;
  std::string distribution;
  Point truth;
  Point forecast_a;
  Point forecast_b;
  int n = 0;
  // population expected-score differences E S(a, Y) - E S(b, Y)
  double population_diff1 = 0.0;
  double population_diff2 = 0.0;
  std::string preferred1;  // "a", "b" or "tie"
  std::string preferred2;
  bool population_disagree = false;
  std::vector<RankingRow> rows;
  double disagreement_fraction = 0.0;

  std::string to_csv() const;
  Json to_json() const;
};

RankingResult ranking_experiment(const Score& s1, const Score& s2, const Functional& t, const Distribution& F,
                                 const Point& forecast_a, const Point& forecast_b, int n, int reps,
                                 std::uint64_t seed);

}  // namespace elicit
