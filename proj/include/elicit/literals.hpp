#pragma once

#include <string>
#include <string_view>

#include "elicit/dist.hpp"
#include "elicit/scores.hpp"

namespace elicit {

// `discrete: v1:w1, v2:w2, ...`, `normal: mu, sigma`, `uniform: a, b`,
// `mix: lambda | <left> | <right>`; whitespace is ignored. Throws ParseError.
Distribution parse_distribution(std::string_view text);

// `mean`, `quantile:alpha=a`, `expectile:tau=t`, `mean_variance`, `var_es:alpha=a`,
// `moments:k=2`, `center`, `ratio:p=y^2,q=y` (several numerators joined by '|').
// Throws UsageError naming the offending token.
Functional parse_functional(std::string_view text);

// A score together with the functional it is strictly consistent for.
struct ScoreSpec {
  Score score;
  Functional functional;
};

// `pinball:alpha=a`, `asym_squared:tau=t`, `huber:k=1`, `mean_sq`, `bregman[:phi=exp|quadratic]`,
// `mv[:phi=inverse_variance|quadratic]`,
// `mv_hom`, `var_es:alpha=a[,phi=psi_b(b)]`, `var_es_c:alpha=a,c=10`. Throws UsageError.
ScoreSpec parse_score(std::string_view text);

// Strict decimal real; throws ParseError mentioning `what`.
double parse_real(std::string_view text, std::string_view what);

}  // namespace elicit
