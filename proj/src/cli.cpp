#include "elicit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "elicit/error.hpp"
#include "elicit/literals.hpp"
#include "elicit/mest.hpp"
#include "elicit/props.hpp"

namespace elicit {
namespace {

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<double> reals(const std::string& s, char sep, const std::string& what) {
  std::vector<double> out;
  for (const auto& tok : split(s, sep)) {
    try {
      out.push_back(parse_real(tok, what));
    } catch (const Error& e) {
      fail(ErrorCode::UsageError, e.detail());
    }
  }
  return out;
}

int integer(const std::string& s, const std::string& what) {
  const double v = reals(s, ';', what).at(0);
  if (v != std::floor(v) || std::fabs(v) > 2e9) fail(ErrorCode::UsageError, what + " must be an integer");
  return static_cast<int>(v);
}

std::uint64_t seed_of(const RunConfig& cfg, const CommandOptions& opts) {
  if (opts.seed) return *opts.seed;
  if (auto s = cfg.get("check", "seed")) {
    try {
      return std::stoull(*s);
    } catch (const std::exception&) {
      fail(ErrorCode::UsageError, "[check] seed '" + *s + "' is not an unsigned integer");
    }
  }
  return 0;
}

Functional functional_of(const RunConfig& cfg, const ScoreSpec& spec) {
  if (auto f = cfg.get("functional", "literal")) return parse_functional(*f);
  return spec.functional;
}

std::vector<Distribution> distributions(const RunConfig& cfg, const std::string& key) {
  std::vector<Distribution> out;
  for (const auto& lit : cfg.list("check", key)) out.push_back(parse_distribution(lit));
  return out;
}

CheckConfig check_config(const RunConfig& cfg, int k, const Functional& t, const std::vector<Distribution>& dists,
                         std::uint64_t seed) {
  CheckConfig c;
  c.rng_seed = seed;
  if (auto g = cfg.get("check", "grid")) {
    for (const auto& axis : split(*g, '|')) {
      const auto v = reals(axis, ',', "grid");
      if (v.size() != 3) fail(ErrorCode::UsageError, "grid axis '" + axis + "' is not lo,hi,n");
      c.grid.push_back({v[0], v[1], static_cast<int>(v[2])});
    }
    if (c.grid.size() == 1 && k > 1) c.grid.assign(static_cast<std::size_t>(k), c.grid.front());
  } else {
    // targets +/- 3 on every coordinate
    for (int m = 0; m < k; ++m) {
      double lo = kInf, hi = -kInf;
      for (const auto& F : dists) {
        try {
          const double v = evaluate_functional(t, F)(m);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        } catch (const Error&) {
        }
      }
      if (!std::isfinite(lo)) lo = hi = 0.0;
      c.grid.push_back({lo - 3.0, hi + 3.0, k == 1 ? 201 : 61});
    }
  }
  if (auto v = cfg.get("check", "tol_eq")) c.tol_eq = reals(*v, ';', "tol_eq").at(0);
  if (auto v = cfg.get("check", "tol_mono")) c.tol_mono = reals(*v, ';', "tol_mono").at(0);
  if (auto v = cfg.get("check", "n_random")) c.n_random = integer(*v, "n_random");
  if (auto v = cfg.get("check", "radii")) c.radii = reals(*v, ';', "radii");
  try {
    c.validate(k);
  } catch (const Error& e) {
    fail(ErrorCode::UsageError, e.detail());
  }
  return c;
}

std::string file_name(const std::string& property) {
  std::string out;
  for (char ch : property) {
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-') out += ch;
    else if (!out.empty() && out.back() != '_') out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

OrderNotion metrical_notion(const std::string& name) {
  if (name == "metrical") return OrderNotion::metrical(2.0);
  const std::string inner = name.substr(9, name.size() - 10);  // metrical(<p>)
  if (inner == "inf") return OrderNotion::metrical(kInf);
  try {
    return OrderNotion::metrical(parse_real(inner, "p"));
  } catch (const Error&) {
    fail(ErrorCode::UsageError, "property token '" + name + "' has a malformed p");
  }
}

void write_files(const CommandOutput& out, const CommandOptions& opts) {
  if (!opts.out_dir) return;
  std::filesystem::create_directories(*opts.out_dir);
  for (const auto& [name, contents] : out.files) {
    std::ofstream f(std::filesystem::path(*opts.out_dir) / name, std::ios::binary);
    if (!f) fail(ErrorCode::UsageError, "cannot write to '" + *opts.out_dir + "'");
    f << contents;
  }
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::UsageError:
    case ErrorCode::ParseError:
    case ErrorCode::Precondition:
    case ErrorCode::Unsupported:
    case ErrorCode::ConvexityError:
      return 1;
    case ErrorCode::DomainError:
    case ErrorCode::DomainViolation:
    case ErrorCode::NonFiniteIntegrand:
    case ErrorCode::DenominatorError:
    case ErrorCode::NotSymmetric:
    case ErrorCode::PathOutsideDomain:
    case ErrorCode::Diverged:
      return 2;
  }
  return 4;
}

}  // namespace

// --- compare -------------------------------------------------------------------------

std::string cmd_compare(const Dataset& data, const std::string& score_literal, bool normalize, OutputFormat format) {
  if (data.rows() == 0) fail(ErrorCode::UsageError, "dataset is empty");
  if (data.names.empty()) fail(ErrorCode::UsageError, "dataset has no forecaster columns");
  const ScoreSpec spec = parse_score(score_literal);
  const Score s = normalize ? normalize_score(spec.score, spec.functional) : spec.score;
  if (s.dim() != data.dim())
    fail(ErrorCode::UsageError, s.describe() + " takes " + std::to_string(s.dim()) + "-dimensional forecasts, data has " +
                                    std::to_string(data.dim()));

  const std::size_t nf = data.names.size();
  std::vector<double> mean(nf, 0.0);
  for (std::size_t f = 0; f < nf; ++f) {
    double sum = 0.0;
    for (std::size_t r = 0; r < data.rows(); ++r) {
      const Point& x = data.forecasts[f][r];
      if (!s.domain().contains(x))
        fail(ErrorCode::DomainViolation, "forecaster " + data.names[f] + ", row " + std::to_string(r + 1) + " (id " +
                                             data.ids[r] + "): forecast " + format_point(x) + " lies outside " +
                                             s.domain().describe());
      sum += s(x, data.y[r]);
    }
    mean[f] = sum / static_cast<double>(data.rows());
  }
  std::vector<std::size_t> order(nf);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mean[a] < mean[b]; });

  if (format == OutputFormat::Json) {
    Json j;
    j["score"] = s.describe();
    j["normalized"] = normalize;
    j["rows"] = data.rows();
    Json ranking = Json::array();
    for (std::size_t i = 0; i < nf; ++i)
      ranking.push_back({{"rank", i + 1}, {"forecaster", data.names[order[i]]}, {"mean_score", json_number(mean[order[i]])}});
    j["ranking"] = std::move(ranking);
    Json pairs = Json::array();
    for (std::size_t i = 0; i < nf; ++i)
      for (std::size_t l = i + 1; l < nf; ++l)
        pairs.push_back({{"first", data.names[order[i]]},
                         {"second", data.names[order[l]]},
                         {"mean_difference", json_number(mean[order[i]] - mean[order[l]])}});
    j["pairwise"] = std::move(pairs);
    return dump(j);
  }
  std::ostringstream os;
  os << "rank,forecaster,mean_score\n";
  for (std::size_t i = 0; i < nf; ++i) os << i + 1 << ',' << data.names[order[i]] << ',' << format_number(mean[order[i]]) << '\n';
  os << "\nfirst,second,mean_difference\n";
  for (std::size_t i = 0; i < nf; ++i)
    for (std::size_t l = i + 1; l < nf; ++l)
      os << data.names[order[i]] << ',' << data.names[order[l]] << ',' << format_number(mean[order[i]] - mean[order[l]])
         << '\n';
  return os.str();
}

// --- properties ------------------------------------------------------------------------

CommandOutput cmd_properties(const RunConfig& cfg, const CommandOptions& opts) {
  const ScoreSpec spec = parse_score(cfg.require("score", "literal"));
  const Functional t = functional_of(cfg, spec);
  const auto dists = distributions(cfg, "distributions");
  if (dists.empty()) fail(ErrorCode::UsageError, "config needs [check] distributions");
  const std::uint64_t seed = seed_of(cfg, opts);
  const CheckConfig cc = check_config(cfg, spec.score.dim(), t, dists, seed);
  auto props = cfg.list("check", "properties");
  if (props.empty()) props = {"consistency"};

  CommandOutput out;
  std::vector<PropertyReport> reports;
  for (const auto& p : props) {
    if (p == "consistency") reports.push_back(check_consistency(spec.score, t, dists, cc));
    else if (p == "componentwise")
      reports.push_back(check_order_sensitivity(spec.score, t, OrderNotion::componentwise(), dists, cc));
    else if (p == "line_segments")
      reports.push_back(check_order_sensitivity(spec.score, t, OrderNotion::line_segments(), dists, cc));
    else if (p == "metrical" || (p.rfind("metrical(", 0) == 0 && p.back() == ')'))
      reports.push_back(check_order_sensitivity(spec.score, t, metrical_notion(p), dists, cc));
    else if (p == "self_calibration") {
      std::vector<double> eps{0.1, 0.5, 1.0};
      if (auto e = cfg.get("check", "epsilons")) eps = reals(*e, ';', "epsilons");
      reports.push_back(check_self_calibration(spec.score, t, dists, eps, cc));
    } else if (p == "orientation")
      reports.push_back(check_orientation(canonical_identification(t), t, dists, cc));
    else if (p == "separability")
      reports.push_back(check_separability(spec.score, t, dists, cc));
    else if (p == "mixture_path") {
      if (dists.size() < 2) fail(ErrorCode::UsageError, "mixture_path needs two distributions");
      reports.push_back(check_mixture_path(spec.score, t, dists[0], dists[1], 21, cc));
    } else
      fail(ErrorCode::UsageError, "property token '" + p + "' is not a known property");
  }

  const OutputFormat fmt = opts.format.value_or(OutputFormat::Json);
  Json all = Json::array();
  std::ostringstream csv;
  csv << "property,verdict,witnesses,worst_margin\n";
  for (const auto& r : reports) {
    out.violated = out.violated || r.violated();
    const Json j = r.to_json();
    out.files[file_name(r.property) + ".json"] = dump(j);
    all.push_back(j);
    csv << r.property << ',' << to_string(r.verdict) << ',' << r.witness_count << ','
        << format_number(r.worst_margin()) << '\n';
  }
  out.text = fmt == OutputFormat::Json ? dump(all) : csv.str();
  return out;
}

// --- estimate -----------------------------------------------------------------------------

CommandOutput cmd_estimate(const RunConfig& cfg, const CommandOptions& opts) {
  const ScoreSpec spec = parse_score(cfg.require("score", "literal"));
  const Functional t = functional_of(cfg, spec);
  const std::uint64_t seed = seed_of(cfg, opts);
  const OutputFormat fmt = opts.format.value_or(OutputFormat::Json);
  const int k = spec.score.dim();
  CommandOutput out;

  auto single = [&](const std::vector<double>& ys, Json j) {
    const Point est = fit(spec.score, spec.score.domain(), ys);
    j["score"] = spec.score.describe();
    j["functional"] = t.name();
    j["n"] = ys.size();
    j["estimate"] = json_point(est);
    j["empirical_functional"] = json_point(evaluate_functional(t, Distribution::empirical(ys)));
    std::ostringstream csv;
    csv << "score,n";
    for (int c = 0; c < k; ++c) csv << ",estimate" << (k == 1 ? "" : "." + std::to_string(c + 1));
    csv << '\n' << spec.score.describe() << ',' << ys.size();
    for (int c = 0; c < k; ++c) csv << ',' << format_number(est(c));
    csv << '\n';
    out.files["estimate.json"] = dump(j);
    out.files["estimate.csv"] = csv.str();
    out.text = fmt == OutputFormat::Json ? dump(j) : csv.str();
  };

  if (cfg.get("io", "data")) {
    const Dataset d = parse_dataset_file(cfg.path("io", "data"));
    if (d.rows() == 0) fail(ErrorCode::UsageError, "dataset is empty");
    Json j;
    j["source"] = cfg.require("io", "data");
    single(d.y, std::move(j));
    return out;
  }
  const auto dists = distributions(cfg, "distribution");
  if (dists.size() != 1) fail(ErrorCode::UsageError, "estimate needs [io] data or exactly one [check] distribution");
  const Distribution& F = dists.front();
  if (auto ns_text = cfg.get("check", "ns")) {
    std::vector<int> ns;
    for (double v : reals(*ns_text, ';', "ns")) ns.push_back(static_cast<int>(v));
    const int reps = integer(cfg.require("check", "reps"), "reps");
    const auto res = consistency_experiment(spec.score, t, F, ns, reps, seed);
    Json j = res.to_json();
    j["seed"] = seed;
    out.files["experiment.csv"] = res.to_csv();
    out.files["experiment.json"] = dump(j);
    out.text = fmt == OutputFormat::Json ? dump(j) : res.to_csv();
    return out;
  }
  const int n = integer(cfg.require("check", "n"), "n");
  const Sample smp = sample(F, n, seed);
  Json j;
  j["source"] = F.literal();
  j["seed"] = seed;
  j["population_functional"] = json_point(evaluate_functional(t, F));
  single(smp.observations, std::move(j));
  return out;
}

// --- simulate -------------------------------------------------------------------------------

CommandOutput cmd_simulate(const RunConfig& cfg, const CommandOptions& opts) {
  const auto lits = cfg.list("score", "literals");
  if (lits.size() != 2) fail(ErrorCode::UsageError, "simulate needs [score] literals = <score1> ; <score2>");
  const ScoreSpec s1 = parse_score(lits[0]);
  const ScoreSpec s2 = parse_score(lits[1]);
  const Functional t = functional_of(cfg, s1);
  const auto dists = distributions(cfg, "distribution");
  if (dists.size() != 1) fail(ErrorCode::UsageError, "simulate needs exactly one [check] distribution");
  auto forecast = [&](const std::string& key) {
    const auto v = reals(cfg.require("check", key), ',', key);
    Point p(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) p(static_cast<Eigen::Index>(i)) = v[i];
    return p;
  };
  const int n = integer(cfg.require("check", "n"), "n");
  const int reps = integer(cfg.require("check", "reps"), "reps");
  const std::uint64_t seed = seed_of(cfg, opts);
  const auto res =
      ranking_experiment(s1.score, s2.score, t, dists.front(), forecast("forecast_a"), forecast("forecast_b"), n, reps, seed);
  Json j = res.to_json();
  j["seed"] = seed;
  CommandOutput out;
  out.files["ranking.json"] = dump(j);
  out.files["ranking.csv"] = res.to_csv();
  out.text = opts.format.value_or(OutputFormat::Json) == OutputFormat::Json ? dump(j) : res.to_csv();
  return out;
}

// --- entry point --------------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Consistent scoring functions: forecast comparison, property checks, M-estimation", "elicit"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::string out_dir, format;
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
  auto* out_opt = app.add_option("--out", out_dir, "directory for output files");
  auto* fmt_opt = app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::string data_path, score_lit, config_path;
  bool normalize = false;
  auto* compare = app.add_subcommand("compare", "rank forecasters by realized mean score");
  compare->add_option("--data", data_path, "CSV with id,y,<forecaster>... columns")->required();
  compare->add_option("--score", score_lit, "score literal, e.g. pinball:alpha=0.1")->required();
  compare->add_flag("--normalize", normalize, "subtract S(T(delta_y), y) from every score");
  auto* properties = app.add_subcommand("properties", "run property checks from a config");
  auto* estimate = app.add_subcommand("estimate", "fit a score to data or run a consistency experiment");
  auto* simulate = app.add_subcommand("simulate", "forecast-ranking experiment for two scores");
  for (auto* sub : {properties, estimate, simulate}) sub->add_option("--config", config_path, "config file")->required();
  for (auto* sub : {compare, properties, estimate, simulate}) sub->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  CommandOptions opts;
  if (*seed_opt) opts.seed = seed;
  if (*out_opt) opts.out_dir = out_dir;
  if (*fmt_opt) opts.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;

  try {
    CommandOutput res;
    if (*compare) {
      const OutputFormat fmt = opts.format.value_or(OutputFormat::Csv);
      res.text = cmd_compare(parse_dataset_file(data_path), score_lit, normalize, fmt);
      res.files[fmt == OutputFormat::Csv ? "ranking.csv" : "ranking.json"] = res.text;
    } else {
      const RunConfig cfg = load_config(config_path);
      if (*properties) res = cmd_properties(cfg, opts);
      else if (*estimate) res = cmd_estimate(cfg, opts);
      else res = cmd_simulate(cfg, opts);
    }
    write_files(res, opts);
    out << res.text;
    return res.violated ? 3 : 0;
  } catch (const Error& e) {
    err << "elicit: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "elicit: internal error: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace elicit
