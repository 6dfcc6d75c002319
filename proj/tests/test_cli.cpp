#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "elicit/cli.hpp"
#include "elicit/error.hpp"
#include "elicit/literals.hpp"
#include "elicit/report.hpp"

using namespace elicit;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::UsageError;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

Dataset data_of(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in);
}

RunConfig config_of(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

CommandOptions csv_options() {
  CommandOptions o;
  o.format = OutputFormat::Csv;
  return o;
}

CommandOptions seeded(std::uint64_t seed) {
  CommandOptions o;
  o.seed = seed;
  return o;
}

int run_args(std::vector<std::string> args, std::string& out, std::string& err) {
  std::ostringstream o, e;
  const int rc = run(args, o, e);
  out = o.str();
  err = e.str();
  return rc;
}

}  // namespace

TEST_CASE("distribution literals") {
  CHECK(parse_distribution("discrete: 0:0.5, 1:0.5") == Distribution::discrete({{0, 0.5}, {1, 0.5}}));
  CHECK(parse_distribution(" normal : 1 , 2 ") == Distribution::normal(1, 2));
  CHECK(parse_distribution("uniform:-1,1") == Distribution::uniform(-1, 1));
  const auto m = parse_distribution("mix: 0.25 | discrete: 0:1 | discrete: 1:1");
  CHECK(m == mix(Distribution::point_mass(0), Distribution::point_mass(1), 0.25));
  CHECK(parse_distribution(Distribution::normal(0.5, 3).literal()) == Distribution::normal(0.5, 3));
  CHECK(code_of([] { parse_distribution("normal: 0"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_distribution("poisson: 1"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_distribution("discrete: 0:0.5, 1:0.6"); }) == ErrorCode::ParseError);
}

TEST_CASE("score and functional literals") {
  CHECK(parse_score("pinball:alpha=0.05").functional.name() == Functional::quantile(0.05).name());
  CHECK(parse_score("asym_squared:tau=0.7").score.family() == "asym_squared");
  CHECK(parse_score("huber:k=1.0").functional.kind() == FunctionalKind::CenterOfSymmetry);
  CHECK(parse_score("mean_sq").functional.kind() == FunctionalKind::Mean);
  CHECK(parse_score("mv").score.dim() == 2);
  CHECK(parse_score("mv_hom").score.family() == "mv_hom");
  CHECK(parse_score("var_es:alpha=0.05,phi=psi_b(0.5)").functional.kind() == FunctionalKind::VaREs);
  CHECK(parse_score("var_es_c:alpha=0.05,c=10").score.family() == "var_es_c");
  CHECK(parse_score("bregman:phi=exp").score.family() == "bregman:exp");
  CHECK(parse_functional("ratio:p=y^2,q=y").output_dim() == 1);
  CHECK(parse_functional("moments:k=3").output_dim() == 3);
  CHECK(message_of([] { parse_score("pinbal:alpha=0.1"); }).find("pinbal") != std::string::npos);
  CHECK(message_of([] { parse_score("pinball:alpha=zz"); }).find("zz") != std::string::npos);
  CHECK(code_of([] { parse_score("pinball:alpha=2"); }) == ErrorCode::UsageError);
}

TEST_CASE("datasets") {
  const auto d = data_of("id,y,A,B\n1,0.5,0,1\n2,1.5,1,1\n3,2,2,1\n");
  CHECK(d.rows() == 3);
  CHECK(d.names == std::vector<std::string>{"A", "B"});
  CHECK(d.dim() == 1);
  const auto v = data_of("id,y,a.var,a.es,b.var,b.es\nt1,-1,-1,-2,-2,-3\n");
  CHECK(v.dim() == 2);
  CHECK(v.forecasts[1][0](1) == -3.0);
  CHECK(data_of(write_dataset(v)).forecasts == v.forecasts);
  CHECK(data_of(write_dataset(d)).y == d.y);
  std::string rows = "id,y,A\n";
  for (int i = 1; i <= 8; ++i) rows += std::to_string(i) + "," + (i == 7 ? "" : "1") + ",0\n";
  CHECK(message_of([&] { data_of(rows); }).find("row 7") != std::string::npos);
  CHECK(message_of([] { data_of("id,y,A\n1,0\n"); }).find("row 1") != std::string::npos);
  CHECK(message_of([] { data_of("id,y,A\n1,0,x\n2,0,1\n"); }).find("row 1") != std::string::npos);
  CHECK(code_of([] { data_of("id,y,a.var,b\n1,0,1,2\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { data_of("y,id\n"); }) == ErrorCode::ParseError);
}

TEST_CASE("compare") {
  const auto d = data_of("id,y,A,B\n1,0,0,1\n2,0,0,1\n3,0,0,1\n");
  CHECK(cmd_compare(d, "mean_sq", true, OutputFormat::Csv) ==
        "rank,forecaster,mean_score\n1,A,0\n2,B,0.5\n\nfirst,second,mean_difference\nA,B,-0.5\n");
  // ranking survives the equivalent un-normalized score
  CHECK(cmd_compare(d, "mean_sq", false, OutputFormat::Csv).find("1,A,") != std::string::npos);
  const auto hind = data_of("id,y,H\n1,3,3\n2,-1,-1\n");
  CHECK(cmd_compare(hind, "pinball:alpha=0.3", false, OutputFormat::Csv).find("1,H,0\n") != std::string::npos);
  CHECK(code_of([] { cmd_compare(data_of("id,y,A\n"), "mean_sq", false, OutputFormat::Csv); }) == ErrorCode::UsageError);
  const auto bad = data_of("id,y,a.var,a.es\n1,0,0,-1\n2,0,1,2\n");
  const auto msg = message_of([&] { cmd_compare(bad, "var_es:alpha=0.1", false, OutputFormat::Csv); });
  CHECK(msg.find("forecaster a") != std::string::npos);
  CHECK(msg.find("row 2") != std::string::npos);
  const auto j = Json::parse(cmd_compare(d, "mean_sq", true, OutputFormat::Json));
  CHECK(j["ranking"][1]["mean_score"].get<double>() == 0.5);
}

TEST_CASE("config parsing") {
  const auto c = config_of("[score]\nliteral = mean_sq\n; comment\n[check]\ndistributions = normal: 0, 1 ; uniform: 0, 1\n");
  CHECK(c.require("score", "literal") == "mean_sq");
  CHECK(c.list("check", "distributions").size() == 2);
  CHECK(code_of([] { config_of("[bogus]\nx = 1\n"); }) == ErrorCode::UsageError);
  CHECK(code_of([&] { c.require("io", "data"); }) == ErrorCode::UsageError);
}

TEST_CASE("properties command") {
  const auto mean = cmd_properties(
      config_of("[score]\nliteral = mean_sq\n[check]\ndistributions = normal: 0, 1 ; normal: 1, 2\nproperties = metrical\n"), {});
  CHECK_FALSE(mean.violated);
  const auto pin = cmd_properties(
      config_of("[score]\nliteral = pinball:alpha=0.1\n[check]\ndistributions = normal: 0, 1\nproperties = metrical\n"), {});
  CHECK(pin.violated);
  CHECK(pin.files.size() == 1);
  const auto many = cmd_properties(
      config_of("[score]\nliteral = asym_squared:tau=0.6\n[check]\ndistributions = normal: 0, 1 ; uniform: -1, 2\n"
                "properties = consistency ; line_segments ; self_calibration ; orientation ; mixture_path\n"),
      csv_options());
  CHECK_FALSE(many.violated);
  CHECK(many.files.size() == 5);
  CHECK(message_of([] {
          cmd_properties(config_of("[score]\nliteral = bad_score\n[check]\ndistributions = normal: 0, 1\n"), {});
        }).find("bad_score") != std::string::npos);
  CHECK(code_of([] {
          cmd_properties(config_of("[score]\nliteral = mean_sq\n[check]\ndistributions = normal: 0, 1\nproperties = nope\n"), {});
        }) == ErrorCode::UsageError);
}

TEST_CASE("estimate and simulate commands") {
  const auto dir = std::filesystem::temp_directory_path() / "elicit_cli_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "data.csv");
    f << "id,y\n1,4\n2,-1\n3,7\n4,2\n5,0\n";
  }
  auto cfg = config_of("[score]\nliteral = pinball:alpha=0.5\n[io]\ndata = data.csv\n");
  cfg.base_dir = dir.string();
  const auto est = Json::parse(cmd_estimate(cfg, {}).text);
  CHECK(est["estimate"][0].get<double>() == doctest::Approx(2.0).epsilon(1e-9));

  const auto exp = cmd_estimate(
      config_of("[score]\nliteral = mean_sq\n[check]\ndistribution = normal: 0, 1\nns = 10;100\nreps = 3\n"), seeded(5));
  CHECK(exp.files.count("experiment.csv") == 1);
  CHECK(exp.files.count("experiment.json") == 1);
  CHECK(exp.files.at("experiment.csv").rfind("n,rep,seed,estimate,error\n", 0) == 0);

  const auto ve = Json::parse(
      cmd_estimate(config_of("[score]\nliteral = var_es:alpha=0.1\n[check]\ndistribution = normal: 0, 1\nn = 400\n"), {})
          .text);
  for (int c = 0; c < 2; ++c)
    CHECK(std::fabs(ve["estimate"][c].get<double>() - ve["empirical_functional"][c].get<double>()) < 1e-6);

  const std::string sim = "[score]\nliterals = mean_sq ; mean_sq\n[check]\ndistribution = discrete: 0:0.8, 5:0.2\n"
                          "forecast_a = 0\nforecast_b = 1.9\nn = 20\nreps = 4\n";
  const auto s = Json::parse(cmd_simulate(config_of(sim), {}).text);
  CHECK(s["disagreement_fraction"].get<double>() == 0.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("run: exit codes, seeds and determinism") {
  const std::string data = std::string(FIXTURE_DIR) + "/compare.csv";
  std::string out, err, out2;
  CHECK(run_args({"compare", "--data", data, "--score", "mean_sq", "--normalize"}, out, err) == 0);
  CHECK(run_args({"compare", "--data", data, "--score", "nope"}, out, err) == 1);
  CHECK(run_args({"compare", "--data", data}, out, err) == 1);
  CHECK(run_args({"frobnicate"}, out, err) == 1);
  CHECK(run_args({"compare", "--data", data, "--score", "mv_hom"}, out, err) == 1);
  CHECK(run_args({"properties", "--config", std::string(FIXTURE_DIR) + "/pinball_metrical.ini"}, out, err) == 3);

  const auto dir = std::filesystem::temp_directory_path() / "elicit_run_test";
  {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / "neg.csv");
    f << "id,y,a.var,a.es\n1,0,-1,0\n";
  }
  CHECK(run_args({"compare", "--data", (dir / "neg.csv").string(), "--score", "var_es:alpha=0.1"}, out, err) == 2);

  const std::string sim = std::string(FIXTURE_DIR) + "/ranking_witness.ini";
  CHECK(run_args({"simulate", "--config", sim, "--seed", "9", "--out", (dir / "o").string()}, out, err) == 0);
  CHECK(run_args({"--seed", "9", "simulate", "--config", sim}, out2, err) == 0);
  CHECK(out == out2);
  CHECK(std::filesystem::exists(dir / "o" / "ranking.csv"));
  CHECK(run_args({"simulate", "--config", sim, "--seed", "10"}, out2, err) == 0);
  CHECK(out != out2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("ranking witness: the two scores disagree at the population level") {
  const auto cfg = load_config(std::string(FIXTURE_DIR) + "/ranking_witness.ini");
  const auto j = Json::parse(cmd_simulate(cfg, {}).text);
  CHECK(j["population"]["preferred_score1"] == "b");
  CHECK(j["population"]["preferred_score2"] == "a");
  // closed forms: E[x^2/2 - xY] and E[e^x (x - Y - 1)] with E[Y] = 1
  CHECK(j["population"]["diff_score1"].get<double>() == doctest::Approx(0.0 - (1.9 * 1.9 / 2 - 1.9)));
  CHECK(j["population"]["diff_score2"].get<double>() == doctest::Approx(-2.0 - std::exp(1.9) * (1.9 - 2.0)));
  CHECK(j["disagreement_fraction"].get<double>() > 0.0);
}
