#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "elicit/types.hpp"

namespace elicit {

// Observations with the forecasts of every forecaster, one row per time point.
struct Dataset {
  std::vector<std::string> ids;
  std::vector<double> y;
  std::vector<std::string> names;       // forecasters in column order
  std::vector<std::string> components;  // dotted suffixes; empty for scalar forecasts
  std::vector<std::vector<Point>> forecasts;  // [forecaster][row]

  int dim() const { return components.empty() ? 1 : static_cast<int>(components.size()); }
  std::size_t rows() const { return y.size(); }
};

// Header `id,y,<name>[.component]...`. Throws ParseError with the data row number
// (1-based, header excluded) for ragged rows, bad cells or inconsistent groups.
Dataset parse_dataset(std::istream& in);
Dataset parse_dataset_file(const std::string& path);
std::string write_dataset(const Dataset& d);

// Flat key-value configuration with [functional], [score], [check] and [io] sections.
struct RunConfig {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string base_dir;  // relative paths in [io] resolve against the config file

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::string require(const std::string& section, const std::string& key) const;
  // ';'-separated list, entries trimmed, empty entries dropped.
  std::vector<std::string> list(const std::string& section, const std::string& key) const;
  std::string path(const std::string& section, const std::string& key) const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(std::istream& in, const std::string& base_dir = ".");

enum class OutputFormat { Json, Csv };

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<OutputFormat> format;
};

// Ranking table of realized mean scores; `normalize` subtracts S(T(delta_y), y).
std::string cmd_compare(const Dataset& data, const std::string& score_literal, bool normalize, OutputFormat format);

// Result text plus whether any property came out violated.
struct CommandOutput {
  std::string text;
  std::map<std::string, std::string> files;  // file name -> contents
  bool violated = false;
};

CommandOutput cmd_properties(const RunConfig& cfg, const CommandOptions& opts);
CommandOutput cmd_estimate(const RunConfig& cfg, const CommandOptions& opts);
CommandOutput cmd_simulate(const RunConfig& cfg, const CommandOptions& opts);

// Full command line (without the program name). Exit codes: 0 success, 1 usage
// or parse error, 2 domain violation, 3 property violated, 4 internal error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace elicit
