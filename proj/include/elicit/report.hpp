#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "elicit/types.hpp"

namespace elicit {

using Json = nlohmann::ordered_json;

enum class Verdict { HoldsOnProbes, Violated, Inconclusive };
std::string_view to_string(Verdict v);

// Numbers go into reports rounded to 12 significant digits so that dumps are
// stable across platforms and runs.
double round12(double v);
Json json_number(double v);
Json json_point(const Point& x);

struct Witness {
  std::string kind;
  double margin = 0.0;  // amount by which the probed inequality fails
  Json data = Json::object();
};

struct PropertyReport {
  static constexpr std::size_t kMaxWitnesses = 25;

  std::string property;
  Verdict verdict = Verdict::Inconclusive;
  double tol = 0.0;
  std::vector<Witness> witnesses;  // largest margins first, capped
  std::size_t witness_count = 0;   // before capping
  std::size_t probes = 0;
  std::size_t skipped = 0;
  Json measurements = Json::object();
  Json config = Json::object();
  std::vector<std::string> notes;

  void add_witness(Witness w);
  bool violated() const { return verdict == Verdict::Violated; }
  double worst_margin() const { return witnesses.empty() ? 0.0 : witnesses.front().margin; }
  Json to_json() const;
};

}  // namespace elicit
