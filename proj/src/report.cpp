#include "elicit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace elicit {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::HoldsOnProbes: return "holds_on_probes";
    case Verdict::Violated: return "violated";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

double round12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

Json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return round12(v);
}

Json json_point(const Point& x) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(json_number(x(i)));
  return a;
}

void PropertyReport::add_witness(Witness w) {
  ++witness_count;
  // stable insertion keeps probe order among equal margins
  auto pos = std::upper_bound(witnesses.begin(), witnesses.end(), w.margin,
                              [](double m, const Witness& o) { return m > o.margin; });
  witnesses.insert(pos, std::move(w));
  if (witnesses.size() > kMaxWitnesses) witnesses.pop_back();
}

Json PropertyReport::to_json() const {
  Json j;
  j["property"] = property;
  j["verdict"] = std::string(to_string(verdict));
  j["tol"] = json_number(tol);
  j["probes"] = probes;
  j["skipped"] = skipped;
  j["witness_count"] = witness_count;
  Json ws = Json::array();
  for (const auto& w : witnesses) {
    Json e;
    e["kind"] = w.kind;
    e["margin"] = json_number(w.margin);
    e["data"] = w.data;
    ws.push_back(std::move(e));
  }
  j["witnesses"] = std::move(ws);
  j["measurements"] = measurements;
  j["notes"] = notes;
  j["config"] = config;
  return j;
}

}  // namespace elicit
