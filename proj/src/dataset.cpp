#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include "elicit/cli.hpp"
#include "elicit/error.hpp"
#include "elicit/literals.hpp"

namespace elicit {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string c;
  while (std::getline(ss, c, ',')) out.push_back(trim(c));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void row_error(std::size_t row, const std::string& why) {
  fail(ErrorCode::ParseError, "row " + std::to_string(row) + ": " + why);
}

}  // namespace

Dataset parse_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ParseError, "empty input: missing header");
  const auto header = cells(line);
  if (header.size() < 2 || header[0] != "id" || header[1] != "y")
    fail(ErrorCode::ParseError, "header must start with id,y");

  Dataset d;
  // column -> (forecaster, component)
  std::vector<std::pair<std::size_t, std::size_t>> where;
  std::vector<std::vector<std::string>> comps;
  bool dotted = false;
  for (std::size_t c = 2; c < header.size(); ++c) {
    const auto& h = header[c];
    const auto dot = h.find('.');
    const std::string name = h.substr(0, dot);
    const std::string comp = dot == std::string::npos ? "" : h.substr(dot + 1);
    if (name.empty() || (dot != std::string::npos && comp.empty()))
      fail(ErrorCode::ParseError, "header column '" + h + "' is malformed");
    if (c == 2) dotted = dot != std::string::npos;
    if (dotted != (dot != std::string::npos))
      fail(ErrorCode::ParseError, "header mixes dotted and scalar forecast columns");
    auto it = std::find(d.names.begin(), d.names.end(), name);
    std::size_t f = static_cast<std::size_t>(it - d.names.begin());
    if (it == d.names.end()) {
      d.names.push_back(name);
      comps.emplace_back();
    }
    if (std::find(comps[f].begin(), comps[f].end(), comp) != comps[f].end())
      fail(ErrorCode::ParseError, "header column '" + h + "' is duplicated");
    where.emplace_back(f, comps[f].size());
    comps[f].push_back(comp);
  }
  for (const auto& c : comps) {
    if (c != comps.front())
      fail(ErrorCode::ParseError, "forecasters have inconsistent dimensions or component names");
  }
  if (dotted) d.components = comps.front();
  const int k = d.dim();
  d.forecasts.assign(d.names.size(), {});

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cs = cells(line);
    if (cs.size() != header.size())
      row_error(row, "expected " + std::to_string(header.size()) + " cells, found " + std::to_string(cs.size()));
    if (cs[0].empty()) row_error(row, "missing id");
    if (cs[1].empty()) row_error(row, "missing y");
    d.ids.push_back(cs[0]);
    try {
      d.y.push_back(parse_real(cs[1], "y"));
    } catch (const Error& e) {
      row_error(row, e.detail());
    }
    for (auto& f : d.forecasts) f.push_back(Point::Zero(k));
    for (std::size_t c = 2; c < cs.size(); ++c) {
      const auto [f, m] = where[c - 2];
      if (cs[c].empty()) row_error(row, "missing forecast in column '" + header[c] + "'");
      try {
        d.forecasts[f].back()(static_cast<Eigen::Index>(m)) = parse_real(cs[c], header[c]);
      } catch (const Error& e) {
        row_error(row, e.detail());
      }
    }
  }
  return d;
}

Dataset parse_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::UsageError, "cannot open data file '" + path + "'");
  return parse_dataset(in);
}

std::string write_dataset(const Dataset& d) {
  std::ostringstream os;
  os << "id,y";
  for (const auto& n : d.names) {
    if (d.components.empty()) os << ',' << n;
    else
      for (const auto& c : d.components) os << ',' << n << '.' << c;
  }
  os << '\n';
  for (std::size_t r = 0; r < d.rows(); ++r) {
    os << d.ids[r] << ',' << format_number(d.y[r]);
    for (const auto& f : d.forecasts)
      for (Eigen::Index m = 0; m < f[r].size(); ++m) os << ',' << format_number(f[r](m));
    os << '\n';
  }
  return os.str();
}

}  // namespace elicit
