#include <filesystem>
#include <fstream>
#include <istream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "elicit/cli.hpp"
#include "elicit/error.hpp"

namespace elicit {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& base_dir) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::ParseError, "config line " + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig cfg;
  cfg.base_dir = base_dir;
  for (const auto& [section, body] : tree) {
    if (body.empty()) fail(ErrorCode::ParseError, "config key '" + section + "' is outside any section");
    if (section != "functional" && section != "score" && section != "check" && section != "io")
      fail(ErrorCode::UsageError, "unknown config section [" + section + "]");
    auto& s = cfg.sections[section];
    for (const auto& [key, value] : body) s[key] = trim(value.get_value<std::string>());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::UsageError, "cannot open config file '" + path + "'");
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse_config(in, dir.empty() ? "." : dir);
}

std::optional<std::string> RunConfig::get(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  if (s == sections.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string RunConfig::require(const std::string& section, const std::string& key) const {
  auto v = get(section, key);
  if (!v || v->empty()) fail(ErrorCode::UsageError, "config needs [" + section + "] " + key);
  return *v;
}

std::vector<std::string> RunConfig::list(const std::string& section, const std::string& key) const {
  std::vector<std::string> out;
  const auto v = get(section, key);
  if (!v) return out;
  std::size_t start = 0;
  while (start <= v->size()) {
    const auto pos = v->find(';', start);
    const std::string item = trim(v->substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string RunConfig::path(const std::string& section, const std::string& key) const {
  const std::filesystem::path p = require(section, key);
  return p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).string();
}

}  // namespace elicit
