#include "elicit/literals.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>

#include "elicit/error.hpp"

namespace elicit {
namespace {

std::string strip(std::string_view text) {
  std::string out;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// --- distributions: recursive descent over the stripped text ---------------------------

class DistParser {
 public:
  explicit DistParser(std::string text) : s_(std::move(text)) {}

  Distribution parse_all() {
    Distribution d = parse();
    if (pos_ != s_.size()) error("unexpected trailing text '" + s_.substr(pos_) + "'");
    return d;
  }

 private:
  [[noreturn]] void error(const std::string& why) const {
    fail(ErrorCode::ParseError, "distribution literal '" + s_ + "': " + why);
  }

  // Text up to the next '|' (or the end), consumed.
  std::string field() {
    const auto end = s_.find('|', pos_);
    std::string out = s_.substr(pos_, end == std::string::npos ? std::string::npos : end - pos_);
    pos_ = end == std::string::npos ? s_.size() : end;
    return out;
  }

  void expect_bar() {
    if (pos_ >= s_.size() || s_[pos_] != '|') error("expected '|'");
    ++pos_;
  }

  Distribution parse() {
    const auto colon = s_.find(':', pos_);
    if (colon == std::string::npos) error("missing ':' after the kind");
    const std::string kind = s_.substr(pos_, colon - pos_);
    pos_ = colon + 1;
    try {
      if (kind == "mix") {
        const double lambda = parse_real(field(), "mixture weight");
        expect_bar();
        Distribution left = parse();
        expect_bar();
        Distribution right = parse();
        return mix(left, right, lambda);
      }
      const std::string body = field();
      const auto parts = split(body, ',');
      if (kind == "normal" || kind == "uniform") {
        if (parts.size() != 2) error(kind + " takes two parameters");
        const double a = parse_real(parts[0], kind + " parameter");
        const double b = parse_real(parts[1], kind + " parameter");
        return kind == "normal" ? Distribution::normal(a, b) : Distribution::uniform(a, b);
      }
      if (kind == "discrete") {
        std::vector<Atom> atoms;
        double total = 0.0;
        for (const auto& p : parts) {
          const auto c = p.find(':');
          if (c == std::string::npos) error("atom '" + p + "' is not value:weight");
          atoms.push_back({parse_real(p.substr(0, c), "atom value"), parse_real(p.substr(c + 1), "atom weight")});
          total += atoms.back().weight;
        }
        // printed weights carry 12 digits; renormalize sums that are 1 up to that rounding
        if (std::fabs(total - 1.0) <= 1e-9 && total > 0.0)
          for (auto& a : atoms) a.weight /= total;
        return Distribution::discrete(std::move(atoms));
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) throw;
      error(e.detail());
    }
    error("unknown kind '" + kind + "'");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

// --- key=value parameters --------------------------------------------------------------

struct Literal {
  std::string head;
  std::map<std::string, std::string> params;
  std::string text;
};

[[noreturn]] void usage(const Literal& lit, const std::string& token, const std::string& why) {
  fail(ErrorCode::UsageError, "in '" + lit.text + "': token '" + token + "' " + why);
}

// Commas inside parentheses do not separate parameters.
std::vector<std::string> split_params(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Literal parse_literal(std::string_view text, const std::map<std::string, std::vector<std::string>>& allowed,
                      const char* what) {
  Literal lit;
  lit.text = strip(text);
  const auto colon = lit.text.find(':');
  lit.head = lit.text.substr(0, colon);
  const auto it = allowed.find(lit.head);
  if (it == allowed.end()) usage(lit, lit.head, std::string("is not a known ") + what);
  if (colon == std::string::npos) return lit;
  for (const auto& kv : split_params(lit.text.substr(colon + 1))) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) usage(lit, kv, "is not key=value");
    const std::string key = kv.substr(0, eq);
    if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
      usage(lit, key, "is not a parameter of " + lit.head);
    if (lit.params.count(key)) usage(lit, key, "is given twice");
    lit.params[key] = kv.substr(eq + 1);
  }
  return lit;
}

double real_param(const Literal& lit, const std::string& key, std::optional<double> fallback = std::nullopt) {
  const auto it = lit.params.find(key);
  if (it == lit.params.end()) {
    if (fallback) return *fallback;
    usage(lit, key, "is required");
  }
  try {
    return parse_real(it->second, key);
  } catch (const Error&) {
    usage(lit, it->second, "is not a number");
  }
}

NamedFn monomial(const Literal& lit, const std::string& token) {
  if (token == "1") return {"1", [](double) { return 1.0; }};
  if (token == "y") return {"y", [](double y) { return y; }};
  if (token.size() > 2 && token.rfind("y^", 0) == 0) {
    int n = -1;
    const auto* b = token.data() + 2;
    const auto* e = token.data() + token.size();
    const auto r = std::from_chars(b, e, n);
    if (r.ec == std::errc() && r.ptr == e && n >= 0 && n <= 8)
      return {token, [n](double y) { return std::pow(y, n); }};
  }
  usage(lit, token, "is not a monomial 1, y or y^n (n <= 8)");
}

// Runs a catalog constructor, turning argument errors into UsageError.
template <class F>
auto guarded(const Literal& lit, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UsageError) throw;
    fail(ErrorCode::UsageError, "in '" + lit.text + "': " + e.detail());
  }
}

ConvexSpec var_es_generator(const Literal& lit) {
  const auto it = lit.params.find("phi");
  if (it == lit.params.end()) return phi_b(1.0);
  const std::string& v = it->second;
  for (const char* name : {"psi_b(", "phi_b("}) {
    const std::string prefix = name;
    if (v.rfind(prefix, 0) == 0 && v.back() == ')') {
      double b = 0.0;
      try {
        b = parse_real(v.substr(prefix.size(), v.size() - prefix.size() - 1), "b");
      } catch (const Error&) {
        usage(lit, v, "has a non-numeric b");
      }
      return phi_b(b);
    }
  }
  if (v == "log") return phi_b(1.0);
  usage(lit, v, "is not a generator (psi_b(b), phi_b(b) or log)");
}

}  // namespace

double parse_real(std::string_view text, std::string_view what) {
  const std::string s = strip(text);
  double v = 0.0;
  const auto* b = s.data();
  const auto* e = s.data() + s.size();
  const auto r = std::from_chars(b, e, v);
  if (s.empty() || r.ec != std::errc() || r.ptr != e || !std::isfinite(v))
    fail(ErrorCode::ParseError, std::string(what) + ": '" + s + "' is not a finite decimal number");
  return v;
}

Distribution parse_distribution(std::string_view text) {
  std::string s = strip(text);
  if (s.empty()) fail(ErrorCode::ParseError, "empty distribution literal");
  return DistParser(std::move(s)).parse_all();
}

Functional parse_functional(std::string_view text) {
  static const std::map<std::string, std::vector<std::string>> allowed{
      {"mean", {}},         {"quantile", {"alpha"}},    {"expectile", {"tau"}}, {"mean_variance", {}},
      {"var_es", {"alpha"}}, {"moments", {"k"}},         {"center", {}},         {"ratio", {"p", "q"}}};
  const Literal lit = parse_literal(text, allowed, "functional");
  return guarded(lit, [&]() -> Functional {
    if (lit.head == "mean") return Functional::mean();
    if (lit.head == "quantile") return Functional::quantile(real_param(lit, "alpha"));
    if (lit.head == "expectile") return Functional::expectile(real_param(lit, "tau"));
    if (lit.head == "mean_variance") return Functional::mean_variance();
    if (lit.head == "var_es") return Functional::var_es(real_param(lit, "alpha"));
    if (lit.head == "center") return Functional::center_of_symmetry();
    if (lit.head == "moments") {
      const double k = real_param(lit, "k");
      if (k != std::floor(k) || k < 1 || k > 8) usage(lit, lit.params.at("k"), "is not an integer in [1, 8]");
      return Functional::moments(static_cast<int>(k));
    }
    // ratio
    if (!lit.params.count("p")) usage(lit, "p", "is required");
    std::vector<NamedFn> p;
    for (const auto& tok : split(lit.params.at("p"), '|')) p.push_back(monomial(lit, tok));
    const NamedFn q = lit.params.count("q") ? monomial(lit, lit.params.at("q")) : monomial(lit, "1");
    return Functional::ratio(std::move(p), q);
  });
}

ScoreSpec parse_score(std::string_view text) {
  static const std::map<std::string, std::vector<std::string>> allowed{
      {"pinball", {"alpha"}}, {"asym_squared", {"tau"}}, {"huber", {"k"}},
      {"mean_sq", {}},        {"bregman", {"phi"}},      {"mv", {"phi"}},           {"mv_hom", {}},
      {"var_es", {"alpha", "phi"}}, {"var_es_c", {"alpha", "c"}}};
  const Literal lit = parse_literal(text, allowed, "score");
  return guarded(lit, [&]() -> ScoreSpec {
    if (lit.head == "pinball") {
      const double a = real_param(lit, "alpha");
      return {pinball(a), Functional::quantile(a)};
    }
    if (lit.head == "asym_squared") {
      const double t = real_param(lit, "tau");
      return {asym_squared(t), Functional::expectile(t)};
    }
    if (lit.head == "huber") return {huber(real_param(lit, "k")), Functional::center_of_symmetry()};
    if (lit.head == "mean_sq") return {mean_score(), Functional::mean()};
    if (lit.head == "bregman") {
      const std::string phi = lit.params.count("phi") ? lit.params.at("phi") : "quadratic";
      const NamedFn y{"y", [](double v) { return v; }};
      const NamedFn one{"1", [](double) { return 1.0; }};
      if (phi == "exp") return {bregman_general({y}, one, exp_generator(1)), Functional::mean()};
      if (phi == "quadratic") return {bregman_general({y}, one, quadratic_generator(1)), Functional::mean()};
      usage(lit, phi, "is not a Bregman generator (exp or quadratic)");
    }
    if (lit.head == "mv") {
      const std::string phi = lit.params.count("phi") ? lit.params.at("phi") : "inverse_variance";
      if (phi == "inverse_variance") return {mean_variance(inverse_variance_generator()), Functional::mean_variance()};
      if (phi == "quadratic") return {mean_variance(quadratic_generator(2)), Functional::mean_variance()};
      usage(lit, phi, "is not a mean-variance generator (inverse_variance or quadratic)");
    }
    if (lit.head == "mv_hom") return {mv_homogeneous(), Functional::mean_variance()};
    if (lit.head == "var_es") {
      const double a = real_param(lit, "alpha");
      return {var_es(a, var_es_generator(lit)), Functional::var_es(a)};
    }
    // var_es_c
    const double a = real_param(lit, "alpha");
    return {var_es_translation(real_param(lit, "c"), a), Functional::var_es(a)};
  });
}

}  // namespace elicit
