#include "elicit/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "elicit/error.hpp"

namespace elicit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorCode::DenominatorError: return "DenominatorError";
    case ErrorCode::NotSymmetric: return "NotSymmetricError";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::ConvexityError: return "ConvexityError";
    case ErrorCode::PathOutsideDomain: return "PathOutsideDomain";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::Precondition: return "PreconditionFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Error";
}

std::string format_number(double v) {
  if (v == 0.0) return "0";  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_point(const Point& x) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) out += ", ";
    out += format_number(x(i));
  }
  return out + ")";
}

bool Interval::contains(double v) const {
  if (std::isnan(v)) return false;
  const bool lo_ok = lo_open ? v > lo : v >= lo;
  const bool hi_ok = hi_open ? v < hi : v <= hi;
  return lo_ok && hi_ok;
}

double LinearConstraint::lhs(const Point& x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < coefficients.size(); ++i) s += coefficients[i] * x(static_cast<Eigen::Index>(i));
  return s;
}

ActionDomain::ActionDomain(int dim) : box_(static_cast<std::size_t>(dim)) {
  if (dim < 1) fail(ErrorCode::DomainError, "action domain dimension must be positive");
}

ActionDomain::ActionDomain(std::vector<Interval> box, std::vector<LinearConstraint> constraints)
    : box_(std::move(box)), constraints_(std::move(constraints)) {
  if (box_.empty()) fail(ErrorCode::DomainError, "action domain dimension must be positive");
  for (const auto& c : constraints_) {
    if (c.coefficients.size() != box_.size())
      fail(ErrorCode::DomainError, "linear constraint dimension mismatch");
  }
}

bool ActionDomain::contains(const Point& x) const {
  if (x.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (!box_[static_cast<std::size_t>(i)].contains(x(i))) return false;
  }
  for (const auto& c : constraints_) {
    const double v = c.lhs(x);
    if (c.relation == Relation::Less ? !(v < c.offset) : !(v <= c.offset)) return false;
  }
  return true;
}

bool ActionDomain::contains_interior(const Point& x) const {
  if (x.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (!box_[static_cast<std::size_t>(i)].contains_interior(x(i))) return false;
  }
  for (const auto& c : constraints_) {
    if (!(c.lhs(x) < c.offset)) return false;
  }
  return true;
}

std::pair<double, double> ActionDomain::feasible_range(const Point& x, int coord) const {
  const auto& iv = box_.at(static_cast<std::size_t>(coord));
  double lo = iv.lo;
  double hi = iv.hi;
  for (const auto& c : constraints_) {
    const double a = c.coefficients[static_cast<std::size_t>(coord)];
    if (a == 0.0) continue;
    const double rest = c.lhs(x) - a * x(coord);
    const double bound = (c.offset - rest) / a;
    if (a > 0) hi = std::min(hi, bound);
    else lo = std::max(lo, bound);
  }
  return {lo, hi};
}

ActionDomain ActionDomain::with_constraint(LinearConstraint c) const {
  auto cs = constraints_;
  cs.push_back(std::move(c));
  return ActionDomain(box_, std::move(cs));
}

ActionDomain ActionDomain::with_interval(int coord, Interval iv) const {
  auto box = box_;
  box.at(static_cast<std::size_t>(coord)) = iv;
  return ActionDomain(std::move(box), constraints_);
}

std::string ActionDomain::describe() const {
  std::ostringstream os;
  for (int i = 0; i < dim(); ++i) {
    const auto& iv = box_[static_cast<std::size_t>(i)];
    if (i) os << " x ";
    os << (iv.lo_open || std::isinf(iv.lo) ? '(' : '[') << format_number(iv.lo) << ", "
       << format_number(iv.hi) << (iv.hi_open || std::isinf(iv.hi) ? ')' : ']');
  }
  for (const auto& c : constraints_) {
    os << "; ";
    for (std::size_t j = 0; j < c.coefficients.size(); ++j) {
      if (c.coefficients[j] == 0.0) continue;
      os << (c.coefficients[j] < 0 ? " - " : " + ") << format_number(std::fabs(c.coefficients[j])) << "*x"
         << j + 1;
    }
    os << (c.relation == Relation::Less ? " < " : " <= ") << format_number(c.offset);
  }
  return os.str();
}

}  // namespace elicit
