#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "elicit/types.hpp"

namespace elicit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool lo_open = false;
  bool hi_open = false;

  static Interval closed(double lo, double hi) { return {lo, hi, false, false}; }
  static Interval open(double lo, double hi) { return {lo, hi, true, true}; }
  static Interval above(double lo, bool open) { return {lo, kInf, open, false}; }
  static Interval below(double hi, bool open) { return {-kInf, hi, false, open}; }

  bool contains(double v) const;
  bool contains_interior(double v) const { return v > lo && v < hi; }
};

enum class Relation { LessEqual, Less };

// coefficients . x  (<= | <)  offset
struct LinearConstraint {
  std::vector<double> coefficients;
  Relation relation = Relation::LessEqual;
  double offset = 0.0;

  double lhs(const Point& x) const;
};

// Action domain: a box intersected with finitely many half-spaces.
class ActionDomain {
 public:
  ActionDomain() = default;
  explicit ActionDomain(int dim);
  ActionDomain(std::vector<Interval> box, std::vector<LinearConstraint> constraints = {});

  static ActionDomain real_line() { return ActionDomain(1); }
  static ActionDomain euclidean(int dim) { return ActionDomain(dim); }

  int dim() const { return static_cast<int>(box_.size()); }
  const std::vector<Interval>& box() const { return box_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }

  bool contains(const Point& x) const;
  bool contains_interior(const Point& x) const;

  // Range of x[coord] (other coordinates frozen) for which x stays in the
  // closed domain. Empty ranges come back with lo > hi.
  std::pair<double, double> feasible_range(const Point& x, int coord) const;

  ActionDomain with_constraint(LinearConstraint c) const;
  ActionDomain with_interval(int coord, Interval iv) const;

  std::string describe() const;

 private:
  std::vector<Interval> box_;
  std::vector<LinearConstraint> constraints_;
};

}  // namespace elicit
