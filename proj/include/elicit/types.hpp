#pragma once

#include <initializer_list>
#include <string>

#include <Eigen/Dense>

namespace elicit {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline Point point(std::initializer_list<double> values) {
  Point p(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) p(i++) = v;
  return p;
}

// Renders a point with 12 significant digits, e.g. "(0, -5)".
std::string format_point(const Point& x);

// "%.12g" formatting used for every number the library prints.
std::string format_number(double v);

}  // namespace elicit
