#pragma once

#include <cstddef>
#include <vector>

namespace shockfit {

// Cubic spline on strictly increasing nodes, clamped with end slopes taken from
// the 4-point interpolating polynomial. Constant extension outside the nodes.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double eval(double x, int order = 0) const;
  // Evaluation on a known interval i (x in [x_i, x_{i+1}]).
  double eval_on(std::size_t i, double x, int order) const;
  std::size_t locate(double x) const;

  const std::vector<double>& nodes() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  std::size_t size() const { return x_.size(); }
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, m_;
};

// Positive abscissae 0 = r_0 < r_1 < ... = length: cells grow geometrically from
// h0 with the given ratio until they reach hmax, then stay uniform.
std::vector<double> graded_nodes(double length, double h0, double ratio, double hmax);

}  // namespace shockfit
