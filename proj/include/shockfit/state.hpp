#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "shockfit/kernels.hpp"
#include "shockfit/singular_operator.hpp"
#include "shockfit/spline.hpp"

namespace shockfit {

// Polynomial flux f(u) = sum c_i u^i.
class Flux {
 public:
  Flux() : Flux(std::vector<double>{0.0, 0.0, 0.5}, "burgers") {}
  Flux(std::vector<double> coeffs, std::string name);

  static Flux burgers();
  // a u^2 / 2 + b u
  static Flux quadratic_plus_linear(double a, double b);

  double eval(double u, int order = 0) const;
  // positive lower bound of f'' on [lo, hi]; <= 0 means not strictly convex there
  double convexity_floor(double lo, double hi) const;
  // sum over i <= k of sup |f^(i)| on [lo, hi]
  double ck_norm(int k, double lo, double hi) const;
  // point where f' vanishes, if any, else NaN
  double critical_point() const;

  const std::vector<double>& coeffs() const { return c_; }
  const std::string& name() const { return name_; }

 private:
  std::vector<double> c_;
  std::string name_;
};

// Field on [-L, L] with a doubled node at the origin and a spline per side.
class PiecewiseField {
 public:
  PiecewiseField() = default;
  // r: nodes 0 = r_0 < ... < r_n = L shared by both sides (left uses -r).
  PiecewiseField(std::vector<double> r, std::vector<double> left_values,
                 std::vector<double> right_values);

  static PiecewiseField sample(const std::vector<double>& r,
                               const std::function<double(double, int)>& f);

  double eval(double x, int side, int order = 0) const;
  double trace(int side) const { return side < 0 ? left_.front() : right_.front(); }
  double half_width() const { return r_.back(); }

  const std::vector<double>& radii() const { return r_; }
  // values ordered by increasing |x|
  const std::vector<double>& left_values() const { return left_; }
  const std::vector<double>& right_values() const { return right_; }
  const CubicSpline& spline(int side) const { return side < 0 ? sl_ : sr_; }

  PiecewiseField operator-(const PiecewiseField& o) const;
  FieldView view() const;

 private:
  std::vector<double> r_, left_, right_;
  // splines in s = |x|
  CubicSpline sl_, sr_;
};

struct ShockQuantities {
  double sigma = 0.0;
  double speed = 0.0;
  double b_minus = 0.0;
  double b_plus = 0.0;
  double b0 = 0.0;
  double b1 = 0.0;
};

double rh_speed(const Flux& f, double u_minus, double u_plus);

// b0 from the convexity integral over the working rectangle.
double compute_b0(const Flux& f, double delta0, double M0);
double compute_b1(const Flux& f, double M0);

ShockQuantities shock_quantities(const Flux& f, double w_minus, double w_plus, double delta0,
                                 double M0);
ShockQuantities shock_quantities(const Flux& f, const PiecewiseField& w, double delta0, double M0);

double sobolev_norm(const PiecewiseField& w, int order, double delta = 0.0);

class XAlpha {
 public:
  XAlpha() = default;
  XAlpha(double amplitude, double alpha);

  double eval(double x, int order = 0) const;
  double alpha() const { return alpha_; }
  double amplitude() const { return amp_; }
  double support_radius() const { return 1.0; }
  bool is_zero() const { return amp_ == 0.0; }
  // sup over the sample grid of |x|^{i-a}/(1+|x|^{i-a}) |v^(i)|
  double membership(int order, int samples = 2000) const;

 private:
  double amp_ = 0.0;
  double alpha_ = 0.8;
};

XAlpha make_xalpha(double amplitude, double alpha);

bool entropy_check(const PiecewiseField& w, double delta_floor);

// Analytic initial datum w_bar: Riemann step (optionally tapered) plus a compact bump.
struct InitialData {
  double uL = 1.0;
  double uR = 0.0;
  // step multiplied by eta(2x / taper) when taper > 0
  double taper = 0.0;
  double bump_amplitude = 0.0;
  double bump_center = 0.0;
  double bump_width = 1.0;
  double vbar_amplitude = 0.0;
  double alpha = 0.8;

  double w_bar(double x, int side, int order = 0) const;
  bool compact() const { return taper > 0.0; }
};

struct ProblemSpec {
  Kernel kernel = Kernel::zero();
  Flux flux;
  InitialData data;
  XAlpha v_bar;
  double y0 = 0.0;
  double delta0 = 0.0;
  double M0 = 0.0;
  double T = 0.0;
  double L = 0.0;
};

// Fills delta0 and M0 from the datum over the window [-L, L].
void finalize_spec(ProblemSpec& spec, const std::vector<double>& r);

}  // namespace shockfit
