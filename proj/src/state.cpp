#include "shockfit/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shockfit/errors.hpp"
#include "shockfit/quadrature.hpp"

namespace shockfit {

Flux::Flux(std::vector<double> coeffs, std::string name)
    : c_(std::move(coeffs)), name_(std::move(name)) {
  if (c_.empty()) throw Error(ErrorCode::config, "flux needs at least one coefficient");
  for (double c : c_)
    if (!std::isfinite(c)) throw Error(ErrorCode::config, "flux coefficients must be finite");
}

Flux Flux::burgers() { return Flux({0.0, 0.0, 0.5}, "burgers"); }

Flux Flux::quadratic_plus_linear(double a, double b) {
  return Flux({0.0, b, 0.5 * a}, "quadratic_plus_linear");
}

double Flux::eval(double u, int order) const {
  // Horner on the differentiated coefficients
  double s = 0.0;
  for (std::size_t i = c_.size(); i-- > static_cast<std::size_t>(order);) {
    double f = 1.0;
    for (int j = 0; j < order; ++j) f *= static_cast<double>(i - j);
    s = s * u + c_[i] * f;
  }
  return s;
}

double Flux::convexity_floor(double lo, double hi) const {
  double m = std::numeric_limits<double>::infinity();
  const int n = 2000;
  for (int i = 0; i <= n; ++i) m = std::min(m, eval(lo + (hi - lo) * i / n, 2));
  return m;
}

double Flux::ck_norm(int k, double lo, double hi) const {
  double s = 0.0;
  const int n = 2000;
  for (int order = 0; order <= k; ++order) {
    double m = 0.0;
    for (int i = 0; i <= n; ++i) m = std::max(m, std::abs(eval(lo + (hi - lo) * i / n, order)));
    s += m;
  }
  return s;
}

double Flux::critical_point() const {
  // f' is increasing for convex f: bisection on a bracket
  double lo = -1.0, hi = 1.0;
  for (int i = 0; i < 200 && eval(lo, 1) > 0; ++i) lo *= 2;
  for (int i = 0; i < 200 && eval(hi, 1) < 0; ++i) hi *= 2;
  if (eval(lo, 1) > 0 || eval(hi, 1) < 0) return std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < 200; ++i) {
    double m = 0.5 * (lo + hi);
    (eval(m, 1) < 0 ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

PiecewiseField::PiecewiseField(std::vector<double> r, std::vector<double> left_values,
                               std::vector<double> right_values)
    : r_(std::move(r)), left_(std::move(left_values)), right_(std::move(right_values)) {
  if (r_.size() < 2 || r_.front() != 0.0 || left_.size() != r_.size() ||
      right_.size() != r_.size())
    throw Error(ErrorCode::precondition, "piecewise field needs matching nodes starting at 0");
  for (std::size_t i = 0; i < r_.size(); ++i)
    if (!std::isfinite(left_[i]) || !std::isfinite(right_[i]))
      throw Error(ErrorCode::precondition, "piecewise field has non-finite values");
  sl_ = CubicSpline(r_, left_);
  sr_ = CubicSpline(r_, right_);
}

PiecewiseField PiecewiseField::sample(const std::vector<double>& r,
                                      const std::function<double(double, int)>& f) {
  std::vector<double> l(r.size()), rr(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    l[i] = f(-r[i], -1);
    rr[i] = f(r[i], 1);
  }
  return PiecewiseField(r, l, rr);
}

double PiecewiseField::eval(double x, int side, int order) const {
  bool left = x < 0.0 || (x == 0.0 && side < 0);
  if (left) {
    double v = sl_.eval(-x, order);
    return (order % 2 == 1) ? -v : v;
  }
  return sr_.eval(x, order);
}

PiecewiseField PiecewiseField::operator-(const PiecewiseField& o) const {
  if (o.r_ != r_) throw Error(ErrorCode::precondition, "field difference needs identical grids");
  std::vector<double> l(r_.size()), rr(r_.size());
  for (std::size_t i = 0; i < r_.size(); ++i) {
    l[i] = left_[i] - o.left_[i];
    rr[i] = right_[i] - o.right_[i];
  }
  return PiecewiseField(r_, l, rr);
}

FieldView PiecewiseField::view() const {
  FieldView v;
  v.lo = -r_.back();
  v.hi = r_.back();
  for (std::size_t i = r_.size() - 1; i-- > 1;) v.breaks.push_back(-r_[i]);
  for (std::size_t i = 1; i + 1 < r_.size(); ++i) v.breaks.push_back(r_[i]);
  auto self = *this;
  v.eval = [self](double x, int side, int order) { return self.eval(x, side, order); };
  return v;
}

double rh_speed(const Flux& f, double u_minus, double u_plus) {
  if (u_minus == u_plus) throw Error(ErrorCode::domain, "degenerate jump: u- == u+");
  return (f.eval(u_minus) - f.eval(u_plus)) / (u_minus - u_plus);
}

double compute_b0(const Flux& f, double delta0, double M0) {
  double lo = -2.0 * M0, hi = 2.0 * M0;
  if (!(hi - lo >= delta0)) throw Error(ErrorCode::precondition, "b0 rectangle is empty");
  const quad::Rule& g = quad::gauss_legendre(12);
  auto inner = [&](double a, double b) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      double r = 0.5 * (1 + g.x[i]);
      for (std::size_t j = 0; j < g.x.size(); ++j) {
        double ss = 0.5 * (1 + g.x[j]);
        s += 0.25 * g.w[i] * g.w[j] * f.eval(b - r * ss * (b - a), 2) * ss;
      }
    }
    return s;
  };
  const int n = 40;
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    double a = lo + (hi - lo) * i / n;
    for (int j = 0; j <= n; ++j) {
      double b = a + delta0 + (hi - a - delta0) * j / n;
      if (b > hi) continue;
      m = std::min(m, inner(a, b));
    }
  }
  return delta0 * m;
}

double compute_b1(const Flux& f, double M0) {
  return 4.0 * f.ck_norm(2, -2.0 * M0, 2.0 * M0) * M0;
}

ShockQuantities shock_quantities(const Flux& f, double w_minus, double w_plus, double delta0,
                                 double M0) {
  if (!(w_minus > w_plus))
    throw Error(ErrorCode::inadmissible, "entropy violation: w(0-) <= w(0+)");
  ShockQuantities q;
  q.sigma = w_minus - w_plus;
  q.speed = rh_speed(f, w_minus, w_plus);
  q.b_minus = f.eval(w_minus, 1) - q.speed;
  q.b_plus = f.eval(w_plus, 1) - q.speed;
  q.b0 = compute_b0(f, delta0, M0);
  q.b1 = compute_b1(f, M0);
  return q;
}

ShockQuantities shock_quantities(const Flux& f, const PiecewiseField& w, double delta0, double M0) {
  return shock_quantities(f, w.trace(-1), w.trace(1), delta0, M0);
}

double sobolev_norm(const PiecewiseField& w, int order, double delta) {
  if (order < 0 || order > 2) throw Error(ErrorCode::range, "sobolev order must be 0..2");
  const auto& r = w.radii();
  if (delta < 0.0 || delta >= r.back())
    throw Error(ErrorCode::precondition, "excluded interval wider than domain");
  const quad::Rule& g = quad::gauss_legendre(4);
  double s = 0.0;
  for (int side : {-1, 1}) {
    const CubicSpline& sp = w.spline(side);
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      double a = std::max(r[i], delta), b = r[i + 1];
      if (!(b > a)) continue;
      double c = 0.5 * (a + b), h = 0.5 * (b - a);
      for (std::size_t q = 0; q < g.x.size(); ++q) {
        double x = c + h * g.x[q], v = 0.0;
        for (int k = 0; k <= order; ++k) {
          double d = sp.eval_on(i, x, k);
          v += d * d;
        }
        s += g.w[q] * h * v;
      }
    }
  }
  return std::sqrt(s);
}

XAlpha::XAlpha(double amplitude, double alpha) : amp_(amplitude), alpha_(alpha) {}

double XAlpha::eval(double x, int order) const {
  if (order < 0 || order > 4) throw Error(ErrorCode::range, "X_alpha derivative order must be 0..4");
  if (amp_ == 0.0) return 0.0;
  double a = std::abs(x);
  if (a >= 1.0) return 0.0;
  if (x == 0.0) {
    if (order == 0) return 0.0;
    throw Error(ErrorCode::domain, "X_alpha derivative undefined at 0");
  }
  static const Cutoff eta;
  static const int binom[5][5] = {
      {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
  double sg = x > 0 ? 1.0 : -1.0, s = 0.0;
  for (int j = 0; j <= order; ++j) {
    double e = std::ldexp(eta.eval(2.0 * x, j), j);
    if (e == 0.0) continue;
    int m = order - j;
    // d^m |x|^a
    double p = 1.0;
    for (int i = 0; i < m; ++i) p *= (alpha_ - i);
    double d = p * std::pow(a, alpha_ - m) * ((m % 2 == 1) ? sg : 1.0);
    s += binom[order][j] * e * d;
  }
  return amp_ * s;
}

double XAlpha::membership(int order, int samples) const {
  double m = 0.0;
  for (int i = 1; i <= samples; ++i) {
    double x = std::pow(10.0, -8.0 + 8.0 * i / samples);
    for (double y : {x, -x}) {
      double a = std::pow(std::abs(y), order - alpha_);
      m = std::max(m, a / (1.0 + a) * std::abs(eval(y, order)));
    }
  }
  return m;
}

XAlpha make_xalpha(double amplitude, double alpha) {
  if (!(alpha > 0.75 && alpha < 1.0))
    throw Error(ErrorCode::range, "alpha must lie in (3/4, 1)");
  if (!std::isfinite(amplitude)) throw Error(ErrorCode::range, "amplitude must be finite");
  return XAlpha(amplitude, alpha);
}

bool entropy_check(const PiecewiseField& w, double delta_floor) {
  return w.trace(-1) - w.trace(1) > delta_floor;
}

double InitialData::w_bar(double x, int side, int order) const {
  bool left = x < 0.0 || (x == 0.0 && side < 0);
  double step = left ? uL : uR, v = 0.0;
  if (taper > 0.0) {
    static const Cutoff eta;
    double k = 2.0 / taper;
    v = step * std::pow(k, order) * eta.eval(k * x, order);
  } else {
    v = order == 0 ? step : 0.0;
  }
  if (bump_amplitude != 0.0) {
    double s = (x - bump_center) / bump_width;
    if (std::abs(s) < 1.0) {
      double q = 1.0 - s * s, p;
      switch (order) {
        case 0: p = q * q * q * q; break;
        case 1: p = -8.0 * s * q * q * q; break;
        case 2: p = -8.0 * q * q * q + 48.0 * s * s * q * q; break;
        case 3: p = 144.0 * s * q * q - 192.0 * s * s * s * q; break;
        default: throw Error(ErrorCode::range, "bump derivative order must be 0..3");
      }
      v += bump_amplitude * p / std::pow(bump_width, order);
    }
  }
  return v;
}

void finalize_spec(ProblemSpec& spec, const std::vector<double>& r) {
  const InitialData& d = spec.data;
  spec.delta0 = d.w_bar(0.0, -1) - d.w_bar(0.0, 1);
  if (!(spec.delta0 > 0.0))
    throw Error(ErrorCode::inadmissible, "initial jump must satisfy w(0-) > w(0+)");
  const quad::Rule& g = quad::gauss_legendre(8);
  double s = 0.0;
  for (int side : {-1, 1})
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      double c = 0.5 * (r[i] + r[i + 1]), h = 0.5 * (r[i + 1] - r[i]);
      for (std::size_t q = 0; q < g.x.size(); ++q) {
        double x = side * (c + h * g.x[q]);
        double v0 = d.w_bar(x, side, 0), v1 = d.w_bar(x, side, 1), v2 = d.w_bar(x, side, 2);
        s += g.w[q] * h * (v0 * v0 + v1 * v1 + v2 * v2);
      }
    }
  spec.M0 = 2.0 * std::sqrt(s);
  spec.v_bar = make_xalpha(d.vbar_amplitude, d.alpha);
}

}  // namespace shockfit
