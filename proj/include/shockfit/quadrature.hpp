#pragma once

#include <cmath>
#include <vector>

namespace shockfit::quad {

// Gauss-Legendre rule on [-1, 1].
struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

const Rule& gauss_legendre(int n);

inline constexpr double kPanelTol = 1e-10;
inline constexpr int kMaxDepth = 48;

template <class F>
double gl(const F& f, double a, double b, int n = 12) {
  const Rule& r = gauss_legendre(n);
  double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(c + h * r.x[i]);
  return s * h;
}

namespace detail {
template <class F>
double adaptive(const F& f, double a, double b, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double l = gl(f, a, m), r = gl(f, m, b);
  if (depth >= kMaxDepth || std::abs(l + r - whole) <= tol) return l + r;
  return adaptive(f, a, m, l, tol, depth + 1) + adaptive(f, m, b, r, tol, depth + 1);
}
}  // namespace detail

// Adaptive Gauss-Legendre by bisection, absolute tolerance per panel.
template <class F>
double adaptive(const F& f, double a, double b, double tol = kPanelTol) {
  if (a == b) return 0.0;
  return detail::adaptive(f, a, b, gl(f, a, b), tol, 0);
}

// Geometric grading toward endpoints that carry an integrable singularity.
template <class F>
double graded(const F& f, double a, double b, bool sing_a, bool sing_b, double tol = kPanelTol) {
  if (a == b) return 0.0;
  if (sing_a && sing_b) {
    double m = 0.5 * (a + b);
    return graded(f, a, m, true, false, tol) + graded(f, m, b, false, true, tol);
  }
  if (!sing_a && !sing_b) return adaptive(f, a, b, tol);
  constexpr double q = 0.2;
  constexpr int levels = 24;
  double len = b - a, s = 0.0;
  double scale = q;
  double inner = len;
  // panels shrink toward the singular end, stopping above rounding level
  double floor = 64.0 * 2.220446049250313e-16 * std::max(std::abs(a), std::abs(b));
  for (int k = 0; k < levels && len * scale > floor; ++k, scale *= q) {
    double lo = len * scale, hi = len * scale / q;
    if (sing_a)
      s += adaptive(f, a + lo, a + hi, tol);
    else
      s += adaptive(f, b - hi, b - lo, tol);
    inner = len * scale;
  }
  if (inner <= floor) return s;
  if (sing_a)
    s += gl(f, a, a + inner, 8);
  else
    s += gl(f, b - inner, b, 8);
  return s;
}

}  // namespace shockfit::quad
