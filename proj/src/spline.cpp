#include "shockfit/spline.hpp"

#include <algorithm>
#include <cmath>

#include "shockfit/errors.hpp"

namespace shockfit {

namespace {

// derivative at x[k0] of the polynomial through (x[k], y[k]) for k in idx
double lagrange_slope(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<std::size_t>& idx, std::size_t at) {
  double xa = x[at], s = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    std::size_t i = idx[a];
    // d/dx of the i-th basis polynomial at xa
    double d = 0.0;
    for (std::size_t b = 0; b < idx.size(); ++b) {
      std::size_t j = idx[b];
      if (j == i) continue;
      double term = 1.0 / (x[i] - x[j]);
      for (std::size_t c = 0; c < idx.size(); ++c) {
        std::size_t m = idx[c];
        if (m == i || m == j) continue;
        term *= (xa - x[m]) / (x[i] - x[m]);
      }
      d += term;
    }
    s += y[i] * d;
  }
  return s;
}

}  // namespace

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw Error(ErrorCode::precondition, "spline needs >= 2 nodes");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw Error(ErrorCode::precondition, "spline nodes not increasing");
  m_.assign(n, 0.0);
  if (n == 2) return;

  std::size_t p = std::min<std::size_t>(4, n);
  std::vector<std::size_t> lo(p), hi(p);
  for (std::size_t k = 0; k < p; ++k) {
    lo[k] = k;
    hi[k] = n - p + k;
  }
  double s0 = lagrange_slope(x_, y_, lo, 0);
  double sn = lagrange_slope(x_, y_, hi, n - 1);

  std::vector<double> a(n), b(n), c(n), d(n);
  double h0 = x_[1] - x_[0];
  b[0] = 2.0 * h0;
  c[0] = h0;
  d[0] = 6.0 * ((y_[1] - y_[0]) / h0 - s0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
    a[i] = hl;
    b[i] = 2.0 * (hl + hr);
    c[i] = hr;
    d[i] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
  }
  double hn = x_[n - 1] - x_[n - 2];
  a[n - 1] = hn;
  b[n - 1] = 2.0 * hn;
  d[n - 1] = 6.0 * (sn - (y_[n - 1] - y_[n - 2]) / hn);

  for (std::size_t i = 1; i < n; ++i) {
    double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  m_[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
}

std::size_t CubicSpline::locate(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  if (i == 0) return 0;
  if (i >= x_.size()) return x_.size() - 2;
  return i - 1;
}

double CubicSpline::eval_on(std::size_t i, double x, int order) const {
  double h = x_[i + 1] - x_[i], t = x - x_[i];
  double mi = m_[i], mj = m_[i + 1];
  double slope = (y_[i + 1] - y_[i]) / h - h * (2.0 * mi + mj) / 6.0;
  switch (order) {
    case 0: return y_[i] + t * (slope + t * (0.5 * mi + t * (mj - mi) / (6.0 * h)));
    case 1: return slope + t * (mi + t * (mj - mi) / (2.0 * h));
    case 2: return mi + t * (mj - mi) / h;
    case 3: return (mj - mi) / h;
    default: return 0.0;
  }
}

double CubicSpline::eval(double x, int order) const {
  if (x <= x_.front()) return order == 0 ? y_.front() : (x == x_.front() ? eval_on(0, x, order) : 0.0);
  if (x >= x_.back())
    return order == 0 ? y_.back() : (x == x_.back() ? eval_on(x_.size() - 2, x, order) : 0.0);
  return eval_on(locate(x), x, order);
}

std::vector<double> graded_nodes(double length, double h0, double ratio, double hmax) {
  if (!(length > 0) || !(h0 > 0) || !(ratio >= 1.0) || !(hmax >= h0))
    throw Error(ErrorCode::precondition, "invalid grading parameters");
  std::vector<double> r{0.0};
  double h = h0;
  while (r.back() < length) {
    double next = r.back() + h;
    if (next >= length || length - next < 0.5 * std::min(h * ratio, hmax)) {
      r.push_back(length);
      break;
    }
    r.push_back(next);
    h = std::min(h * ratio, hmax);
  }
  return r;
}

}  // namespace shockfit
