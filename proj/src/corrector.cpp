#include "shockfit/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "shockfit/errors.hpp"
#include "shockfit/quadrature.hpp"

namespace shockfit {

namespace {

int branch(double x, int side) {
  if (x < 0.0) return -1;
  if (x > 0.0) return 1;
  return side < 0 ? -1 : 1;
}

}  // namespace

void check_corrector_params(const CorrectorParams& p) {
  if (!(p.sigma > 0.0)) throw Error(ErrorCode::inadmissible, "corrector needs sigma > 0");
  if (!(p.b_minus > 0.0 && p.b_plus < 0.0))
    throw Error(ErrorCode::inadmissible, "corrector needs b- > 0 > b+");
  if (p.t < 0.0) throw Error(ErrorCode::range, "corrector time must be non-negative");
  if (p.t * std::max(p.b_minus, -p.b_plus) >= 1.0)
    throw Error(ErrorCode::range, "t |b| >= 1 leaves the resolved range");
}

double corrector_tilde(const CorrectorParams& p, double x, int order, int side) {
  if (x == 0.0 && order == 0) return 0.0;
  if (p.kernel.is_zero() || p.t == 0.0) return 0.0;
  int s = branch(x, side);
  double b = p.b(s);
  return p.sigma / b *
         (phi_xb_eval(p.kernel, p.cutoff, x, 0.0, order) -
          phi_xb_eval(p.kernel, p.cutoff, x, -p.t * b, order));
}

double corrector_bar(const CorrectorParams& p, double x, int order, int side) {
  if (x == 0.0 && order == 0) return 0.0;
  if (p.v_bar.is_zero() || std::abs(x) >= 2.0) return 0.0;
  int s = branch(x, side);
  double shift = -p.t * p.b(s);
  static const int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  double v = 0.0;
  for (int j = 0; j <= order; ++j) {
    double e = p.cutoff.eval(x, j);
    if (e == 0.0) continue;
    int m = order - j;
    double d = p.v_bar.eval(x + shift, m);
    if (m == 0) d -= p.v_bar.eval(shift, 0);
    v += binom[order][j] * e * d;
  }
  return v;
}

double corrector_eval(const CorrectorParams& p, double x, int order, int side) {
  if (order < 0 || order > 3) throw Error(ErrorCode::range, "corrector order must be 0..3");
  if (x == 0.0 && order == 0) return 0.0;
  if (x == 0.0) throw Error(ErrorCode::domain, "corrector derivatives need x != 0");
  return corrector_tilde(p, x, order, side) + corrector_bar(p, x, order, side);
}

double corrector_time_derivative(const CorrectorParams& p, double x, int side) {
  if (!(p.t > 0.0) || !p.has_rates)
    throw Error(ErrorCode::domain, "trace derivatives undefined at t = 0");
  if (x == 0.0) return 0.0;
  int s = branch(x, side);
  double b = p.b(s), bd = p.b_dot(s), t = p.t;
  double rate = b + t * bd;
  double v = 0.0;
  if (!p.kernel.is_zero()) {
    double tilde = corrector_tilde(p, x, 0, side);
    v += (p.sigma_dot / p.sigma - bd / b) * tilde +
         p.sigma / b * rate * phi_xb_db(p.kernel, p.cutoff, x, -t * b);
  }
  if (!p.v_bar.is_zero()) {
    double e = p.cutoff.eval(x, 0);
    if (e != 0.0) v += e * rate * (p.v_bar.eval(-t * b, 1) - p.v_bar.eval(x - t * b, 1));
  }
  return v;
}

FieldView corrector_view(const CorrectorParams& p) {
  FieldView v;
  v.lo = -2.0;
  v.hi = 2.0;
  v.breaks = {-1.0, 1.0};
  v.singular_at_zero = true;
  v.eval = [p](double x, int side, int order) {
    if (x == 0.0 && order == 0) return 0.0;
    if (x == 0.0) x = side < 0 ? -1e-300 : 1e-300;
    return corrector_eval(p, x, order, side);
  };
  return v;
}

double corrector_h2_off(const CorrectorParams& p, double delta) {
  const quad::Rule& g = quad::gauss_legendre(8);
  std::vector<double> edges;
  for (double r = delta; r < 0.999; r *= 1.3) edges.push_back(r);
  edges.push_back(1.0);
  for (int i = 1; i <= 20; ++i) edges.push_back(1.0 + 0.05 * i);
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    double c = 0.5 * (edges[k] + edges[k + 1]), h = 0.5 * (edges[k + 1] - edges[k]);
    for (std::size_t q = 0; q < g.x.size(); ++q)
      for (int sg : {-1, 1}) {
        double x = sg * (c + h * g.x[q]), v = 0.0;
        for (int o = 0; o <= 2; ++o) {
          double d = corrector_eval(p, x, o);
          v += d * d;
        }
        s += g.w[q] * h * v;
      }
  }
  return std::sqrt(s);
}

CorrectorProbe corrector_bound_check(const std::vector<CorrectorParams>& params,
                                     const std::vector<double>& grid,
                                     const std::vector<double>& deltas,
                                     const CorrectorProbe* reference, double slack) {
  std::vector<std::array<double, 3>> s0, s1, s2, s3, sh;
  std::vector<double> e0, e1, e2, e3, eh;
  for (const auto& p : params) {
    double t = p.t, a = p.v_bar.alpha();
    for (double x : grid) {
      if (!(x != 0.0 && std::abs(x) < 0.25))
        throw Error(ErrorCode::precondition, "corrector probe grid must lie in 0 < |x| < 1/4");
      double ax = std::abs(x), l = std::abs(std::log(ax));
      s0.push_back({x, t, corrector_eval(p, x, 0)});
      e0.push_back(ax * (l + (t > 0 ? std::pow(t, a - 1.0) : 0.0)));
      s1.push_back({x, t, corrector_eval(p, x, 1)});
      e1.push_back(l + std::pow(ax + t, a - 1.0));
      s2.push_back({x, t, corrector_eval(p, x, 2)});
      e2.push_back(1.0 / ax + std::pow(ax + t, a - 2.0));
      s3.push_back({x, t, corrector_eval(p, x, 3)});
      e3.push_back(1.0 / (ax * ax) + std::pow(ax + t, a - 3.0));
    }
    for (double d : deltas) {
      sh.push_back({d, t, corrector_h2_off(p, d)});
      eh.push_back(std::pow(d, a - 1.5));
    }
  }
  auto ref = [&](const BoundReport CorrectorProbe::*m) -> std::optional<double> {
    if (!reference) return std::nullopt;
    return (reference->*m).fitted_constant;
  };
  CorrectorProbe out;
  out.phi = fit_envelope("phi", "C0*|x|*(|ln|x||+t^(a-1))", s0, e0, ref(&CorrectorProbe::phi), slack);
  out.phi_x = fit_envelope("phi_x", "C0*(|ln|x||+(|x|+t)^(a-1))", s1, e1,
                           ref(&CorrectorProbe::phi_x), slack);
  out.phi_xx = fit_envelope("phi_xx", "C0*(|x|^-1+(|x|+t)^(a-2))", s2, e2,
                            ref(&CorrectorProbe::phi_xx), slack);
  out.phi_xxx = fit_envelope("phi_xxx", "C0*(|x|^-2+(|x|+t)^(a-3))", s3, e3,
                             ref(&CorrectorProbe::phi_xxx), slack);
  out.h2 = fit_envelope("phi_H2_off_delta", "C0*delta^(a-3/2)", sh, eh, ref(&CorrectorProbe::h2),
                        slack);
  return out;
}

std::vector<BoundReport> corrector_reports(const CorrectorProbe& p) {
  return {p.phi, p.phi_x, p.phi_xx, p.phi_xxx, p.h2};
}

}  // namespace shockfit
