#include "shockfit/source.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "shockfit/errors.hpp"
#include "shockfit/parallel.hpp"

namespace shockfit {

namespace {

int branch(double x, int side) {
  if (x < 0.0) return -1;
  if (x > 0.0) return 1;
  return side < 0 ? -1 : 1;
}

// Jump terms of w at the ends of the truncated window.
double end_terms(const Kernel& k, const PiecewiseField& w, double x) {
  double L = w.half_width(), s = 0.0;
  double wl = w.eval(-L, -1), wr = w.eval(L, 1);
  if (wl != 0.0 && x != -L) s += wl * lambda_eval(k, x + L, 0);
  if (wr != 0.0 && x != L) s -= wr * lambda_eval(k, x - L, 0);
  return s;
}

double g_phi(const SourceContext& c, double x) {
  if (c.kernel.is_zero()) return 0.0;
  FieldView v = corrector_view(c.cp);
  if (x == 0.0) return regular_integral(c.kernel, v, 0.0);
  return g_apply_jump_form(c.kernel, v, x);
}

}  // namespace

SourceContext make_source_context(const Kernel& k, const Flux& f, const PiecewiseField& w,
                                  const XAlpha& v_bar, double t, double sigma_dot,
                                  double b_minus_dot, double b_plus_dot, bool has_rates) {
  SourceContext c;
  c.kernel = k;
  c.flux = f;
  c.w = w;
  double wm = w.trace(-1), wp = w.trace(1);
  if (!(wm > wp)) throw Error(ErrorCode::inadmissible, "entropy violation in source context");
  c.speed = rh_speed(f, wm, wp);
  c.cp.kernel = k;
  c.cp.v_bar = v_bar;
  c.cp.sigma = wm - wp;
  c.cp.b_minus = f.eval(wm, 1) - c.speed;
  c.cp.b_plus = f.eval(wp, 1) - c.speed;
  c.cp.sigma_dot = sigma_dot;
  c.cp.b_minus_dot = b_minus_dot;
  c.cp.b_plus_dot = b_plus_dot;
  c.cp.t = t;
  c.cp.has_rates = has_rates;
  check_corrector_params(c.cp);
  return c;
}

double source_A(const SourceContext& c, double x, int side) {
  double g = g_phi(c, x);
  if (x == 0.0) return g;
  double w = c.w.eval(x, side), phi = corrector_eval(c.cp, x, 0, side);
  double d = c.flux.eval(w + phi, 1) - c.flux.eval(w, 1);
  return g - d * corrector_eval(c.cp, x, 1, side);
}

double source_B(const SourceContext& c, double x, int side) {
  (void)side;
  if (c.kernel.is_zero()) return 0.0;
  // regular part of G[w]: the origin jump of w is -sigma
  FieldView v = c.w.view();
  double s = regular_integral(c.kernel, v, x) + end_terms(c.kernel, c.w, x);
  if (x != 0.0) {
    double e = c.cp.cutoff.eval(x, 0);
    if (e < 1.0) s -= c.cp.sigma * lambda_eval(c.kernel, x, 0) * (1.0 - e);
  }
  return s;
}

double source_C_direct(const SourceContext& c, double x, int side) {
  if (x == 0.0) throw Error(ErrorCode::domain, "direct C path needs x != 0");
  double phi_t = corrector_time_derivative(c.cp, x, side);
  double phi_x = corrector_eval(c.cp, x, 1, side);
  double lam = c.kernel.is_zero() ? 0.0 : lambda_eval(c.kernel, x, 0);
  return phi_t + c.b_field(x, side) * phi_x + c.cp.sigma * lam * c.cp.cutoff.eval(x, 0);
}

double source_C(const SourceContext& c, double x, int side) {
  const CorrectorParams& p = c.cp;
  if (!(p.t > 0.0) || !p.has_rates)
    throw Error(ErrorCode::domain, "C needs t > 0 and trace derivatives");
  if (std::abs(x) > 1.0) return source_C_direct(c, x, side);
  int s = branch(x, side);
  double b = p.b(s), bd = p.b_dot(s), t = p.t, sig = p.sigma;
  bool zk = c.kernel.is_zero();
  auto lam = [&](double y) { return zk ? 0.0 : lambda_eval(c.kernel, y, 0); };
  auto vp = [&](double y) { return p.v_bar.eval(y, 1); };
  double E = (b + t * bd) * (sig / b * lam(-t * b) + vp(-t * b));
  if (x == 0.0) return -t * bd * (sig / b * lam(-t * b) + vp(-t * b)) + E;
  double tilde = corrector_tilde(p, x, 0, side);
  double phi_x = corrector_eval(p, x, 1, side);
  return (p.sigma_dot / sig - bd / b) * tilde + (c.b_field(x, side) - b) * phi_x -
         t * bd * (sig / b * lam(x - t * b) + vp(x - t * b)) + E;
}

double source_eval(const SourceContext& c, double x, int side) {
  return source_A(c, x, side) + source_B(c, x, side) - source_C(c, x, side);
}

double source_eval_ungrouped(const SourceContext& c, double x) {
  if (x == 0.0) throw Error(ErrorCode::domain, "ungrouped source needs x != 0");
  int side = x < 0 ? -1 : 1;
  double gw = 0.0;
  if (!c.kernel.is_zero())
    gw = g_apply_jump_form(c.kernel, c.w.view(), x) + end_terms(c.kernel, c.w, x);
  double w = c.w.eval(x, side), phi = corrector_eval(c.cp, x, 0, side);
  double phi_x = corrector_eval(c.cp, x, 1, side);
  double d = c.flux.eval(w + phi, 1) - c.flux.eval(w, 1);
  return g_phi(c, x) - d * phi_x + gw - corrector_time_derivative(c.cp, x, side) -
         c.b_field(x, side) * phi_x;
}

SourceBatch::SourceBatch(const Kernel& k, const std::vector<double>& r, int nq)
    : r_(r), zero_(k.is_zero()), kernel_(k) {
  if (zero_) return;
  std::vector<double> part;
  for (std::size_t i = r.size(); i-- > 1;) part.push_back(-r[i]);
  for (double x : r) part.push_back(x);
  std::vector<ProductRule::Target> targets;
  for (double x : r) targets.push_back({-x, -1});
  for (double x : r) targets.push_back({x, 1});
  targets.front().x = 0.0;
  rule_ = ProductRule(k, part, targets, nq);
}

void SourceBatch::apply_g(const PiecewiseField& w, std::vector<double>& left,
                          std::vector<double>& right) const {
  std::size_t n = r_.size();
  left.assign(n, 0.0);
  right.assign(n, 0.0);
  if (zero_) return;
  const auto& pts = rule_.points();
  const auto& sides = rule_.point_sides();
  std::vector<double> gp(pts.size()), out;
  for (std::size_t p = 0; p < pts.size(); ++p) gp[p] = w.eval(pts[p], sides[p], 1);
  rule_.apply(gp, out);
  double jump = w.trace(1) - w.trace(-1);
  for (std::size_t i = 0; i < n; ++i) {
    double xl = -r_[i], xr = r_[i];
    if (i == 0) {
      left[i] = right[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    left[i] = out[i] + end_terms(kernel_, w, xl) + jump * lambda_eval(kernel_, xl, 0);
    right[i] = out[n + i] + end_terms(kernel_, w, xr) + jump * lambda_eval(kernel_, xr, 0);
  }
}

void SourceBatch::evaluate(const SourceContext& c, std::vector<double>& left,
                           std::vector<double>& right) const {
  std::size_t n = r_.size();
  left.assign(n, 0.0);
  right.assign(n, 0.0);
  std::vector<double> gphi, rw;
  if (!zero_) {
    const auto& pts = rule_.points();
    const auto& sides = rule_.point_sides();
    std::vector<double> a(pts.size()), b(pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p) {
      double y = pts[p];
      a[p] = std::abs(y) < 2.0 ? corrector_eval(c.cp, y, 1, sides[p]) : 0.0;
      b[p] = c.w.eval(y, sides[p], 1);
    }
    rule_.apply(a, gphi);
    rule_.apply(b, rw);
  }
  const Cutoff& eta = c.cp.cutoff;
  parallel_for(2 * n, [&](std::size_t k) {
    int side = k < n ? -1 : 1;
    std::size_t i = k < n ? k : k - n;
    double x = side * r_[i];
    double A = 0.0, B = 0.0;
    if (!zero_) {
      A = gphi[k];
      B = rw[k] + end_terms(kernel_, c.w, x);
      if (x != 0.0) {
        double e = eta.eval(x, 0);
        if (e < 1.0) B -= c.cp.sigma * lambda_eval(kernel_, x, 0) * (1.0 - e);
      }
    }
    if (x != 0.0) {
      double w = c.w.eval(x, side), phi = corrector_eval(c.cp, x, 0, side);
      if (phi != 0.0)
        A -= (c.flux.eval(w + phi, 1) - c.flux.eval(w, 1)) * corrector_eval(c.cp, x, 1, side);
    }
    double F = A + B - source_C(c, x, side);
    (side < 0 ? left : right)[i] = F;
  });
}

SourceProbe source_bound_check(const std::vector<SourceSample>& samples,
                               const std::vector<double>& grid, const std::vector<double>& deltas,
                               double ell_constant, const SourceProbe* reference, double slack) {
  std::vector<std::array<double, 3>> s0, s1, sh;
  std::vector<double> e0, e1, eh;
  for (const auto& smp : samples) {
    const SourceContext& c = smp.ctx;
    double t = c.t(), a = c.cp.v_bar.alpha();
    double ta = std::pow(t, a - 1.0), ell = ell_constant * ta;
    std::vector<double> f(grid.size()), fx(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      double x = grid[i], h = 1e-3 * std::abs(x);
      f[i] = source_eval(c, x);
      fx[i] = (source_eval(c, x + h) - source_eval(c, x - h)) / (2.0 * h);
    });
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double x = grid[i], ax = std::abs(x);
      s0.push_back({x, t, f[i]});
      e0.push_back(ell * (std::abs(x * std::log(ax)) + t * ta) + ta);
      s1.push_back({x, t, fx[i]});
      e1.push_back(std::pow(t, a - 1.5) + (ell + ta) * std::pow(ax, a - 1.0));
    }
    for (double d : deltas) {
      sh.push_back({d, t, sobolev_norm(smp.table, 2, d)});
      eh.push_back(std::pow(t, -0.75) + (ta + ell) * std::pow(d, -0.75));
    }
  }
  auto ref = [&](const BoundReport SourceProbe::*m) -> std::optional<double> {
    if (!reference) return std::nullopt;
    return (reference->*m).fitted_constant;
  };
  SourceProbe out;
  out.ell_constant = ell_constant;
  out.F = fit_envelope("F", "G1*(l(t)*(|x ln|x||+t^a)+t^(a-1))", s0, e0, ref(&SourceProbe::F), slack);
  out.F_x = fit_envelope("F_x", "G1*(t^(a-3/2)+(l(t)+t^(a-1))*|x|^(a-1))", s1, e1,
                         ref(&SourceProbe::F_x), slack);
  out.h2 = fit_envelope("F_H2_off_delta", "G1*(t^(-3/4)+(t^(a-1)+l(t))*delta^(-3/4))", sh, eh,
                        ref(&SourceProbe::h2), slack);
  out.gamma1 = std::max({out.F.fitted_constant, out.F_x.fitted_constant, out.h2.fitted_constant});
  return out;
}

}  // namespace shockfit
