#include "shockfit/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <random>
#include <sstream>

#include "shockfit/corrector.hpp"
#include "shockfit/errors.hpp"
#include "shockfit/kernels.hpp"
#include "shockfit/solver.hpp"
#include "shockfit/source.hpp"
#include "shockfit/spline.hpp"

namespace shockfit {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Check bound(const std::string& name, double value, double tol) {
  return {name, std::isfinite(value) && value <= tol,
          "value=" + fmt("%.3g", value) + " tol=" + fmt("%.1g", tol)};
}

Check flag(const std::string& name, bool ok, const std::string& detail) { return {name, ok, detail}; }

// Zero violations at the refined grid and constants within the slack.
Check stable(const std::string& name, const std::vector<BoundReport>& a,
             const std::vector<BoundReport>& b, double slack) {
  Check c{name, true, ""};
  std::ostringstream os;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double ca = a[i].fitted_constant, cb = b[i].fitted_constant;
    bool ok = std::isfinite(ca) && std::isfinite(cb) && b[i].violation_count == 0 &&
              (ca == 0.0 ? cb == 0.0 : std::abs(cb - ca) <= slack * ca);
    if (!ok) c.passed = false;
    os << (i ? "; " : "") << a[i].quantity << " " << fmt("%.4g", ca) << "->" << fmt("%.4g", cb);
  }
  c.detail = os.str();
  return c;
}

std::vector<BoundReport> probe_reports(const EnvelopeProbe& p) { return {p.value, p.d1, p.d2, p.h2}; }

// ---------------------------------------------------------------- kernels

std::vector<Check> kernels_suite() {
  std::vector<Check> out;
  Kernel h = Kernel::hilbert(), bp = Kernel::burgers_poisson();
  out.push_back(bound("hilbert K(1) = 1/pi", std::abs(kernel_eval(h, 1.0, 0) - 1.0 / kPi), 1e-15));
  out.push_back(bound("hilbert K odd", std::abs(kernel_eval(h, -1.0, 0) + kernel_eval(h, 1.0, 0)), 0.0));
  out.push_back(bound("burgers_poisson K(1) = -exp(-1)/2",
                      std::abs(kernel_eval(bp, 1.0, 0) + 0.5 * std::exp(-1.0)), 1e-15));
  for (const Kernel* k : {&h, &bp}) {
    double worst = 0.0;
    for (int i = 0; i <= 900; ++i) {
      double x = std::pow(10.0, -6.0 + 9.0 * i / 900.0);
      for (double s : {-x, x})
        for (int o = 0; o <= 2; ++o)
          worst = std::max(worst, std::abs(kernel_eval(*k, s, o)) * std::pow(x, o + 1) / k->bound_constant());
    }
    out.push_back(flag(k->name() + " admissibility |K^(i)||x|^(i+1) <= C", worst <= 1.0 + 1e-12,
                       "max ratio to C " + fmt("%.4f", worst)));
  }
  out.push_back(bound("hilbert Lambda(e) = 1/pi", std::abs(lambda_eval(h, std::exp(1.0), 0) - 1.0 / kPi), 1e-14));
  double bp1 = 0.5 * (std::exp(-1.0) - std::exp(-2.0));
  out.push_back(bound("burgers_poisson Lambda(1) closed form", std::abs(lambda_eval(bp, 1.0, 0) - bp1), 1e-14));
  out.push_back(bound("burgers_poisson Lambda_2 by quadrature", std::abs(lambda2_quadrature(bp, 1.0) - bp1), 1e-10));
  {
    double worst = 0.0;
    for (const Kernel* k : {&h, &bp})
      for (double x : {0.37, 1.3, 2.5, 7.0}) {
        worst = std::max(worst, std::abs(lambda_eval(*k, x, 0) - lambda_eval(*k, -x, 0)));
        double e1 = 0.0, e2 = 0.0;
        for (double hh : {1e-2, 5e-3}) {
          double d = (lambda_eval(*k, x + hh, 0) - lambda_eval(*k, x - hh, 0)) / (2 * hh) - kernel_eval(*k, x, 0);
          (hh == 1e-2 ? e1 : e2) = std::abs(d);
        }
        // second order: halving h divides the error by about 4
        if (e1 > 1e-12 && !(e2 < 0.3 * e1)) worst = std::max(worst, 1.0);
        worst = std::max(worst, e2 > 1e-4 ? e2 : 0.0);
      }
    out.push_back(bound("Lambda even, derivative matches K at O(h^2)", worst, 1e-12));
  }
  out.push_back(bound("Phi(0) = 0", std::abs(phi_eval(h, 0.0)), 0.0));
  out.push_back(bound("hilbert Phi(1) = -1/pi", std::abs(phi_eval(h, 1.0) + 1.0 / kPi), 1e-14));
  {
    double worst = 0.0;
    for (const Kernel* k : {&h, &bp})
      for (double x : {-1.7, -0.5, 0.01, 0.5, 1.0, 2.5})
        worst = std::max(worst, std::abs(phi_eval_quadrature(*k, x) - phi_eval(*k, x)));
    out.push_back(bound("Phi closed form vs graded quadrature", worst, 1e-8));
  }
  out.push_back(bound("hilbert Phi odd", std::abs(phi_eval(h, -0.5) + phi_eval(h, 0.5)), 1e-15));
  Cutoff eta;
  out.push_back(bound("phi(1, 0) = 1/pi", std::abs(phi_xb_eval(h, eta, 1.0, 0.0, 0) - 1.0 / kPi), 1e-14));
  out.push_back(bound("d/dx phi(0.5, 0) = -Lambda(0.5)",
                      std::abs(phi_xb_eval(h, eta, 0.5, 0.0, 1) + std::log(0.5) / kPi), 1e-14));
  {
    double worst = 0.0;
    for (double x : {0.2, 0.6, -0.4})
      for (double b : {0.05, -0.1}) {
        double hh = 1e-5;
        double fd = (phi_xb_eval(h, eta, x, b + hh, 0) - phi_xb_eval(h, eta, x, b - hh, 0)) / (2 * hh);
        worst = std::max(worst, std::abs(fd - phi_xb_db(h, eta, x, b)));
        double fx = (phi_xb_eval(h, eta, x + hh, b, 0) - phi_xb_eval(h, eta, x - hh, b, 0)) / (2 * hh);
        worst = std::max(worst, std::abs(fx - phi_xb_eval(h, eta, x, b, 1)));
      }
    out.push_back(bound("d/db phi = Phi'(b) + d/dx phi (finite differences)", worst, 1e-8));
  }
  {
    bool ok = true;
    double prev = 1.0;
    for (int i = 0; i <= 300; ++i) {
      double x = 3.0 * i / 300.0, v = eta.eval(x, 0);
      ok = ok && v == eta.eval(-x, 0) && v <= prev + 1e-15;
      if (x <= 1.0) ok = ok && v == 1.0;
      if (x >= 2.0) ok = ok && v == 0.0;
      for (int o = 1; o <= 3; ++o) ok = ok && std::isfinite(eta.eval(x, o));
      prev = v;
    }
    out.push_back(flag("cutoff even, monotone, 1 on [-1,1], 0 off [-2,2]", ok, ok ? "ok" : "violated"));
  }
  {
    std::vector<std::array<double, 3>> sl, sp;
    std::vector<double> el, ep;
    for (double x : log_grid(1e-6, 0.25, 40)) {
      double l = 1.0 + std::abs(std::log(std::abs(x)));
      sl.push_back({x, 0.0, lambda_eval(h, x, 0)});
      el.push_back(l);
      sp.push_back({x, 0.0, phi_eval(h, x)});
      ep.push_back(std::abs(x) * l);
    }
    BoundReport a = fit_envelope("Lambda", "C*(1+|ln|x||)", sl, el);
    BoundReport b = fit_envelope("Phi", "C*|x|*(1+|ln|x||)", sp, ep);
    out.push_back(flag("log envelopes of Lambda and Phi", a.violation_count == 0 && b.violation_count == 0 &&
                                                               a.fitted_constant < 1.0 && b.fitted_constant < 1.0,
                       "C_Lambda=" + fmt("%.4g", a.fitted_constant) + " C_Phi=" + fmt("%.4g", b.fitted_constant)));
  }
  return out;
}

// --------------------------------------------------------------- operator

std::vector<Check> operator_suite() {
  std::vector<Check> out;
  Kernel h = Kernel::hilbert();
  std::vector<double> xs;
  for (int i = 0; i < 20; ++i) {
    double x = -3.0 + 6.0 * (i + 0.5) / 20.0;
    if (std::abs(std::abs(x) - 1.0) < 1e-3) x += 0.01;
    xs.push_back(x);
  }
  {
    FieldView ind = indicator_field();
    double worst = 0.0;
    for (double x : xs)
      worst = std::max(worst, std::abs(g_apply_jump_form(h, ind, x) - hilbert_indicator(x)) /
                                  std::abs(hilbert_indicator(x)));
    out.push_back(bound("indicator -> (1/pi) ln|(x+1)/(x-1)| (relative)", worst, 1e-6));
  }
  {
    const double R = 50.0;
    FieldView lor = lorentzian_field(R);
    double worst = 0.0;
    for (double x : xs) {
      double v = g_apply_jump_form(h, lor, x) + hilbert_lorentzian_tail(x, R);
      worst = std::max(worst, std::abs(v - hilbert_lorentzian(x)) / std::abs(hilbert_lorentzian(x)));
    }
    out.push_back(bound("Lorentzian -> x/(1+x^2) (relative)", worst, 1e-6));
  }
  {
    double worst = 0.0;
    for (unsigned s = 1; s <= 6; ++s) {
      FieldView g = random_piecewise_field(s);
      std::mt19937 rng(100 + s);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int i = 0; i < 8; ++i) {
        double x = u(rng) * 0.9 * g.hi;
        if (std::abs(x) < 1e-3) x = 1e-3;
        worst = std::max(worst, std::abs(g_apply_pv(h, g, x) - g_apply_jump_form(h, g, x)));
      }
    }
    out.push_back(bound("principal value vs jump form (random fields)", worst, 1e-5));
  }
  {
    // periodic Lorentzian: closed-form conjugate function
    const double P = 40.0;
    const int n = 4096;
    std::vector<double> grid(n), g(n);
    double a = 2 * kPi / P;
    for (int i = 0; i < n; ++i) {
      grid[i] = -P / 2 + P * i / n;
      g[i] = (kPi / P) * std::sinh(a) / (std::cosh(a) - std::cos(a * grid[i]));
    }
    std::vector<double> hg = hilbert_fft(grid, g);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      double exact = (kPi / P) * std::sin(a * grid[i]) / (std::cosh(a) - std::cos(a * grid[i]));
      worst = std::max(worst, std::abs(hg[i] - exact));
    }
    out.push_back(bound("FFT Hilbert transform vs periodic closed form", worst, 1e-10));
  }
  {
    // step v with a smooth tail: raw G grows like |jump| |Lambda|, D stays bounded
    FieldView v = linear_profile(0.0, 0.0);
    v.eval = [](double x, int side, int order) {
      static const Cutoff eta;
      double c = (x < 0.0 || (x == 0.0 && side < 0)) ? 1.0 : -0.5;
      return c * eta.eval(x, order);
    };
    double jump = 1.5, dmax = 0.0, grow = 1e9;
    for (double x : log_grid(1e-4, 0.25, 30)) {
      dmax = std::max(dmax, std::abs(regular_part(h, v, x)));
      double raw = std::abs(g_apply_jump_form(h, v, x));
      if (std::abs(x) <= 1e-3) grow = std::min(grow, raw / (jump * std::abs(lambda_eval(h, x, 0))));
    }
    out.push_back(flag("jump extraction: D bounded, raw G ~ |jump| |Lambda|", dmax < 10.0 && grow >= 0.9,
                       "sup|D|=" + fmt("%.4g", dmax) + " min raw/(jump Lambda)=" + fmt("%.4g", grow)));
  }
  return out;
}

// -------------------------------------------------------------- corrector

std::vector<Check> corrector_suite() {
  std::vector<Check> out;
  CorrectorParams p = standard_corrector(0.1);
  {
    double worst = 0.0;
    for (double x : {1e-9, 1e-12}) worst = std::max({worst, std::abs(corrector_eval(p, x)), std::abs(corrector_eval(p, -x))});
    out.push_back(bound("phi(t, 0+-) -> 0", worst, 1e-6));
  }
  {
    CorrectorParams q = standard_corrector(0.0);
    double worst = 0.0;
    for (double x : {-0.9, -0.3, 0.2, 0.5, 0.95}) worst = std::max(worst, std::abs(corrector_eval(q, x) - q.v_bar.eval(x)));
    out.push_back(bound("phi(0, x) = v_bar(x)", worst, 1e-14));
  }
  {
    double worst = 0.0;
    for (double x : {-0.7, -0.15, 0.05, 0.3, 1.4})
      for (int o = 1; o <= 3; ++o) {
        double hh = 1e-5 * std::max(0.05, std::abs(x));
        double fd = (corrector_eval(p, x + hh, o - 1) - corrector_eval(p, x - hh, o - 1)) / (2 * hh);
        double ex = corrector_eval(p, x, o);
        worst = std::max(worst, std::abs(fd - ex) / (1.0 + std::abs(ex)));
      }
    out.push_back(bound("derivative orders match central differences", worst, 1e-5));
  }
  {
    // frozen coefficients, then sigma(t) = 1 + t
    double worst = 0.0;
    for (int variant = 0; variant < 2; ++variant) {
      auto at = [&](double t) {
        CorrectorParams q = standard_corrector(t);
        if (variant == 1) q.sigma = 1.0 + t, q.sigma_dot = 1.0;
        return q;
      };
      for (double x : {0.3, -0.2, 0.05}) {
        double t = 0.1, hh = 1e-5;
        double fd = (corrector_eval(at(t + hh), x) - corrector_eval(at(t - hh), x)) / (2 * hh);
        worst = std::max(worst, std::abs(fd - corrector_time_derivative(at(t), x)));
      }
    }
    out.push_back(bound("phi_t closed form vs finite differences", worst, 1e-7));
  }
  {
    std::vector<CorrectorParams> ps;
    for (double t : {0.01, 0.05, 0.1, 0.2}) ps.push_back(standard_corrector(t));
    std::vector<double> deltas{1.0 / 64, 1.0 / 16, 1.0 / 4};
    CorrectorProbe a = corrector_bound_check(ps, log_grid(1e-4, 0.24, 24), deltas);
    CorrectorProbe b = corrector_bound_check(ps, log_grid(1e-4, 0.24, 48), deltas, &a, 0.1);
    CorrectorProbe c = corrector_bound_check(ps, log_grid(1e-4, 0.24, 96), deltas, &a, 0.1);
    out.push_back(stable("corrector envelopes stable under refinement (1x)", corrector_reports(a), corrector_reports(b), 0.1));
    out.push_back(stable("corrector envelopes stable under refinement (2x)", corrector_reports(a), corrector_reports(c), 0.1));
    std::vector<CorrectorParams> p1, p2;
    for (double t : {0.05, 0.1}) {
      CorrectorParams q = standard_corrector(t, 0.0);
      p1.push_back(q);
      q.sigma *= 2.0;
      p2.push_back(q);
    }
    double c1 = corrector_bound_check(p1, log_grid(1e-4, 0.24, 12), {}).phi.fitted_constant;
    double c2 = corrector_bound_check(p2, log_grid(1e-4, 0.24, 12), {}).phi.fitted_constant;
    out.push_back(bound("doubling sigma doubles the phi constant", std::abs(c2 / c1 - 2.0), 1e-12));
  }
  return out;
}

// ----------------------------------------------------------------- source

std::vector<Check> source_suite() {
  std::vector<Check> out;
  Kernel h = Kernel::hilbert();
  Flux f = Flux::burgers();
  PiecewiseField w = standard_field(0.5, -0.5);
  XAlpha vb = make_xalpha(0.1, 0.8);
  {
    SourceContext z = make_source_context(Kernel::zero(), f, w, make_xalpha(0.0, 0.8), 0.1, 0.0, 0.0, 0.0, true);
    double worst = 0.0;
    for (double x : {-0.5, -1e-3, 0.01, 0.3}) worst = std::max(worst, std::abs(source_eval(z, x)));
    out.push_back(bound("zero kernel, v_bar = 0 gives F = 0", worst, 0.0));
  }
  SourceContext c = make_source_context(h, f, w, vb, 0.1, -0.02, 0.01, -0.01, true);
  {
    double worst = 0.0, worst_c = 0.0;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 12; ++i) {
      double x = u(rng);
      if (std::abs(x) < 1e-3) x = 1e-3;
      worst = std::max(worst, std::abs(source_eval(c, x) - source_eval_ungrouped(c, x)));
      worst_c = std::max(worst_c, std::abs(source_C(c, x) - source_C_direct(c, x)));
    }
    out.push_back(bound("A + B - C equals the ungrouped source", worst, 1e-8));
    out.push_back(bound("closed-form C equals direct C", worst_c, 1e-6));
  }
  {
    double bmax = 0.0;
    for (double x : log_grid(1e-4, 0.25, 20)) bmax = std::max(bmax, std::abs(source_B(c, x)));
    out.push_back(flag("B bounded near the shock", std::isfinite(bmax) && bmax < 10.0, "sup|B|=" + fmt("%.4g", bmax)));
  }
  {
    auto samples = [&](const std::vector<double>& r) {
      std::vector<SourceSample> s;
      PiecewiseField wr = PiecewiseField::sample(r, [&](double x, int side) { return w.eval(x, side); });
      SourceBatch batch(h, r, 4);
      for (double t : {0.02, 0.05, 0.1}) {
        SourceSample q;
        q.ctx = make_source_context(h, f, wr, vb, t, -0.02, 0.01, -0.01, true);
        std::vector<double> l, rr;
        batch.evaluate(q.ctx, l, rr);
        q.table = PiecewiseField(r, l, rr);
        s.push_back(std::move(q));
      }
      return s;
    };
    std::vector<double> r0 = w.radii(), r1;
    for (std::size_t i = 0; i + 1 < r0.size(); ++i) r1.push_back(r0[i]), r1.push_back(0.5 * (r0[i] + r0[i + 1]));
    r1.push_back(r0.back());
    std::vector<double> deltas{1.0 / 64, 1.0 / 16, 1.0 / 4};
    SourceProbe a = source_bound_check(samples(r0), log_grid(1e-4, 0.24, 12), deltas, 1.0);
    SourceProbe b = source_bound_check(samples(r1), log_grid(1e-4, 0.24, 24), deltas, 1.0, &a, 0.1);
    out.push_back(stable("source envelopes stable under refinement", {a.F, a.F_x, a.h2}, {b.F, b.F_x, b.h2}, 0.1));
    out.push_back(flag("Gamma_1 stable within 10%", std::abs(b.gamma1 - a.gamma1) <= 0.1 * a.gamma1,
                       fmt("%.4g", a.gamma1) + " -> " + fmt("%.4g", b.gamma1)));
  }
  return out;
}

// ----------------------------------------------------------------- solver

std::vector<Check> solver_suite() {
  std::vector<Check> out;
  {
    SpaceTimeFn a = [](double, double, int) { return -0.5; };
    SpaceTimeFn ax = [](double, double, int) { return 0.0; };
    CharacteristicPath p = trace_characteristic(a, ax, 0.2, 0.1, 1);
    out.push_back(bound("constant speed: x(0) = 0.2", std::abs(p.x.front() - 0.2), 1e-14));
  }
  {
    SpaceTimeFn a = [](double, double x, int) { return x; };
    SpaceTimeFn ax = [](double, double, int) { return 1.0; };
    CharacteristicPath p = trace_characteristic(a, ax, 1.0, 1.0, 1);
    out.push_back(bound("linear ODE: x(0) = e^-1", std::abs(p.x.front() - std::exp(-1.0)), 1e-8));
  }
  {
    ProblemSpec spec;
    spec.kernel = Kernel::zero();
    spec.data.uL = 1.0;
    spec.data.uR = 0.0;
    SolverSettings s;
    s.T = 0.2;
    SolveResult res = outer_solve(spec, s);
    const Solution& sol = res.solution;
    double drift = 0.0;
    for (std::size_t j = 0; j < sol.levels.field.size(); ++j)
      for (std::size_t i = 0; i < sol.r.size(); i += 7)
        for (int side : {-1, 1})
          drift = std::max(drift, std::abs(sol.w.fields[j].eval(side * sol.r[i], side) -
                                           spec.data.w_bar(side * sol.r[i], side)));
    double path = 0.0;
    for (const auto& p : sol.shock_path) path = std::max(path, std::abs(p.y - p.t / 2));
    out.push_back(bound("zero-kernel Riemann stationary in the shock frame", drift, 1e-8));
    out.push_back(bound("zero-kernel Riemann y(t) = t/2", path, 1e-8));
    out.push_back(flag("zero-kernel Riemann certificate", res.diagnostics.certificate,
                       "outer iterations " + std::to_string(res.diagnostics.beta_outer.size())));
    LipschitzReport l = lipschitz_trace_check(sol);
    out.push_back(flag("stationary traces: exponent undefined, c = 0",
                       std::isnan(l.exponent) && l.envelope.fitted_constant == 0.0, "c=" + fmt("%g", l.envelope.fitted_constant)));
    BalanceReport b = characteristic_balance_check(sol, 10);
    out.push_back(bound("stationary balance residual", b.max_residual, 1e-6));
  }
  return out;
}

// --------------------------------------------------------------- appendix

std::vector<Check> appendix_suite() {
  std::vector<Check> out;
  Kernel h = Kernel::hilbert();
  std::vector<double> deltas{1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8};
  for (double b : {0.05, 0.1, 0.2}) {
    EnvelopeProbe a = appendix_probe(h, b, log_grid(1e-4, 0.24, 16), deltas);
    EnvelopeProbe f = appendix_probe(h, b, log_grid(1e-4, 0.24, 32), deltas, &a, 0.1);
    out.push_back(stable("appendix envelopes b=" + fmt("%g", b), probe_reports(a), probe_reports(f), 0.1));
  }
  {
    // regular part of G for a piecewise linear profile with a jump
    FieldView v = linear_profile(0.7, -0.3);
    v.eval = [](double x, int side, int order) {
      static const Cutoff eta;
      bool left = x < 0.0 || (x == 0.0 && side < 0);
      double lam = left ? 0.7 : -0.3, c = left ? 0.4 : -0.6;
      double val = (c + lam * x) * eta.eval(x, order);
      if (order > 0) val += order * lam * eta.eval(x, order - 1);
      return val;
    };
    double dmax = 0.0;
    for (double x : log_grid(1e-4, 0.25, 30)) dmax = std::max(dmax, std::abs(regular_part(h, v, x)));
    out.push_back(flag("regular part bounded on 1e-4 <= |x| <= 1/4", std::isfinite(dmax) && dmax < 10.0,
                       "sup|D|=" + fmt("%.4g", dmax)));
  }
  return out;
}

}  // namespace

bool SuiteResult::passed() const {
  for (const Check& c : checks)
    if (!c.passed) return false;
  return true;
}

std::vector<std::string> verify_selectors() {
  return {"kernels", "operator", "corrector", "source", "solver", "appendix"};
}

std::vector<SuiteResult> verify_suite(const std::string& selector) {
  std::vector<std::string> which, known = verify_selectors();
  if (selector == "all") which = known;
  else if (std::find(known.begin(), known.end(), selector) != known.end())
    which = {selector};
  else
    throw Error(ErrorCode::config, "unknown selector '" + selector +
                                       "' (expected kernels, operator, corrector, source, solver, appendix or all)");
  std::vector<SuiteResult> out;
  for (const std::string& s : which) {
    auto t0 = std::chrono::steady_clock::now();
    SuiteResult r;
    r.selector = s;
    if (s == "kernels") r.checks = kernels_suite();
    else if (s == "operator") r.checks = operator_suite();
    else if (s == "corrector") r.checks = corrector_suite();
    else if (s == "source") r.checks = source_suite();
    else if (s == "solver") r.checks = solver_suite();
    else r.checks = appendix_suite();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

std::string suites_json(const std::vector<SuiteResult>& s, int indent) {
  nlohmann::json j = nlohmann::json::array();
  for (const SuiteResult& r : s) {
    nlohmann::json c = nlohmann::json::array();
    for (const Check& k : r.checks) c.push_back({{"name", k.name}, {"passed", k.passed}, {"detail", k.detail}});
    j.push_back({{"selector", r.selector}, {"passed", r.passed()}, {"seconds", r.seconds}, {"checks", c}});
  }
  return j.dump(indent);
}

std::string suites_text(const std::vector<SuiteResult>& s) {
  std::ostringstream os;
  for (const SuiteResult& r : s) {
    os << "[" << r.selector << "] " << (r.passed() ? "pass" : "FAIL") << " (" << fmt("%.2f", r.seconds) << " s)\n";
    for (const Check& c : r.checks) os << "  " << (c.passed ? "ok   " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------- fixtures

FieldView random_piecewise_field(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double k = 1.0 + 0.5 * (u(rng) + 1.0);
  std::array<double, 3> cl{u(rng), u(rng), u(rng)}, cr{u(rng), u(rng), u(rng)};
  FieldView g;
  g.lo = -2.0 / k;
  g.hi = 2.0 / k;
  g.breaks = {-1.0 / k, 1.0 / k};
  g.eval = [k, cl, cr](double x, int side, int order) {
    static const Cutoff eta;
    const auto& c = (x < 0.0 || (x == 0.0 && side < 0)) ? cl : cr;
    double p[3] = {c[0] + c[1] * x + c[2] * x * x, c[1] + 2 * c[2] * x, 2 * c[2]};
    double e[3] = {eta.eval(k * x, 0), k * eta.eval(k * x, 1), k * k * eta.eval(k * x, 2)};
    if (order == 0) return p[0] * e[0];
    if (order == 1) return p[1] * e[0] + p[0] * e[1];
    return p[2] * e[0] + 2 * p[1] * e[1] + p[0] * e[2];
  };
  return g;
}

FieldView indicator_field() {
  FieldView g;
  g.lo = -1.0;
  g.hi = 1.0;
  g.eval = [](double, int, int order) { return order == 0 ? 1.0 : 0.0; };
  return g;
}

FieldView lorentzian_field(double R) {
  FieldView g;
  g.lo = -R;
  g.hi = R;
  g.eval = [](double x, int, int order) {
    double q = 1.0 + x * x;
    if (order == 0) return 1.0 / q;
    if (order == 1) return -2.0 * x / (q * q);
    return (6.0 * x * x - 2.0) / (q * q * q);
  };
  return g;
}

double hilbert_indicator(double x) { return std::log(std::abs((x + 1.0) / (x - 1.0))) / kPi; }

double hilbert_lorentzian(double x) { return x / (1.0 + x * x); }

double hilbert_lorentzian_tail(double x, double R) {
  // partial fractions of 1/((1+y^2)(x-y)) integrated over |y| > R
  return (std::log((R - x) / (R + x)) + x * (kPi - 2.0 * std::atan(R))) / (kPi * (1.0 + x * x));
}

CorrectorParams standard_corrector(double t, double vbar_amplitude) {
  CorrectorParams p;
  p.kernel = Kernel::hilbert();
  p.v_bar = make_xalpha(vbar_amplitude, 0.8);
  p.sigma = 1.0;
  p.b_minus = 0.5;
  p.b_plus = -0.5;
  p.t = t;
  p.has_rates = true;
  return p;
}

PiecewiseField standard_field(double uL, double uR) {
  InitialData d;
  d.uL = uL;
  d.uR = uR;
  d.taper = 4.0;
  std::vector<double> r = graded_nodes(4.0, 4e-5, 1.15, 0.05);
  return PiecewiseField::sample(r, [&](double x, int side) {
    return d.w_bar(x, side) + 0.05 * std::sin(2.0 * x) * std::exp(-x * x);
  });
}

}  // namespace shockfit
