// Acceptance run: one PASS/FAIL line per criterion. Exit 0 only if all pass.
// argv[1] is a scratch directory for run artifacts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "shockfit/config.hpp"
#include "shockfit/quadrature.hpp"
#include "shockfit/run.hpp"
#include "shockfit/singular_operator.hpp"

using namespace shockfit;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string g_scratch = "acceptance_out";
std::map<std::string, RunReport> g_runs;

const RunReport& preset(const std::string& name) {
  auto it = g_runs.find(name);
  if (it != g_runs.end()) return it->second;
  RunConfig cfg = parse_config_file(std::string(SHOCKFIT_PRESET_DIR) + "/" + name + ".json");
  cfg.output.directory = g_scratch + "/" + name;
  RunReport rep;
  run_config(cfg, rep);
  return g_runs.emplace(name, std::move(rep)).first->second;
}

const Solution& solution(const RunReport& r) {
  if (!r.result) throw Error(ErrorCode::no_certificate, r.name + ": solver produced no solution");
  return r.result->solution;
}

// ------------------------------------------------------------ fixtures

FieldView indicator() {
  FieldView g;
  g.lo = -1.0;
  g.hi = 1.0;
  g.eval = [](double, int, int order) { return order == 0 ? 1.0 : 0.0; };
  return g;
}

FieldView lorentzian(double R) {
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

// (1/pi) PV of 1/((1+y^2)(x-y)) over |y| > R, by quadrature after y = R/s
double lorentzian_tail(double x, double R) {
  auto f = [&](double s) {
    double y = R / s;
    double v = 1.0 / ((1.0 + y * y) * (x - y)) + 1.0 / ((1.0 + y * y) * (x + y));
    return v * R / (s * s) / pi;
  };
  return quad::adaptive(f, 0.0, 1.0, 1e-15);
}

// cubic per side times a smooth cutoff, jump at 0, support [-2/k, 2/k]
FieldView random_field(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double k = 1.0 + 0.5 * (u(rng) + 1.0);
  std::array<double, 4> a{u(rng), u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng), u(rng)};
  FieldView g;
  g.lo = -2.0 / k;
  g.hi = 2.0 / k;
  g.breaks = {-1.0 / k, 1.0 / k};
  g.eval = [k, a, b](double x, int side, int order) {
    static const Cutoff eta;
    const auto& c = (x < 0.0 || (x == 0.0 && side < 0)) ? a : b;
    double p[3] = {c[0] + x * (c[1] + x * (c[2] + x * c[3])), c[1] + x * (2 * c[2] + 3 * x * c[3]),
                   2 * c[2] + 6 * x * c[3]};
    double e[3] = {eta.eval(k * x, 0), k * eta.eval(k * x, 1), k * k * eta.eval(k * x, 2)};
    if (order == 0) return p[0] * e[0];
    if (order == 1) return p[1] * e[0] + p[0] * e[1];
    return p[2] * e[0] + 2 * p[1] * e[1] + p[0] * e[2];
  };
  return g;
}

std::vector<double> sample_points() {
  std::vector<double> xs;
  for (int i = 0; i < 20; ++i) xs.push_back(-2.85 + 0.3 * i);
  return xs;
}

// ------------------------------------------------------------ criteria

Outcome operator_fidelity() {
  Kernel h = Kernel::hilbert();
  std::vector<double> xs = sample_points();
  auto t0 = std::chrono::steady_clock::now();
  double e1 = 0.0;
  FieldView ind = indicator();
  for (double x : xs) {
    double exact = std::log(std::abs((x + 1) / (x - 1))) / pi;
    e1 = std::max(e1, std::abs(g_apply_jump_form(h, ind, x) - exact) / std::abs(exact));
  }
  double s1 = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  double e2 = 0.0;
  const double R = 50.0;
  FieldView lor = lorentzian(R);
  for (double x : xs) {
    double exact = x / (1 + x * x);
    double v = g_apply_jump_form(h, lor, x) + lorentzian_tail(x, R);
    e2 = std::max(e2, std::abs(v - exact) / std::abs(exact));
  }
  double s2 = seconds_since(t0);
  // the extrapolated principal value path on the same pairs
  t0 = std::chrono::steady_clock::now();
  double e3 = 0.0;
  for (double x : xs) {
    double a = std::log(std::abs((x + 1) / (x - 1))) / pi, b = x / (1 + x * x);
    e3 = std::max(e3, std::abs(g_apply_pv(h, ind, x) - a) / std::abs(a));
    e3 = std::max(e3, std::abs(g_apply_pv(h, lor, x) + lorentzian_tail(x, R) - b) / std::abs(b));
  }
  double s3 = seconds_since(t0);
  return {e1 <= 1e-6 && e2 <= 1e-6 && e3 <= 1e-6 && s1 < 2.0 && s2 < 2.0 && s3 < 4.0,
          "jump form: indicator rel " + fmt("%.2e", e1) + " (" + fmt("%.2f", s1) + " s), Lorentzian rel " +
              fmt("%.2e", e2) + " (" + fmt("%.2f", s2) + " s); principal value: rel " + fmt("%.2e", e3) + " (" +
              fmt("%.2f", s3) + " s, both pairs)"};
}

Outcome jump_form_equivalence() {
  Kernel h = Kernel::hilbert();
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int f = 0; f < 50; ++f) {
    FieldView g = random_field(rng);
    for (int i = 0; i < 20; ++i) {
      double x = 0.95 * g.hi * u(rng);
      if (std::abs(x) < 1e-3) x = std::copysign(1e-3, x);
      worst = std::max(worst, std::abs(g_apply_jump_form(h, g, x) - g_apply_pv(h, g, x)));
    }
  }
  return {worst <= 1e-5, "max |jump form - PV| = " + fmt("%.2e", worst) + " over 50 fields x 20 points"};
}

Outcome jump_extraction() {
  Kernel h = Kernel::hilbert();
  const double cl = 1.0, cr = -0.5, jump = cr - cl;
  FieldView v;
  v.lo = -2.0;
  v.hi = 2.0;
  v.eval = [=](double x, int side, int order) {
    static const Cutoff eta;
    return ((x < 0.0 || (x == 0.0 && side < 0)) ? cl : cr) * eta.eval(x, order);
  };
  auto sweep = [&](int n, const BoundReport* ref) {
    std::vector<std::array<double, 3>> s;
    std::vector<double> env;
    for (double x : log_grid(1e-4, 0.25, n)) {
      s.push_back({x, 0.0, std::abs(regular_part(h, v, x))});
      env.push_back(1.0);
    }
    if (ref) return fit_envelope("D", "c", s, env, ref->fitted_constant, 0.1);
    return fit_envelope("D", "c", s, env);
  };
  BoundReport coarse = sweep(30, nullptr), fine = sweep(60, &coarse);
  double grow = 1e9;
  for (double x : {1e-3, -1e-3, 1e-4, -1e-4, 1e-6, -1e-6, 1e-8, -1e-8}) {
    double raw = std::abs(g_apply_jump_form(h, v, x));
    grow = std::min(grow, raw / (std::abs(jump) * std::abs(std::log(std::abs(x)) / pi)));
  }
  bool ok = coarse.violation_count == 0 && fine.violation_count == 0 && std::isfinite(coarse.fitted_constant) &&
            grow >= 0.9;
  return {ok, "sup|D| = " + fmt("%.4g", coarse.fitted_constant) + " -> " + fmt("%.4g", fine.fitted_constant) +
                  ", refined violations " + std::to_string(fine.violation_count) +
                  ", min |G[v]|/(|jump||Lambda|) = " + fmt("%.4f", grow)};
}

Outcome appendix_probes() {
  Kernel h = Kernel::hilbert();
  std::vector<double> deltas{1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8};
  bool ok = true;
  std::string detail;
  for (double b : {0.05, 0.1, 0.2}) {
    EnvelopeProbe a = appendix_probe(h, b, log_grid(1e-4, 0.24, 100), deltas);
    EnvelopeProbe f = appendix_probe(h, b, log_grid(1e-4, 0.24, 200), deltas, &a, 0.1);
    int viol = 0;
    double drift = 0.0;
    const BoundReport* ca[4] = {&a.value, &a.d1, &a.d2, &a.h2};
    const BoundReport* cf[4] = {&f.value, &f.d1, &f.d2, &f.h2};
    for (int i = 0; i < 4; ++i) {
      viol += ca[i]->violation_count + cf[i]->violation_count;
      drift = std::max(drift, std::abs(cf[i]->fitted_constant - ca[i]->fitted_constant) / ca[i]->fitted_constant);
    }
    ok = ok && viol == 0 && drift <= 0.1;
    detail += "b=" + fmt("%g", b) + ": viol " + std::to_string(viol) + " drift " + fmt("%.2e", drift) + "; ";
  }
  return {ok, detail};
}

// exact Burgers solution of the smooth-plus-jump datum, shock frame
struct ExactSmoothJump {
  static double datum(double x, int side) {
    double s = x / 0.5, bump = std::abs(s) < 1.0 ? 0.2 * std::pow(1.0 - s * s, 4) : 0.0;
    return ((x < 0.0 || (x == 0.0 && side < 0)) ? 1.0 : 0.0) + bump;
  }
  // u(t, X) from the side's characteristics: X = xi + t u0(xi)
  static double u(double t, double X, int side) {
    double lo = side < 0 ? -10.0 : 0.0, hi = side < 0 ? 0.0 : 10.0;
    for (int i = 0; i < 200; ++i) {
      double m = 0.5 * (lo + hi);
      (m + t * datum(m, side) - X > 0.0 ? hi : lo) = m;
    }
    return datum(0.5 * (lo + hi), side);
  }
  // shock path y' = (u- + u+)/2 by RK4
  static double shock(double t_end) {
    const int n = 20000;
    double y = 0.0, t = 0.0, h = t_end / n;
    auto sp = [](double t, double y) { return 0.5 * (u(t, y, -1) + u(t, y, 1)); };
    for (int i = 0; i < n; ++i) {
      double k1 = sp(t, y), k2 = sp(t + h / 2, y + h / 2 * k1), k3 = sp(t + h / 2, y + h / 2 * k2),
             k4 = sp(t + h, y + h * k3);
      y += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6;
      t += h;
    }
    return y;
  }
};

Outcome zero_kernel_reduction() {
  const Solution& rs = solution(preset("zero_kernel_riemann"));
  double drift = 0.0;
  for (std::size_t j = 0; j < rs.levels.field.size(); ++j)
    for (std::size_t i = 0; i < rs.r.size(); ++i)
      for (int side : {-1, 1})
        drift = std::max(drift, std::abs(rs.u_level(j, side * rs.r[i], side) - (side < 0 ? 1.0 : 0.0)));
  double speed = 0.0;
  for (const ShockPathSample& p : rs.shock_path)
    speed = std::max({speed, std::abs(p.speed - 0.5), std::abs(p.y - p.t / 2)});
  bool t_ok = rs.T() >= 0.2 * (1 - 1e-12);

  const Solution& ss = solution(preset("zero_kernel_smooth_jump"));
  const double t = 0.1;
  double Y = ExactSmoothJump::shock(t), err = 0.0;
  for (int i = -400; i <= 400; ++i) {
    if (i == 0) continue;
    double x = i * 0.005;
    int side = x < 0 ? -1 : 1;
    err = std::max(err, std::abs(ss.u_at(t, x, side) - ExactSmoothJump::u(t, x + Y, side)));
  }
  for (int side : {-1, 1}) err = std::max(err, std::abs(ss.u_at(t, 0.0, side) - ExactSmoothJump::u(t, Y, side)));
  return {t_ok && drift <= 1e-8 && speed <= 1e-8 && err <= 1e-4,
          "Riemann drift " + fmt("%.1e", drift) + " on [0," + fmt("%g", rs.T()) + "], |speed-1/2| " +
              fmt("%.1e", speed) + "; smooth+jump Linf " + fmt("%.2e", err) + " at t=0.1"};
}

Outcome corrector_conformance() {
  const RunReport& r = preset("burgers_hilbert_standard");
  const IterationDiagnostics& d = r.result->diagnostics;
  ProbeSettings p;
  int viol = 0;
  std::size_t iterates = d.iterate_correctors.size();
  for (const auto& ps : d.iterate_correctors) {
    CorrectorProbe c = corrector_bound_check(ps, probe_grid(p, false), probe_deltas());
    for (const BoundReport& b : corrector_reports(c)) viol += b.violation_count;
  }
  return {iterates > 0 && viol == 0,
          std::to_string(iterates) + " iterates, " + std::to_string(viol) + " violations on the standard grid"};
}

Outcome source_conformance() {
  const RunReport& r = preset("burgers_hilbert_standard");
  if (!r.source) return {false, "source probe missing"};
  const SourceProbe& a = r.source->coarse;
  const SourceProbe& b = r.source->fine;
  int viol = a.F.violation_count + a.F_x.violation_count + a.h2.violation_count + b.F.violation_count +
             b.F_x.violation_count + b.h2.violation_count;
  double drift = std::abs(b.gamma1 - a.gamma1) / a.gamma1;
  return {viol == 0 && drift <= 0.1 && a.gamma1 > 0.0,
          "violations " + std::to_string(viol) + ", Gamma_1 " + fmt("%.4g", a.gamma1) + " -> " +
              fmt("%.4g", b.gamma1) + " (drift " + fmt("%.2e", drift) + ")"};
}

Outcome contraction_certificate() {
  const RunReport& r = preset("burgers_hilbert_standard");
  if (!r.result) return {false, "no solution"};
  const IterationDiagnostics& d = r.result->diagnostics;
  double worst = 0.0;
  for (double q : d.contraction_ratios) worst = std::max(worst, q);
  bool ok = d.certificate && worst < 0.5 && d.halvings <= 5 && r.seconds <= 600.0;
  std::string detail = "T=" + fmt("%.4g", d.T) + " after " + std::to_string(d.halvings) +
                       " halvings, max ratio " + fmt("%.2e", worst) + ", " + fmt("%.1f", r.seconds) + " s";
  return {ok, detail};
}

// least-squares slope of log|d/dt trace| against log t on [0.01 T, T]
double trace_exponent(const Solution& s, int side) {
  const auto& p = s.shock_path;
  double T = s.T();
  std::vector<double> lx, ly;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (p[i].t < 0.01 * T * (1 - 1e-12)) continue;
    double a = side < 0 ? p[i - 1].u_minus : p[i - 1].u_plus, b = side < 0 ? p[i + 1].u_minus : p[i + 1].u_plus;
    double d = std::abs((b - a) / (p[i + 1].t - p[i - 1].t));
    if (d <= 0.0) continue;
    lx.push_back(std::log(p[i].t));
    ly.push_back(std::log(d));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= lx.size();
  my /= ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
  return sxy / sxx;
}

Outcome trace_law() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"burgers_hilbert_standard", "burgers_hilbert_alpha09"}) {
    const Solution& s = solution(preset(name));
    double alpha = s.spec.data.alpha;
    double e = std::min(trace_exponent(s, -1), trace_exponent(s, 1));
    ok = ok && std::isfinite(e) && e >= alpha - 1.05;
    detail += "alpha=" + fmt("%g", alpha) + ": exponent " + fmt("%.4f", e) + " >= " + fmt("%.2f", alpha - 1.05) + "; ";
  }
  return {ok, detail};
}

Outcome uniqueness_surrogate() {
  const RunReport& r = preset("burgers_hilbert_compare");
  std::map<int, CompareMetrics> by_n;
  for (const OracleComparison& c : r.comparisons)
    if (std::abs(c.metrics.t - 0.1) < 1e-12) by_n[c.n_cells] = c.metrics;
  if (!by_n.count(4096) || !by_n.count(8192) || !by_n.count(16384)) return {false, "missing oracle resolutions"};
  const CompareMetrics& f = by_n[16384];
  bool mono = by_n[4096].l1 > by_n[8192].l1 && by_n[8192].l1 > by_n[16384].l1;
  bool ok = f.l1 <= 5e-3 && f.shock_cells <= 3.0 && mono;
  return {ok, "L1 " + fmt("%.2e", by_n[4096].l1) + " > " + fmt("%.2e", by_n[8192].l1) + " > " +
                  fmt("%.2e", f.l1) + ", shock discrepancy " + fmt("%.2f", f.shock_cells) + " cells"};
}

Outcome structural_invariants() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"zero_kernel_riemann", "zero_kernel_smooth_jump", "burgers_hilbert_standard",
                           "burgers_hilbert_compare", "burgers_hilbert_alpha09"}) {
    const RunReport& r = preset(name);
    if (!r.result) {
      ok = false;
      detail += std::string(name) + ": no solution; ";
      continue;
    }
    const InvariantCounts& c = r.result->diagnostics.invariants;
    int v = c.entropy + c.norm + c.funnel + c.b_ordering;
    ok = ok && v == 0 && c.paths > 0;
    detail += std::string(name) + ": " + std::to_string(v) + "/" + std::to_string(c.paths) + "; ";
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_scratch = argv[1];
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all{
      {1, "operator fidelity", operator_fidelity},
      {2, "jump form equals principal value", jump_form_equivalence},
      {3, "jump extraction", jump_extraction},
      {4, "appendix envelopes", appendix_probes},
      {5, "zero-kernel reduction", zero_kernel_reduction},
      {6, "corrector conformance", corrector_conformance},
      {7, "source conformance", source_conformance},
      {8, "contraction certificate", contraction_certificate},
      {9, "trace law", trace_law},
      {10, "uniqueness surrogate", uniqueness_surrogate},
      {11, "structural invariants", structural_invariants},
  };
  int failed = 0;
  for (const Criterion& c : all) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
