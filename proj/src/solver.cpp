#include "shockfit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "shockfit/errors.hpp"
#include "shockfit/parallel.hpp"

namespace shockfit {

namespace {

int side_of(double x, int side) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : (side < 0 ? -1 : 1)); }

std::size_t bracket(const std::vector<double>& t, double x) {
  if (t.size() < 2 || x <= t.front()) return 0;
  if (x >= t.back()) return t.size() - 2;
  auto it = std::upper_bound(t.begin(), t.end(), x);
  return static_cast<std::size_t>(it - t.begin()) - 1;
}

double theta(const std::vector<double>& t, std::size_t j, double x) {
  if (t.size() < 2) return 0.0;
  return std::clamp((x - t[j]) / (t[j + 1] - t[j]), 0.0, 1.0);
}

struct Funnel {
  double b0 = 0.0, b1 = 0.0, delta1 = 0.0;
};

// Backward RK4 along x' = a(t, x) over grid[0..m0], optionally integrating a source.
// coef(t, x, side, v, dv); src(t, x, side).
template <class Coef, class Src>
CharacteristicPath integrate(const Coef& coef, const Src* src, const std::vector<double>& grid,
                             std::size_t m0, double x0, int side, double t_src, double alpha,
                             double step_factor, double min_step, bool record,
                             const Funnel* funnel) {
  CharacteristicPath p;
  double x = x0, t0 = grid[m0];
  if (record) {
    p.t.push_back(t0);
    p.x.push_back(x0);
  }
  double back = 0.0;
  bool tail_done = src == nullptr;
  double eps_t = 1e-13 * std::max(1.0, grid.back());
  auto add_tail = [&](double tstar) {
    // source ~ c t^(alpha - 1) on (0, tstar], matched at t_src
    double c = (*src)(t_src, x, side) * std::pow(t_src, 1.0 - alpha);
    p.integral += c * std::pow(tstar, alpha) / alpha;
    tail_done = true;
  };
  if (!tail_done && t0 <= t_src + eps_t) add_tail(t0);

  auto stage = [&](double t, double xs) {
    if (side * xs < 0.0)
      throw Error(ErrorCode::integration, "backward characteristic crossed the shock");
    double v, dv;
    coef(t, xs, side, v, dv);
    return v;
  };

  for (std::size_t m = m0; m > 0; --m) {
    double ta = grid[m], tb = grid[m - 1], H = tb - ta;
    bool with_src = !tail_done && tb >= t_src - eps_t;
    double v0, dv0;
    coef(ta, x, side, v0, dv0);
    double n = std::ceil(std::abs(H) * std::abs(dv0) / step_factor);
    if (!std::isfinite(n)) throw Error(ErrorCode::stiffness, "non-finite coefficient slope");
    int nsub = std::max(1, static_cast<int>(std::min(n, 1e7)));
    double h = H / nsub;
    if (std::abs(h) < min_step) throw Error(ErrorCode::stiffness, "characteristic step underflow");
    double t = ta;
    for (int q = 0; q < nsub; ++q) {
      double th = (q + 1 == nsub) ? tb : t + h;
      double hh = th - t;
      double k1 = stage(t, x);
      double x2 = x + 0.5 * hh * k1;
      double k2 = stage(t + 0.5 * hh, x2);
      double x3 = x + 0.5 * hh * k2;
      double k3 = stage(t + 0.5 * hh, x3);
      double x4 = x + hh * k3;
      double k4 = stage(th, x4);
      if (with_src) {
        double f1 = (*src)(t, x, side), f2 = (*src)(t + 0.5 * hh, x2, side);
        double f3 = (*src)(t + 0.5 * hh, x3, side), f4 = (*src)(th, x4, side);
        back += hh * (f1 + 2.0 * f2 + 2.0 * f3 + f4) / 6.0;
      }
      x += hh * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
      if (side * x < 0.0)
        throw Error(ErrorCode::integration, "backward characteristic crossed the shock");
      t = th;
    }
    p.substeps += nsub;
    if (record) {
      p.t.push_back(tb);
      p.x.push_back(x);
    }
    if (funnel && std::abs(x0) <= funnel->delta1) {
      double d = std::abs(x - x0), dt = t0 - tb;
      double lo = 0.5 * funnel->b0 * dt, hi = 2.0 * funnel->b1 * dt;
      if (d < lo * (1.0 - 1e-9) - 1e-14 || d > hi * (1.0 + 1e-9) + 1e-14) ++p.funnel_violations;
    }
    if (!tail_done && std::abs(tb - t_src) <= eps_t) add_tail(tb);
  }
  p.integral -= back;
  if (record) {
    std::reverse(p.t.begin(), p.t.end());
    std::reverse(p.x.begin(), p.x.end());
  }
  p.x.shrink_to_fit();
  if (!record) p.x.push_back(x);
  return p;
}

double foot(const CharacteristicPath& p) { return p.t.empty() ? p.x.back() : p.x.front(); }

PiecewiseField zero_field(const std::vector<double>& r) {
  std::vector<double> z(r.size(), 0.0);
  return PiecewiseField(r, z, z);
}

}  // namespace

TimeLevels TimeLevels::make(double T, int macro_steps, int trace_refine, int graded_levels) {
  if (!(T > 0.0) || macro_steps < 1 || trace_refine < 1 || graded_levels < 0)
    throw Error(ErrorCode::precondition, "invalid time level parameters");
  TimeLevels lv;
  double df = T / macro_steps, dt = df / trace_refine;
  lv.field.push_back(0.0);
  for (int m = graded_levels; m >= 1; --m) lv.field.push_back(std::ldexp(df, -m));
  for (int j = 1; j <= macro_steps; ++j) lv.field.push_back(j == macro_steps ? T : j * df);
  lv.trace.push_back(0.0);
  for (int m = graded_levels; m >= 1; --m) lv.trace.push_back(std::ldexp(dt, -m));
  int nt = macro_steps * trace_refine;
  for (int j = 1; j <= nt; ++j) lv.trace.push_back(j == nt ? T : j * dt);
  // every field level must also be a trace level
  std::vector<double> merged = lv.trace;
  merged.insert(merged.end(), lv.field.begin(), lv.field.end());
  std::sort(merged.begin(), merged.end());
  lv.trace.clear();
  for (double t : merged)
    if (lv.trace.empty() || t - lv.trace.back() > 1e-12 * T) lv.trace.push_back(t);
  for (double t : lv.field) {
    std::size_t m = bracket(lv.trace, t);
    if (std::abs(lv.trace[m + 1] - t) < std::abs(lv.trace[m] - t)) ++m;
    lv.trace[m] = t;
    lv.field_to_trace.push_back(m);
  }
  return lv;
}

FieldTable::FieldTable(std::vector<double> times, std::vector<PiecewiseField> levels)
    : times_(std::move(times)), levels_(std::move(levels)) {
  if (times_.empty() || times_.size() != levels_.size())
    throw Error(ErrorCode::precondition, "field table needs one level per time");
}

double FieldTable::eval(double t, double x, int side, int order) const {
  int sd = side_of(x, side);
  double s = std::abs(x);
  std::size_t j = bracket(times_, t);
  const CubicSpline& a = levels_[j].spline(sd);
  double v;
  if (levels_.size() == 1) {
    v = a.eval(s, order);
  } else {
    const CubicSpline& b = levels_[j + 1].spline(sd);
    double th = theta(times_, j, t);
    if (s >= levels_[j].half_width()) {
      v = (1.0 - th) * a.eval(s, order) + th * b.eval(s, order);
    } else {
      std::size_t i = a.locate(s);
      v = (1.0 - th) * a.eval_on(i, s, order) + th * b.eval_on(i, s, order);
    }
  }
  return (sd < 0 && (order & 1)) ? -v : v;
}

void FieldTable::eval_slope(double t, double x, int side, double& v, double& dv) const {
  int sd = side_of(x, side);
  double s = std::abs(x);
  std::size_t j = bracket(times_, t);
  const CubicSpline& a = levels_[j].spline(sd);
  if (levels_.size() == 1 || s >= levels_[j].half_width()) {
    double th = levels_.size() == 1 ? 0.0 : theta(times_, j, t);
    const CubicSpline& b = levels_.size() == 1 ? a : levels_[j + 1].spline(sd);
    v = (1.0 - th) * a.eval(s, 0) + th * b.eval(s, 0);
    dv = (1.0 - th) * a.eval(s, 1) + th * b.eval(s, 1);
  } else {
    const CubicSpline& b = levels_[j + 1].spline(sd);
    double th = theta(times_, j, t);
    std::size_t i = a.locate(s);
    v = (1.0 - th) * a.eval_on(i, s, 0) + th * b.eval_on(i, s, 0);
    dv = (1.0 - th) * a.eval_on(i, s, 1) + th * b.eval_on(i, s, 1);
  }
  if (sd < 0) dv = -dv;
}

TraceRates trace_rates(const History& h, const TimeLevels& lv, const Flux& f, std::size_t m) {
  TraceRates r;
  if (m == 0) return r;
  double dt = lv.trace[m] - lv.trace[m - 1];
  double wm1 = h.trace_minus[m], wp1 = h.trace_plus[m];
  double wm0 = h.trace_minus[m - 1], wp0 = h.trace_plus[m - 1];
  double s1 = rh_speed(f, wm1, wp1), s0 = rh_speed(f, wm0, wp0);
  r.sigma_dot = ((wm1 - wp1) - (wm0 - wp0)) / dt;
  r.b_minus_dot = ((f.eval(wm1, 1) - s1) - (f.eval(wm0, 1) - s0)) / dt;
  r.b_plus_dot = ((f.eval(wp1, 1) - s1) - (f.eval(wp0, 1) - s0)) / dt;
  r.valid = true;
  return r;
}

CorrectorParams level_corrector(const ProblemSpec& spec, const History& w, const TimeLevels& lv,
                                std::size_t j) {
  std::size_t m = lv.field_to_trace[j];
  TraceRates rt = trace_rates(w, lv, spec.flux, m);
  SourceContext c = make_source_context(spec.kernel, spec.flux, w.fields[j], spec.v_bar,
                                        lv.field[j], rt.sigma_dot, rt.b_minus_dot,
                                        rt.b_plus_dot, rt.valid);
  return c.cp;
}

History constant_history(const ProblemSpec& spec, const TimeLevels& lv,
                         const std::vector<double>& r) {
  History h;
  const InitialData& d = spec.data;
  PiecewiseField w = PiecewiseField::sample(r, [&](double x, int side) { return d.w_bar(x, side); });
  h.fields.assign(lv.field.size(), w);
  h.trace_minus.assign(lv.trace.size(), w.trace(-1));
  h.trace_plus.assign(lv.trace.size(), w.trace(1));
  return h;
}

CoefficientField make_coefficient(const ProblemSpec& spec, const History& w, const TimeLevels& lv) {
  const std::size_t nf = lv.field.size();
  std::vector<PiecewiseField> levels(nf);
  const std::vector<double>& r = w.fields[0].radii();
  for (std::size_t j = 0; j < nf; ++j) {
    CorrectorParams cp = level_corrector(spec, w, lv, j);
    const PiecewiseField& wj = w.fields[j];
    double speed = rh_speed(spec.flux, wj.trace(-1), wj.trace(1));
    std::vector<double> left(r.size()), right(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      for (int side : {-1, 1}) {
        double x = side * r[i];
        double wv = side < 0 ? wj.left_values()[i] : wj.right_values()[i];
        double phi = corrector_eval(cp, x, 0, side);
        (side < 0 ? left : right)[i] = spec.flux.eval(wv + phi, 1) - speed;
      }
    }
    levels[j] = PiecewiseField(r, std::move(left), std::move(right));
  }
  CoefficientField a;
  a.a = FieldTable(lv.field, std::move(levels));
  a.b0 = compute_b0(spec.flux, spec.delta0, spec.M0);
  a.b1 = compute_b1(spec.flux, spec.M0);
  return a;
}

bool sign_condition_holds(const CoefficientField& a, double delta) {
  for (std::size_t j = 0; j < a.a.size(); ++j) {
    const PiecewiseField& f = a.a.level(j);
    const std::vector<double>& r = f.radii();
    for (std::size_t i = 1; i < r.size() && r[i] <= 2.0 * delta; ++i) {
      if (f.right_values()[i] > -0.5 * a.b0) return false;
      if (f.left_values()[i] < 0.5 * a.b0) return false;
    }
  }
  return true;
}

double sign_condition_delta(const CoefficientField& a, double delta_max) {
  double d = std::exp2(std::floor(std::log2(delta_max)));
  for (int k = 0; k < 40; ++k, d *= 0.5)
    if (sign_condition_holds(a, d)) return d;
  return 0.0;
}

CharacteristicPath trace_characteristic(const SpaceTimeFn& a, const SpaceTimeFn& a_x,
                                        const std::vector<double>& grid, double x0, int side,
                                        const SpaceTimeFn* source, double t_source, double alpha,
                                        double step_factor, double min_step) {
  if (grid.size() < 2) throw Error(ErrorCode::precondition, "time grid needs two points");
  if (x0 == 0.0 && side == 0) throw Error(ErrorCode::domain, "anchor at the shock needs a side");
  int sd = side_of(x0, side);
  auto coef = [&](double t, double x, int s, double& v, double& dv) {
    v = a(t, x, s);
    dv = a_x(t, x, s);
  };
  if (source) {
    double ts = t_source > 0.0 ? t_source : grid[1];
    return integrate(coef, source, grid, grid.size() - 1, x0, sd, ts, alpha, step_factor,
                     min_step, true, nullptr);
  }
  return integrate(coef, static_cast<const SpaceTimeFn*>(nullptr), grid, grid.size() - 1, x0, sd,
                   0.0, alpha, step_factor, min_step, true, nullptr);
}

CharacteristicPath trace_characteristic(const SpaceTimeFn& a, const SpaceTimeFn& a_x, double t0,
                                        double x0, int side, int n_steps) {
  if (!(t0 > 0.0) || n_steps < 1) throw Error(ErrorCode::precondition, "invalid path horizon");
  std::vector<double> grid(n_steps + 1);
  for (int i = 0; i <= n_steps; ++i) grid[i] = i == n_steps ? t0 : t0 * i / n_steps;
  return trace_characteristic(a, a_x, grid, x0, side);
}

History picard_step(const ProblemSpec& spec, const CoefficientField& a, const History& wk,
                    const TimeLevels& lv, const std::vector<double>& r, const SourceBatch& batch,
                    const SolverSettings& s, InvariantCounts* counts, FieldTable* source_out) {
  const std::size_t nf = lv.field.size(), nr = r.size();
  const bool zero_source = spec.kernel.is_zero() && spec.v_bar.is_zero();

  // source table on the positive field levels
  std::vector<double> ftimes(lv.field.begin() + 1, lv.field.end());
  std::vector<PiecewiseField> flevels(nf - 1);
  for (std::size_t j = 1; j < nf; ++j) {
    if (zero_source) {
      flevels[j - 1] = zero_field(r);
      continue;
    }
    std::size_t m = lv.field_to_trace[j];
    TraceRates rt = trace_rates(wk, lv, spec.flux, m);
    SourceContext ctx = make_source_context(spec.kernel, spec.flux, wk.fields[j], spec.v_bar,
                                            lv.field[j], rt.sigma_dot, rt.b_minus_dot,
                                            rt.b_plus_dot, rt.valid);
    std::vector<double> left, right;
    batch.evaluate(ctx, left, right);
    flevels[j - 1] = PiecewiseField(r, std::move(left), std::move(right));
  }
  FieldTable F(std::move(ftimes), std::move(flevels));
  const double t_src = lv.field[1];

  struct Anchor {
    std::size_t m0;
    double x0;
    int side;
    std::size_t level;  // field level or npos
    std::size_t node;
  };
  const std::size_t npos = std::numeric_limits<std::size_t>::max();
  std::vector<Anchor> anchors;
  std::vector<char> is_field(lv.trace.size(), 0);
  for (std::size_t j = 1; j < nf; ++j) {
    is_field[lv.field_to_trace[j]] = 1;
    for (std::size_t i = 0; i < nr; ++i)
      for (int side : {-1, 1}) anchors.push_back({lv.field_to_trace[j], side * r[i], side, j, i});
  }
  for (std::size_t m = 1; m < lv.trace.size(); ++m)
    if (!is_field[m])
      for (int side : {-1, 1}) anchors.push_back({m, 0.0, side, npos, 0});

  Funnel funnel{a.b0, a.b1, a.delta1};
  const InitialData& d = spec.data;
  const double alpha = spec.data.alpha;
  std::vector<double> value(anchors.size());
  std::vector<int> violations(anchors.size(), 0);
  auto coef = [&](double t, double x, int side, double& v, double& dv) {
    a.a.eval_slope(t, x, side, v, dv);
  };
  auto src = [&](double t, double x, int side) { return F.eval(t, x, side); };
  parallel_for(anchors.size(), [&](std::size_t q) {
    const Anchor& an = anchors[q];
    CharacteristicPath p =
        zero_source
            ? integrate(coef, static_cast<const decltype(src)*>(nullptr), lv.trace, an.m0, an.x0,
                        an.side, t_src, alpha, s.step_factor, s.min_step, false, &funnel)
            : integrate(coef, &src, lv.trace, an.m0, an.x0, an.side, t_src, alpha,
                        s.step_factor, s.min_step, false, &funnel);
    value[q] = d.w_bar(foot(p), an.side) + p.integral;
    violations[q] = p.funnel_violations;
  });

  History out;
  out.fields.resize(nf);
  out.trace_minus.assign(lv.trace.size(), 0.0);
  out.trace_plus.assign(lv.trace.size(), 0.0);
  std::vector<std::vector<double>> left(nf, std::vector<double>(nr)), right = left;
  out.fields[0] = wk.fields[0];
  out.trace_minus[0] = wk.trace_minus[0];
  out.trace_plus[0] = wk.trace_plus[0];
  for (std::size_t q = 0; q < anchors.size(); ++q) {
    const Anchor& an = anchors[q];
    if (an.level != npos) {
      (an.side < 0 ? left : right)[an.level][an.node] = value[q];
      if (an.node == 0) (an.side < 0 ? out.trace_minus : out.trace_plus)[an.m0] = value[q];
    } else {
      (an.side < 0 ? out.trace_minus : out.trace_plus)[an.m0] = value[q];
    }
  }
  for (std::size_t j = 1; j < nf; ++j)
    out.fields[j] = PiecewiseField(r, std::move(left[j]), std::move(right[j]));
  if (counts) {
    for (int v : violations) counts->funnel += v;
    counts->paths += static_cast<long>(anchors.size());
  }
  if (source_out) *source_out = std::move(F);
  return out;
}

namespace {

void check_gates(const ProblemSpec& spec, const History& w, const TimeLevels& lv) {
  double w0m = spec.data.w_bar(0.0, -1), w0p = spec.data.w_bar(0.0, 1);
  double lim = spec.delta0 / 3.0;
  for (std::size_t m = 0; m < lv.trace.size(); ++m) {
    double dm = std::abs(w.trace_minus[m] - w0m), dp = std::abs(w.trace_plus[m] - w0p);
    if (!(dm <= lim) || !(dp <= lim)) {
      std::ostringstream os;
      os << "trace drift " << std::max(dm, dp) << " exceeds delta0/3 = " << lim << " at t = "
         << lv.trace[m];
      throw Error(ErrorCode::horizon, os.str());
    }
  }
  for (std::size_t j = 0; j < lv.field.size(); ++j) {
    double n = sobolev_norm(w.fields[j], 2);
    if (!(n <= spec.M0)) {
      std::ostringstream os;
      os << "H2 norm " << n << " exceeds M0 = " << spec.M0 << " at t = " << lv.field[j];
      throw Error(ErrorCode::horizon, os.str());
    }
  }
}

double h_norm_diff(const History& a, const History& b, int order) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.fields.size(); ++j)
    m = std::max(m, sobolev_norm(a.fields[j] - b.fields[j], order));
  return m;
}

// |w2' - w1'| at the traces, per trace level
std::vector<double> rate_difference(const History& w2, const History& w1, const TimeLevels& lv) {
  std::vector<double> s(lv.trace.size(), 0.0);
  for (std::size_t m = 1; m < lv.trace.size(); ++m) {
    double dt = lv.trace[m] - lv.trace[m - 1];
    double dm = (w2.trace_minus[m] - w2.trace_minus[m - 1]) - (w1.trace_minus[m] - w1.trace_minus[m - 1]);
    double dp = (w2.trace_plus[m] - w2.trace_plus[m - 1]) - (w1.trace_plus[m] - w1.trace_plus[m - 1]);
    s[m] = std::max(std::abs(dm), std::abs(dp)) / dt;
  }
  return s;
}

struct Gamma2Samples {
  std::vector<std::array<double, 3>> pt, h2;
  std::vector<double> pt_env, h2_env;
};

void collect_gamma2(Gamma2Samples& g, const FieldTable& F2, const FieldTable& F1,
                    const History& w2, const History& w1, const TimeLevels& lv, double alpha,
                    double ell_constant) {
  std::vector<double> sig = rate_difference(w2, w1, lv);
  const std::vector<double> deltas{1.0 / 64, 1.0 / 16, 1.0 / 4};
  for (std::size_t j = 1; j < lv.field.size(); ++j) {
    double t = lv.field[j];
    double M2 = sobolev_norm(w2.fields[j] - w1.fields[j], 2);
    double S = sig[lv.field_to_trace[j]];
    double ell = ell_constant * std::pow(t, alpha - 1.0);
    const PiecewiseField& a = F2.level(j - 1);
    const PiecewiseField& b = F1.level(j - 1);
    const std::vector<double>& r = a.radii();
    for (std::size_t i = 1; i < r.size() && r[i] < 0.25; ++i) {
      double xa = std::pow(r[i], alpha);
      double env = M2 * (std::pow(t, alpha - 1.0) + ell * (std::pow(t, alpha) + xa)) + S * xa;
      if (!(env > 1e-300)) continue;
      for (int side : {-1, 1}) {
        double dF = side < 0 ? a.left_values()[i] - b.left_values()[i]
                             : a.right_values()[i] - b.right_values()[i];
        g.pt.push_back({side * r[i], t, std::abs(dF)});
        g.pt_env.push_back(env);
      }
    }
    PiecewiseField dF = a - b;
    for (double dl : deltas) {
      double env = M2 * (ell * std::pow(dl, alpha - 1.5) +
                         std::pow(dl, -2.0 / 3.0) * std::pow(t, 2.0 * alpha - 11.0 / 6.0)) +
                   S * std::pow(dl, alpha - 1.5);
      if (!(env > 1e-300)) continue;
      g.h2.push_back({dl, t, sobolev_norm(dF, 2, dl)});
      g.h2_env.push_back(env);
    }
  }
}

}  // namespace

InnerResult inner_solve(const ProblemSpec& spec, const CoefficientField& a, const TimeLevels& lv,
                        const std::vector<double>& r, const SourceBatch& batch,
                        const SolverSettings& s, double ell_constant, InvariantCounts* counts) {
  InnerResult res;
  History wk = constant_history(spec, lv, r);
  FieldTable Fprev;
  bool have_prev = false;
  History wprev;
  Gamma2Samples g2;
  const double alpha = spec.data.alpha;
  for (int k = 1; k <= s.k_max; ++k) {
    FieldTable Fk;
    History next = picard_step(spec, a, wk, lv, r, batch, s, counts, &Fk);
    check_gates(spec, next, lv);
    double beta = h_norm_diff(next, wk, 2);
    std::vector<double> sig = rate_difference(next, wk, lv);
    double sigma = 0.0;
    for (std::size_t m = 1; m < sig.size(); ++m)
      sigma = std::max(sigma, std::pow(lv.trace[m], 1.0 - alpha) * sig[m]);
    res.beta.push_back(beta);
    res.sigma.push_back(sigma);
    if (!std::isfinite(beta)) throw Error(ErrorCode::convergence, "inner iterate not finite");
    if (have_prev) collect_gamma2(g2, Fk, Fprev, wk, wprev, lv, alpha, ell_constant);
    res.iterations = k;
    if (beta <= s.tol_inner) {
      res.w = std::move(next);
      if (!g2.pt.empty())
        res.gamma2.push_back(fit_envelope("gamma2_pointwise", "M2(t)[t^(a-1)+l(t)(t^a+|x|^a)]+S(t)|x|^a",
                                          g2.pt, g2.pt_env));
      if (!g2.h2.empty())
        res.gamma2.push_back(fit_envelope(
            "gamma2_h2", "M2(t)[l(t)d^(a-3/2)+d^(-2/3)t^(2a-11/6)]+S(t)d^(a-3/2)", g2.h2, g2.h2_env));
      return res;
    }
    wprev = std::move(wk);
    wk = std::move(next);
    Fprev = std::move(Fk);
    have_prev = true;
  }
  std::ostringstream os;
  os << "inner iteration did not reach " << s.tol_inner << " in " << s.k_max
     << " steps (last beta " << res.beta.back() << ")";
  throw Error(ErrorCode::convergence, os.str());
}

std::vector<double> prepare_grid(ProblemSpec& spec, const SolverSettings& s, double T) {
  double L = s.L_min;
  auto grid = [&](double len) { return graded_nodes(len, s.h0_rel * len, s.ratio, s.hmax); };
  std::vector<double> r = grid(L);
  finalize_spec(spec, r);
  if (spec.data.compact()) {
    // window wide enough that feet of characteristics from |x| <= 3 stay inside,
    // using twice the initial characteristic speed as the bound
    const InitialData& d = spec.data;
    double s0 = rh_speed(spec.flux, d.w_bar(0.0, -1), d.w_bar(0.0, 1)), v = 0.0;
    for (int i = -2000; i <= 2000; ++i) {
      double x = L * i / 2000.0;
      for (int side : {-1, 1})
        v = std::max(v, std::abs(spec.flux.eval(d.w_bar(x, side) + spec.v_bar.eval(x), 1) - s0));
    }
    double need = 3.0 + 4.0 * v * T;
    if (need > L) {
      L = need;
      r = grid(L);
      finalize_spec(spec, r);
    }
  }
  spec.L = L;
  spec.T = T;
  return r;
}

static void require_time(const Solution& s, double t) {
  if (t < 0.0 || t > s.T() * (1.0 + 1e-12)) throw Error(ErrorCode::range, "time outside the solution");
}

double Solution::u_level(std::size_t j, double x, int side) const {
  return w.fields[j].eval(x, side) + corrector_eval(corrector[j], x, 0, side);
}

double Solution::w_at(double t, double x, int side) const {
  require_time(*this, t);
  std::size_t j = bracket(levels.field, t);
  double th = theta(levels.field, j, t);
  return (1.0 - th) * w.fields[j].eval(x, side) + th * w.fields[j + 1].eval(x, side);
}

double Solution::u_at(double t, double x, int side) const {
  require_time(*this, t);
  std::size_t j = bracket(levels.field, t);
  double th = theta(levels.field, j, t);
  return (1.0 - th) * u_level(j, x, side) + th * u_level(j + 1, x, side);
}

double Solution::shock_position(double t) const { return trace_at(t).y; }

ShockPathSample Solution::trace_at(double t) const {
  require_time(*this, t);
  std::size_t m = bracket(levels.trace, t);
  double th = theta(levels.trace, m, t);
  const ShockPathSample &a = shock_path[m], &b = shock_path[m + 1];
  ShockPathSample o;
  o.t = t;
  o.u_minus = (1.0 - th) * a.u_minus + th * b.u_minus;
  o.u_plus = (1.0 - th) * a.u_plus + th * b.u_plus;
  o.speed = (1.0 - th) * a.speed + th * b.speed;
  // exact integral of the linear speed over the partial interval
  double dt = t - a.t;
  o.y = a.y + dt * a.speed + 0.5 * dt * dt * (b.speed - a.speed) / (b.t - a.t);
  return o;
}

namespace {

Solution assemble(const ProblemSpec& spec, const SolverSettings& s, const TimeLevels& lv,
                  const std::vector<double>& r, History w) {
  Solution sol;
  sol.spec = spec;
  sol.settings = s;
  sol.levels = lv;
  sol.r = r;
  sol.w = std::move(w);
  for (std::size_t j = 0; j < lv.field.size(); ++j)
    sol.corrector.push_back(level_corrector(spec, sol.w, lv, j));
  double y = spec.y0;
  for (std::size_t m = 0; m < lv.trace.size(); ++m) {
    ShockPathSample p;
    p.t = lv.trace[m];
    // the corrector vanishes at the shock, so u(t, 0±) = w(t, 0±)
    p.u_minus = sol.w.trace_minus[m];
    p.u_plus = sol.w.trace_plus[m];
    p.speed = rh_speed(spec.flux, p.u_minus, p.u_plus);
    if (m > 0) y += 0.5 * (p.t - lv.trace[m - 1]) * (p.speed + sol.shock_path.back().speed);
    p.y = y;
    sol.shock_path.push_back(p);
  }
  return sol;
}

double trace_envelope_constant(const History& w, const TimeLevels& lv, double alpha,
                               std::vector<std::array<double, 3>>* samples = nullptr) {
  double c = 0.0;
  for (std::size_t m = 1; m < lv.trace.size(); ++m) {
    double dt = lv.trace[m] - lv.trace[m - 1], tf = std::pow(lv.trace[m], 1.0 - alpha);
    double dm = std::abs(w.trace_minus[m] - w.trace_minus[m - 1]) / dt * tf;
    double dp = std::abs(w.trace_plus[m] - w.trace_plus[m - 1]) / dt * tf;
    c = std::max({c, dm, dp});
    if (samples) samples->push_back({lv.trace[m], dm, dp});
  }
  return c;
}

void count_invariants(const ProblemSpec& spec, const History& w, const TimeLevels& lv,
                      InvariantCounts& c) {
  c.min_sigma = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < lv.trace.size(); ++m) {
    double wm = w.trace_minus[m], wp = w.trace_plus[m], sg = wm - wp;
    c.min_sigma = std::min(c.min_sigma, sg);
    if (!(sg > spec.delta0 / 3.0)) ++c.entropy;
    if (sg > 0.0) {
      double sp = rh_speed(spec.flux, wm, wp);
      if (!(spec.flux.eval(wm, 1) - sp > 0.0 && spec.flux.eval(wp, 1) - sp < 0.0)) ++c.b_ordering;
    } else {
      ++c.b_ordering;
    }
  }
  for (std::size_t j = 0; j < lv.field.size(); ++j) {
    double n = sobolev_norm(w.fields[j], 2);
    c.max_h2 = std::max(c.max_h2, n);
    if (!(n <= spec.M0)) ++c.norm;
  }
}

struct Attempt {
  Solution sol;
  IterationDiagnostics diag;
  bool certificate = false;
  std::string reason;
};

Attempt run_attempt(ProblemSpec spec, const SolverSettings& s, double T, const SourceBatch* batch_in,
                    const std::vector<double>* r_in,
                    const std::function<void(const std::string&)>& log) {
  Attempt at;
  std::vector<double> r = prepare_grid(spec, s, T);
  SourceBatch local;
  const SourceBatch* batch = batch_in;
  if (!batch || !r_in || *r_in != r) {
    local = SourceBatch(spec.kernel, r, s.nq);
    batch = &local;
  }
  TimeLevels lv = TimeLevels::make(T, s.macro_steps, s.trace_refine, s.graded_levels);
  IterationDiagnostics& d = at.diag;
  d.T = T;
  d.L = spec.L;
  History wn = constant_history(spec, lv, r);
  CoefficientField a = make_coefficient(spec, wn, lv);
  double delta1 = sign_condition_delta(a, spec.L / 2.0);
  if (!(delta1 > 0.0)) throw Error(ErrorCode::horizon, "sign condition fails for every delta");
  d.delta1 = delta1;
  d.b0 = a.b0;
  d.b1 = a.b1;
  const double alpha = spec.data.alpha;
  const std::size_t nf = lv.field.size();
  auto store_correctors = [&](const History& w) {
    std::vector<CorrectorParams> ps;
    int ns = std::max(1, s.corrector_samples);
    for (int i = 1; i <= ns; ++i) {
      std::size_t j = static_cast<std::size_t>(std::lround(double(i) * (nf - 1) / ns));
      ps.push_back(level_corrector(spec, w, lv, std::max<std::size_t>(j, 1)));
    }
    d.iterate_correctors.push_back(std::move(ps));
  };
  store_correctors(wn);
  InvariantCounts counts;
  bool converged = false;
  for (int n = 1; n <= s.n_max; ++n) {
    if (n > 1) {
      a = make_coefficient(spec, wn, lv);
    }
    a.delta1 = delta1;
    if (!sign_condition_holds(a, delta1)) {
      std::ostringstream os;
      os << "sign condition violated by a_" << n << " on |x| <= " << 2 * delta1;
      throw Error(ErrorCode::horizon, os.str());
    }
    double ell = trace_envelope_constant(wn, lv, alpha);
    InnerResult inner = inner_solve(spec, a, lv, r, *batch, s, ell, &counts);
    d.picard_steps += inner.iterations;
    d.beta_inner.push_back(inner.beta);
    d.sigma_inner.push_back(inner.sigma);
    for (const BoundReport& b : inner.gamma2) {
      d.fitted_gamma2 = std::max(d.fitted_gamma2, b.fitted_constant);
      d.gamma2_reports.push_back(b);
    }
    double beta = h_norm_diff(inner.w, wn, 1);
    d.beta_outer.push_back(beta);
    std::size_t nb = d.beta_outer.size();
    if (nb >= 2 && d.beta_outer[nb - 2] > 1e-14) d.contraction_ratios.push_back(beta / d.beta_outer[nb - 2]);
    if (log) {
      std::ostringstream os;
      os << "T=" << T << " outer " << n << ": inner k=" << inner.iterations << " beta_n=" << beta;
      log(os.str());
    }
    wn = std::move(inner.w);
    store_correctors(wn);
    if (beta <= s.tol_outer) {
      converged = true;
      break;
    }
  }
  at.certificate = converged;
  for (double q : d.contraction_ratios)
    if (!(q < 0.5)) at.certificate = false;
  if (!converged) at.reason = "outer iteration did not converge";
  else if (!at.certificate) at.reason = "contraction ratio >= 1/2";
  count_invariants(spec, wn, lv, counts);
  d.invariants = counts;
  d.lipschitz_constant = trace_envelope_constant(wn, lv, alpha, &d.lipschitz_envelope);
  d.certificate = at.certificate;
  at.sol = assemble(spec, s, lv, r, std::move(wn));
  return at;
}

// Largest dyadic fraction T of 1/(4 b1) with T <= delta1(T)/(2 b1), where delta1(T)
// comes from the sign condition of the first coefficient on [0, T].
double horizon_search(const ProblemSpec& spec0, const SolverSettings& s,
                      const std::function<void(const std::string&)>& log) {
  ProblemSpec spec = spec0;
  prepare_grid(spec, s, 1.0);
  double b1 = compute_b1(spec.flux, spec.M0);
  double T = 1.0 / (4.0 * b1);
  for (int it = 0; it < 40; ++it, T *= 0.5) {
    std::vector<double> r = prepare_grid(spec, s, T);
    TimeLevels lv = TimeLevels::make(T, s.macro_steps, s.trace_refine, s.graded_levels);
    CoefficientField a = make_coefficient(spec, constant_history(spec, lv, r), lv);
    double d1 = sign_condition_delta(a, spec.L / 2.0);
    if (log) {
      std::ostringstream os;
      os << "horizon search: T=" << T << " delta1=" << d1 << " b1=" << b1;
      log(os.str());
    }
    if (d1 > 0.0 && d1 / (2.0 * b1) >= T) return T;
  }
  throw Error(ErrorCode::horizon, "horizon search did not settle");
}

}  // namespace

SolveResult outer_solve(const ProblemSpec& spec, const SolverSettings& s,
                        const std::function<void(const std::string&)>& log) {
  double T = s.T > 0.0 ? s.T : horizon_search(spec, s, log);
  IterationDiagnostics summary;
  summary.T_start = T;
  ProblemSpec probe = spec;
  std::vector<double> r0 = prepare_grid(probe, s, T);
  SourceBatch batch(spec.kernel, r0, s.nq);
  for (int h = 0; h <= s.halvings_max; ++h) {
    try {
      Attempt at = run_attempt(spec, s, T, &batch, &r0, log);
      at.diag.T_start = summary.T_start;
      at.diag.halvings = h;
      at.diag.attempts = summary.attempts;
      std::ostringstream os;
      os << "T=" << T << ": " << (at.certificate ? "certificate" : at.reason);
      at.diag.attempts.push_back(os.str());
      if (log) log(os.str());
      if (at.certificate) return {std::move(at.sol), std::move(at.diag)};
      summary = at.diag;
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::horizon:
        case ErrorCode::convergence:
        case ErrorCode::integration:
        case ErrorCode::stiffness:
        case ErrorCode::inadmissible: {
          std::ostringstream os;
          os << "T=" << T << ": " << error_name(e.code()) << ": " << e.what();
          summary.attempts.push_back(os.str());
          if (log) log(os.str());
          break;
        }
        default:
          throw;
      }
    }
    summary.halvings = h;
    T *= 0.5;
  }
  summary.certificate = false;
  throw NoCertificateError("no contraction certificate after " + std::to_string(s.halvings_max) +
                               " halvings",
                           summary);
}

BalanceReport characteristic_balance_check(const Solution& sol, int n_paths, unsigned seed) {
  BalanceReport rep;
  const TimeLevels& lv = sol.levels;
  const Flux& f = sol.spec.flux;
  const Kernel& k = sol.spec.kernel;
  std::vector<std::size_t> cand;
  double T = sol.T();
  for (std::size_t j = 1; j + 1 < lv.field.size(); ++j)
    if (lv.field[j] >= 0.1 * T && lv.field[j] <= 0.9 * T) cand.push_back(j);
  if (cand.empty() || n_paths <= 0) return rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> uj(0, cand.size() - 1);
  struct Job {
    std::size_t j;
    double x;
  };
  std::vector<Job> jobs;
  for (int i = 0; i < n_paths; ++i) {
    double x = ux(rng);
    if (std::abs(x) < 0.02) x = std::copysign(0.02, x == 0.0 ? 1.0 : x);
    jobs.push_back({cand[uj(rng)], x});
  }
  auto speed = [&](double t, double x, int side) {
    return f.eval(sol.u_at(t, x, side), 1) - sol.trace_at(t).speed;
  };
  // RK4 from (t0, x0) to t1 along x' = f'(u) - s
  auto move = [&](double t0, double x0, double t1, int side) {
    const int n = 16;
    double h = (t1 - t0) / n, x = x0, t = t0;
    for (int i = 0; i < n; ++i) {
      double k1 = speed(t, x, side);
      double k2 = speed(t + 0.5 * h, x + 0.5 * h * k1, side);
      double k3 = speed(t + 0.5 * h, x + 0.5 * h * k2, side);
      double k4 = speed(t + h, x + h * k3, side);
      x += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
      t += h;
    }
    return x;
  };
  std::vector<double> res(jobs.size(), -1.0);
  parallel_for(jobs.size(), [&](std::size_t q) {
    const Job& jb = jobs[q];
    int side = jb.x < 0.0 ? -1 : 1;
    double t = lv.field[jb.j], tm = lv.field[jb.j - 1], tp = lv.field[jb.j + 1];
    double xm = move(t, jb.x, tm, side), xp = move(t, jb.x, tp, side);
    if (side * xm <= 0.0 || side * xp <= 0.0) return;
    double dudt = (sol.u_level(jb.j + 1, xp, side) - sol.u_level(jb.j - 1, xm, side)) / (tp - tm);
    double g = 0.0;
    if (!k.is_zero()) {
      g = g_apply_jump_form(k, sol.w.fields[jb.j].view(), jb.x) +
          g_apply_jump_form(k, corrector_view(sol.corrector[jb.j]), jb.x);
    }
    res[q] = std::abs(dudt - g);
  });
  double sum = 0.0;
  for (double v : res) {
    if (v < 0.0) continue;
    ++rep.paths;
    sum += v;
    rep.max_residual = std::max(rep.max_residual, v);
  }
  rep.mean_residual = rep.paths ? sum / rep.paths : 0.0;
  return rep;
}

std::vector<std::array<double, 3>> trace_derivatives(const Solution& sol) {
  std::vector<std::array<double, 3>> out;
  const std::vector<double>& t = sol.levels.trace;
  for (std::size_t m = 1; m < t.size(); ++m) {
    double dt = t[m] - t[m - 1];
    out.push_back({t[m], (sol.w.trace_minus[m] - sol.w.trace_minus[m - 1]) / dt,
                   (sol.w.trace_plus[m] - sol.w.trace_plus[m - 1]) / dt});
  }
  return out;
}

LipschitzReport lipschitz_trace_check(const Solution& sol, double t_min_fraction) {
  LipschitzReport rep;
  double alpha = sol.spec.data.alpha, T = sol.T();
  std::vector<std::array<double, 3>> samples;
  std::vector<double> env;
  std::vector<double> lt[2], lv[2];
  double scale = 0.0;
  for (const auto& d : trace_derivatives(sol)) scale = std::max({scale, std::abs(d[1]), std::abs(d[2])});
  for (const auto& d : trace_derivatives(sol)) {
    if (d[0] < t_min_fraction * T * (1.0 - 1e-12)) continue;
    for (int side = 0; side < 2; ++side) {
      double v = std::abs(d[1 + side]);
      samples.push_back({side == 0 ? -1.0 : 1.0, d[0], v});
      env.push_back(std::pow(d[0], alpha - 1.0));
      if (v > 1e-12 * std::max(1.0, scale) && v > 1e-13) {
        lt[side].push_back(std::log(d[0]));
        lv[side].push_back(std::log(v));
      }
    }
  }
  rep.envelope = fit_envelope("trace_derivative", "t^(alpha-1)", samples, env);
  auto slope = [](const std::vector<double>& x, const std::vector<double>& y) {
    // require most of the window to be resolved
    if (x.size() < 3) return std::numeric_limits<double>::quiet_NaN();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
    return sxy / sxx;
  };
  std::size_t nsamp = samples.size() / 2;
  rep.exponent_minus = lt[0].size() * 2 >= nsamp ? slope(lt[0], lv[0]) : std::numeric_limits<double>::quiet_NaN();
  rep.exponent_plus = lt[1].size() * 2 >= nsamp ? slope(lt[1], lv[1]) : std::numeric_limits<double>::quiet_NaN();
  if (std::isnan(rep.exponent_minus)) rep.exponent = rep.exponent_plus;
  else if (std::isnan(rep.exponent_plus)) rep.exponent = rep.exponent_minus;
  else rep.exponent = std::min(rep.exponent_minus, rep.exponent_plus);
  if (std::isnan(rep.exponent)) rep.envelope.fitted_constant = 0.0;
  return rep;
}

void write_solution_csv(const Solution& sol, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const TimeLevels& lv = sol.levels;
  const std::vector<double>& r = sol.r;
  int snap = 0;
  for (std::size_t j = 0; j < lv.field.size(); ++j) {
    // graded start-up levels are kept internal
    if (j > 0 && j <= static_cast<std::size_t>(sol.settings.graded_levels)) continue;
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%03d.csv", snap++);
    std::ofstream out(fs::path(dir) / name);
    out << "t,x,side,w,phi,u\n";
    char line[256];
    auto row = [&](double x, int side) {
      double w = sol.w.fields[j].eval(x, side);
      double phi = corrector_eval(sol.corrector[j], x, 0, side);
      std::snprintf(line, sizeof line, "%.17g,%.17g,%s,%.17g,%.17g,%.17g\n", lv.field[j], x,
                    side < 0 ? "left" : "right", w, phi, w + phi);
      out << line;
    };
    for (std::size_t i = r.size(); i-- > 0;) row(-r[i], -1);
    for (std::size_t i = 0; i < r.size(); ++i) row(r[i], 1);
  }
}

void write_shock_path_csv(const Solution& sol, const std::string& path) {
  std::ofstream out(path);
  out << "t,y,u_minus,u_plus,rh_speed\n";
  char line[256];
  for (const ShockPathSample& p : sol.shock_path) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.t, p.y, p.u_minus,
                  p.u_plus, p.speed);
    out << line;
  }
}

std::string diagnostics_json(const IterationDiagnostics& d, int indent) {
  using nlohmann::json;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["beta_inner"] = d.beta_inner;
  j["sigma_inner"] = d.sigma_inner;
  j["beta_outer"] = d.beta_outer;
  j["contraction_ratios"] = d.contraction_ratios;
  j["fitted_gamma1"] = num(d.fitted_gamma1);
  j["fitted_gamma2"] = num(d.fitted_gamma2);
  json g = json::array();
  for (const BoundReport& b : d.gamma2_reports) g.push_back(json::parse(bound_report_json(b)));
  j["gamma2_reports"] = g;
  json le = json::array();
  for (const auto& s : d.lipschitz_envelope) le.push_back({{"t", s[0]}, {"minus", s[1]}, {"plus", s[2]}});
  j["lipschitz_envelope"] = le;
  j["lipschitz_constant"] = num(d.lipschitz_constant);
  j["invariants"] = {{"entropy_violations", d.invariants.entropy},
                     {"norm_violations", d.invariants.norm},
                     {"funnel_violations", d.invariants.funnel},
                     {"b_ordering_violations", d.invariants.b_ordering},
                     {"min_sigma", num(d.invariants.min_sigma)},
                     {"max_h2", num(d.invariants.max_h2)},
                     {"paths", d.invariants.paths}};
  j["T_start"] = d.T_start;
  j["T"] = d.T;
  j["delta1"] = d.delta1;
  j["b0"] = d.b0;
  j["b1"] = d.b1;
  j["L"] = d.L;
  j["halvings"] = d.halvings;
  j["picard_steps"] = d.picard_steps;
  j["certificate"] = d.certificate;
  j["attempts"] = d.attempts;
  return j.dump(indent);
}

}  // namespace shockfit
