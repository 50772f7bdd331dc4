#include "shockfit/singular_operator.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "shockfit/errors.hpp"
#include "shockfit/parallel.hpp"
#include "shockfit/quadrature.hpp"
#include "shockfit/spline.hpp"

namespace shockfit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One smooth piece [a, b]; sa/sb flag integrable endpoint singularities and c is
// a singular point lying outside [a, b] (NaN when absent).
template <class F>
double piece(const F& f, double a, double b, bool sa, bool sb, double c) {
  if (!(b > a)) return 0.0;
  if (!std::isnan(c)) {
    double len = b - a;
    if (c <= a && a - c < len && !(sa && a == c)) {
      double d = a - c, s = 0.0, lo = a;
      bool first = true;
      while (lo < b) {
        double hi = std::min(b, c + 2.0 * (lo - c));
        if (b - hi < 1e-3 * (hi - lo)) hi = b;
        s += quad::graded(f, lo, hi, first && sa, hi == b && sb);
        first = false;
        lo = hi;
      }
      (void)d;
      return s;
    }
    if (c >= b && c - b < len && !(sb && b == c)) {
      double s = 0.0, hi = b;
      bool first = true;
      while (hi > a) {
        double lo = std::max(a, c - 2.0 * (c - hi));
        if (lo - a < 1e-3 * (hi - lo)) lo = a;
        s += quad::graded(f, lo, hi, lo == a && sa, first && sb);
        first = false;
        hi = lo;
      }
      return s;
    }
  }
  return quad::graded(f, a, b, sa, sb);
}

// Integrates f over [a, b] split at the given points; c is the singular point
// of the integrand (inside or near), zero_singular marks the origin as singular.
template <class F>
double split_integrate(const F& f, double a, double b, std::vector<double> pts, double c,
                       bool zero_singular) {
  if (!(b > a)) return 0.0;
  pts.push_back(a);
  pts.push_back(b);
  if (!std::isnan(c)) pts.push_back(c);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double lo = pts[i], hi = pts[i + 1];
    if (lo < a || hi > b || !(hi > lo)) continue;
    bool sa = (!std::isnan(c) && lo == c) || (zero_singular && lo == 0.0);
    bool sb = (!std::isnan(c) && hi == c) || (zero_singular && hi == 0.0);
    double cc = (std::isnan(c) || c == lo || c == hi) ? kNaN : c;
    s += piece(f, lo, hi, sa, sb, cc);
  }
  return s;
}

std::vector<double> field_points(const FieldView& g) {
  std::vector<double> pts = g.breaks;
  if (g.lo < 0.0 && g.hi > 0.0) pts.push_back(0.0);
  return pts;
}

FieldView derivative_view(const FieldView& g) {
  FieldView d = g;
  auto base = g.eval;
  d.eval = [base](double x, int side, int order) { return base(x, side, order + 1); };
  return d;
}

}  // namespace

double FieldView::at(double x, int order) const {
  if (x < lo || x > hi) return 0.0;
  return eval(x, x < 0.0 ? -1 : 1, order);
}

double FieldView::limit(double x, int side, int order) const {
  if (side > 0 && x >= hi) return 0.0;
  if (side < 0 && x <= lo) return 0.0;
  if (side > 0 && x < lo) return 0.0;
  if (side < 0 && x > hi) return 0.0;
  return eval(x, side, order);
}

FieldView SampledField::view() const {
  if (grid.size() < 2 || values.size() != grid.size())
    throw Error(ErrorCode::precondition, "sampled field needs matching grid and values");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw Error(ErrorCode::precondition, "sampled field grid must be strictly increasing");
  for (double v : values)
    if (!std::isfinite(v)) throw Error(ErrorCode::precondition, "sampled field has non-finite values");
  bool has_deriv = !derivative_values.empty();
  if (has_deriv && derivative_values.size() != grid.size())
    throw Error(ErrorCode::precondition, "derivative values do not match grid");

  struct Pieces {
    std::vector<double> x, y, d;
  };
  Pieces left, right;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double xi = grid[i];
    if (xi <= 0.0) {
      left.x.push_back(xi);
      left.y.push_back(xi == 0.0 ? one_sided_limits_at_zero[0] : values[i]);
      if (has_deriv) left.d.push_back(derivative_values[i]);
    }
    if (xi >= 0.0) {
      right.x.push_back(xi);
      right.y.push_back(xi == 0.0 ? one_sided_limits_at_zero[1] : values[i]);
      if (has_deriv) right.d.push_back(derivative_values[i]);
    }
  }
  bool straddles = grid.front() < 0.0 && grid.back() > 0.0;
  bool zero_node = std::find(grid.begin(), grid.end(), 0.0) != grid.end();
  if (straddles && !zero_node) {
    // no origin node: one smooth piece over the whole grid
    left.x = grid;
    left.y = values;
    left.d = derivative_values;
    right = Pieces{};
  }

  // Hermite interpolation when slopes are supplied, spline otherwise.
  auto make = [has_deriv](const Pieces& p) -> std::function<double(double, int)> {
    if (p.x.size() < 2) return [](double, int) { return 0.0; };
    if (!has_deriv) {
      CubicSpline s(p.x, p.y);
      return [s](double x, int order) { return s.eval(x, order); };
    }
    return [p](double x, int order) {
      auto it = std::upper_bound(p.x.begin(), p.x.end(), x);
      std::size_t i = static_cast<std::size_t>(it - p.x.begin());
      i = i == 0 ? 0 : std::min(i - 1, p.x.size() - 2);
      double h = p.x[i + 1] - p.x[i], t = (x - p.x[i]) / h;
      double y0 = p.y[i], y1 = p.y[i + 1], m0 = p.d[i] * h, m1 = p.d[i + 1] * h;
      double t2 = t * t, t3 = t2 * t;
      switch (order) {
        case 0:
          return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 +
                 (t3 - t2) * m1;
        case 1:
          return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * y1 +
                  (3 * t2 - 2 * t) * m1) / h;
        case 2:
          return ((12 * t - 6) * y0 + (6 * t - 4) * m0 + (-12 * t + 6) * y1 + (6 * t - 2) * m1) /
                 (h * h);
        case 3:
          return (12 * y0 + 6 * m0 - 12 * y1 + 6 * m1) / (h * h * h);
        default:
          return 0.0;
      }
    };
  };
  auto fl = make(left);
  auto fr = make(right);
  bool split = !right.x.empty();

  FieldView v;
  v.lo = grid.front();
  v.hi = grid.back();
  v.breaks.assign(grid.begin(), grid.end());
  v.eval = [fl, fr, split](double x, int side, int order) {
    if (!split) return fl(x, order);
    bool use_left = x < 0.0 || (x == 0.0 && side < 0);
    return use_left ? fl(x, order) : fr(x, order);
  };
  if (straddles && !zero_node) {
    v.breaks.erase(std::remove(v.breaks.begin(), v.breaks.end(), 0.0), v.breaks.end());
  }
  return v;
}

BoundReport fit_envelope(const std::string& quantity, const std::string& envelope,
                         std::vector<std::array<double, 3>> samples,
                         std::vector<double> envelope_values, std::optional<double> reference,
                         double slack) {
  if (samples.size() != envelope_values.size())
    throw Error(ErrorCode::precondition, "envelope sample mismatch");
  BoundReport r;
  r.quantity = quantity;
  r.envelope = envelope;
  r.slack = slack;
  r.reference_constant = reference;
  double fitted = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double m = std::abs(samples[i][2]), e = envelope_values[i];
    if (!std::isfinite(m)) {
      fitted = std::numeric_limits<double>::infinity();
      continue;
    }
    if (e > 0) fitted = std::max(fitted, m / e);
    else if (m > 0) fitted = std::numeric_limits<double>::infinity();
  }
  r.fitted_constant = fitted;
  double c = reference ? *reference : fitted;
  double limit = c * (1.0 + slack);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double m = std::abs(samples[i][2]), e = envelope_values[i];
    double ratio = (c * e > 0) ? m / (c * e) : (m > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    r.max_ratio = std::max(r.max_ratio, ratio);
    if (!std::isfinite(m) || m > limit * e * (1.0 + 1e-12) + 1e-300) ++r.violation_count;
  }
  r.samples = std::move(samples);
  r.envelope_values = std::move(envelope_values);
  return r;
}

std::string bound_report_json(const BoundReport& r, int indent) {
  nlohmann::json j;
  j["quantity"] = r.quantity;
  j["envelope"] = r.envelope;
  j["fitted_constant"] = r.fitted_constant;
  j["violation_count"] = r.violation_count;
  j["max_ratio"] = r.max_ratio;
  j["slack"] = r.slack;
  j["reference_constant"] = r.reference_constant ? nlohmann::json(*r.reference_constant) : nlohmann::json(nullptr);
  nlohmann::json s = nlohmann::json::array();
  for (const auto& p : r.samples) s.push_back({p[0], p[1], p[2]});
  j["samples"] = s;
  return j.dump(indent);
}

std::vector<double> default_epsilons() {
  std::vector<double> e(8);
  for (int j = 0; j < 8; ++j) e[j] = 1e-2 * std::ldexp(1.0, -j);
  return e;
}

double g_apply_pv(const Kernel& k, const FieldView& g, double x,
                  const std::vector<double>& epsilons) {
  if (k.is_zero()) return 0.0;
  if (epsilons.size() < 3) throw Error(ErrorCode::precondition, "need at least 3 epsilons");
  for (std::size_t i = 1; i < epsilons.size(); ++i)
    if (!(epsilons[i] < epsilons[i - 1]) || !(epsilons[i] > 0))
      throw Error(ErrorCode::precondition, "epsilons must decrease and stay positive");
  auto f = [&](double y) { return kernel_eval(k, x - y, 0) * g.at(y); };
  std::vector<double> pts = field_points(g);
  double e0 = epsilons.front();
  double outer = split_integrate(f, g.lo, std::min(g.hi, x - e0), pts, x - e0, false) +
                 split_integrate(f, std::max(g.lo, x + e0), g.hi, pts, x + e0, false);
  std::vector<double> est{outer};
  double acc = outer;
  for (std::size_t j = 1; j < epsilons.size(); ++j) {
    double a = epsilons[j], b = epsilons[j - 1];
    acc += split_integrate(f, std::max(g.lo, x - b), std::min(g.hi, x - a), pts, kNaN, false);
    acc += split_integrate(f, std::max(g.lo, x + a), std::min(g.hi, x + b), pts, kNaN, false);
    est.push_back(acc);
  }
  // Richardson, order 1: the symmetric exclusion error is O(eps)
  std::vector<double> rich;
  for (std::size_t j = 0; j + 1 < est.size(); ++j) {
    double ratio = epsilons[j] / epsilons[j + 1];
    rich.push_back((ratio * est[j + 1] - est[j]) / (ratio - 1.0));
  }
  double last = rich.back(), prev = rich[rich.size() - 2];
  if (!(std::abs(last - prev) <= 1e-7 * (1.0 + std::abs(last)))) {
    std::ostringstream os;
    os.precision(17);
    os << "principal value extrapolation did not converge at x=" << x << ": " << prev << " vs "
       << last;
    throw Error(ErrorCode::convergence, os.str());
  }
  return last;
}

double g_apply_pv(const Kernel& k, const SampledField& g, double x,
                  const std::vector<double>& epsilons) {
  return g_apply_pv(k, g.view(), x, epsilons);
}

double regular_integral(const Kernel& k, const FieldView& g, double x) {
  if (k.is_zero()) return 0.0;
  auto f = [&](double y) { return g.at(y, 1) * lambda_eval(k, x - y, 0); };
  bool inside = x > g.lo && x < g.hi;
  double c = inside ? x : kNaN;
  if (!inside) {
    double d = std::min(std::abs(x - g.lo), std::abs(x - g.hi));
    if (d < (g.hi - g.lo)) c = x;
  }
  return split_integrate(f, g.lo, g.hi, field_points(g), c, g.singular_at_zero);
}

double jump_terms(const Kernel& k, const FieldView& g, double x, bool include_origin) {
  if (k.is_zero()) return 0.0;
  std::vector<double> pts{g.lo, g.hi};
  if (g.lo < 0.0 && g.hi > 0.0) pts.push_back(0.0);
  double s = 0.0;
  for (double p : pts) {
    if (p == 0.0 && !include_origin) continue;
    double j = g.limit(p, 1) - g.limit(p, -1);
    if (j == 0.0) continue;
    if (x == p) throw Error(ErrorCode::domain, "jump form evaluated at a jump location");
    s += j * lambda_eval(k, x - p, 0);
  }
  return s;
}

double g_apply_jump_form(const Kernel& k, const FieldView& g, double x) {
  if (x == 0.0) throw Error(ErrorCode::domain, "jump form requires x != 0");
  return regular_integral(k, g, x) + jump_terms(k, g, x, true);
}

double g_apply_jump_form(const Kernel& k, const SampledField& g, double x) {
  if (g.derivative_values.empty())
    throw Error(ErrorCode::precondition, "jump form needs derivative values");
  return g_apply_jump_form(k, g.view(), x);
}

double g_apply_derivative(const Kernel& k, const FieldView& g, double x) {
  if (x == 0.0) throw Error(ErrorCode::domain, "derivative of G requires x != 0");
  if (k.is_zero()) return 0.0;
  FieldView d = derivative_view(g);
  double s = regular_integral(k, d, x) + jump_terms(k, d, x, true);
  std::vector<double> pts{g.lo, g.hi};
  if (g.lo < 0.0 && g.hi > 0.0) pts.push_back(0.0);
  for (double p : pts) {
    double j = g.limit(p, 1) - g.limit(p, -1);
    if (j != 0.0) s += j * kernel_eval(k, x - p, 0);
  }
  return s;
}

std::vector<double> hilbert_fft(const std::vector<double>& grid, const std::vector<double>& g) {
  std::size_t n = g.size();
  if (grid.size() != n || n < 4) throw Error(ErrorCode::precondition, "hilbert_fft size mismatch");
  double h = grid[1] - grid[0];
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((grid[i] - grid[i - 1]) - h) > 1e-9 * std::abs(h))
      throw Error(ErrorCode::precondition, "hilbert_fft needs a uniform grid");
  std::vector<double> in(g), out(n);
  std::size_t nc = n / 2 + 1;
  fftw_complex* spec = fftw_alloc_complex(nc);
  fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), spec, FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec, out.data(), FFTW_ESTIMATE);
  fftw_execute(fwd);
  // multiplier -i sign(xi)
  for (std::size_t q = 0; q < nc; ++q) {
    double re = spec[q][0], im = spec[q][1];
    if (q == 0 || (n % 2 == 0 && q == n / 2)) {
      spec[q][0] = spec[q][1] = 0.0;
    } else {
      spec[q][0] = im;
      spec[q][1] = -re;
    }
  }
  fftw_execute(bwd);
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  fftw_free(spec);
  for (double& v : out) v /= static_cast<double>(n);
  return out;
}

double regular_part(const Kernel& k, const FieldView& v, double x) {
  if (k.is_zero()) return 0.0;
  Cutoff eta;
  double s = regular_integral(k, v, x) + jump_terms(k, v, x, false);
  bool origin = v.lo < 0.0 && v.hi > 0.0;
  double j0 = origin ? v.limit(0.0, 1) - v.limit(0.0, -1) : 0.0;
  if (v.lo == 0.0) j0 = v.limit(0.0, 1);
  if (v.hi == 0.0) j0 = -v.limit(0.0, -1);
  double e = eta.eval(x, 0);
  if (j0 != 0.0 && e < 1.0) s += j0 * lambda_eval(k, x, 0) * (1.0 - e);
  return s;
}

double regular_part(const Kernel& k, const SampledField& v, double x) {
  return regular_part(k, v.view(), x);
}

std::vector<double> log_grid(double lo, double hi, int n_per_side) {
  std::vector<double> g;
  for (int i = 0; i < n_per_side; ++i) {
    double t = n_per_side == 1 ? 0.0 : static_cast<double>(i) / (n_per_side - 1);
    g.push_back(lo * std::pow(hi / lo, t));
  }
  std::vector<double> out;
  for (auto it = g.rbegin(); it != g.rend(); ++it) out.push_back(-*it);
  out.insert(out.end(), g.begin(), g.end());
  return out;
}

FieldView chi_phi_b(const Kernel& k, double b) {
  FieldView g;
  g.lo = 0.0;
  g.hi = 2.0;
  g.breaks = {1.0};
  g.eval = [k, b](double x, int side, int order) {
    if (x < 0.0 || (x == 0.0 && side < 0)) return 0.0;
    static const Cutoff eta;
    return phi_xb_eval(k, eta, x, b, order);
  };
  return g;
}

FieldView linear_profile(double lambda1, double lambda2) {
  FieldView g;
  g.lo = -2.0;
  g.hi = 2.0;
  g.breaks = {-1.0, 1.0};
  g.eval = [lambda1, lambda2](double x, int side, int order) {
    static const Cutoff eta;
    double lam = (x < 0.0 || (x == 0.0 && side < 0)) ? lambda1 : lambda2;
    double v = x * eta.eval(x, order);
    if (order > 0) v += order * eta.eval(x, order - 1);
    return lam * v;
  };
  return g;
}

EnvelopeProbe envelope_probe(const Kernel& k, const FieldView& g, const std::vector<double>& grid,
                             const std::vector<double>& deltas, bool with_d2,
                             const EnvelopeProbe* reference, double slack) {
  std::size_t n = grid.size();
  std::vector<double> val(n), d1(n), d2(n);
  parallel_for(n, [&](std::size_t i) {
    double x = grid[i];
    val[i] = g_apply_jump_form(k, g, x);
    d1[i] = g_apply_derivative(k, g, x);
    if (with_d2) {
      double h = 1e-3 * std::abs(x);
      d2[i] = (g_apply_derivative(k, g, x + h) - g_apply_derivative(k, g, x - h)) / (2.0 * h);
    }
  });
  std::vector<std::array<double, 3>> sv, s1, s2;
  std::vector<double> e0, e1, e2;
  for (std::size_t i = 0; i < n; ++i) {
    double x = grid[i], l = std::abs(std::log(std::abs(x)));
    sv.push_back({x, 0.0, val[i]});
    e0.push_back(1.0);
    s1.push_back({x, 0.0, d1[i]});
    e1.push_back(l * l);
    s2.push_back({x, 0.0, d2[i]});
    e2.push_back(l / std::abs(x));
  }
  auto ref = [&](const BoundReport EnvelopeProbe::*m) -> std::optional<double> {
    if (!reference) return std::nullopt;
    return (reference->*m).fitted_constant;
  };
  EnvelopeProbe out;
  out.value = fit_envelope("G", "c0", sv, e0, ref(&EnvelopeProbe::value), slack);
  out.d1 = fit_envelope("G_x", "c1*ln^2|x|", s1, e1, ref(&EnvelopeProbe::d1), slack);
  if (with_d2) out.d2 = fit_envelope("G_xx", "c2*|ln|x|/x|", s2, e2, ref(&EnvelopeProbe::d2), slack);

  // H^2 norm of G off [-delta, delta], truncated at |x| = far
  if (!deltas.empty()) {
    double dmin = *std::min_element(deltas.begin(), deltas.end());
    double far = std::max({4.0, 2.0 * std::abs(g.lo), 2.0 * std::abs(g.hi)});
    std::vector<double> edges;
    for (double r = dmin; r < far; r *= 1.15) edges.push_back(r);
    edges.push_back(far);
    edges.insert(edges.end(), deltas.begin(), deltas.end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    const quad::Rule& rule = quad::gauss_legendre(4);
    std::size_t np = edges.size() - 1;
    std::vector<double> contrib(np, 0.0);
    parallel_for(np, [&](std::size_t p) {
      double a = edges[p], b = edges[p + 1], c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0.0;
      for (std::size_t q = 0; q < rule.x.size(); ++q) {
        for (int sgn : {-1, 1}) {
          double x = sgn * (c + h * rule.x[q]);
          double v0 = g_apply_jump_form(k, g, x);
          double v1 = g_apply_derivative(k, g, x);
          double hh = 1e-3 * std::abs(x);
          double v2 = (g_apply_derivative(k, g, x + hh) - g_apply_derivative(k, g, x - hh)) / (2 * hh);
          s += rule.w[q] * h * (v0 * v0 + v1 * v1 + v2 * v2);
        }
      }
      contrib[p] = s;
    });
    std::vector<std::array<double, 3>> sh;
    std::vector<double> eh;
    for (double d : deltas) {
      double s = 0.0;
      for (std::size_t p = 0; p < np; ++p)
        if (edges[p] >= d) s += contrib[p];
      sh.push_back({d, 0.0, std::sqrt(s)});
      eh.push_back(std::pow(d, -2.0 / 3.0));
    }
    out.h2 = fit_envelope("G_H2_off_delta", "c3*delta^(-2/3)", sh, eh, ref(&EnvelopeProbe::h2), slack);
  }
  return out;
}

EnvelopeProbe appendix_probe(const Kernel& k, double b, const std::vector<double>& grid,
                             const std::vector<double>& deltas, const EnvelopeProbe* reference,
                             double slack) {
  if (!(b > 0.0 && b < 0.25)) throw Error(ErrorCode::range, "appendix probe needs 0 < b < 1/4");
  for (double x : grid)
    if (!(x != 0.0 && std::abs(x) < 0.25))
      throw Error(ErrorCode::precondition, "appendix probe grid must lie in 0 < |x| < 1/4");
  return envelope_probe(k, chi_phi_b(k, b), grid, deltas, true, reference, slack);
}

ProductRule::ProductRule(const Kernel& k, const std::vector<double>& partition,
                         std::vector<Target> targets, int nq)
    : targets_(std::move(targets)) {
  const quad::Rule& rule = quad::gauss_legendre(nq);
  std::size_t nint = partition.size() - 1;
  for (std::size_t j = 0; j < nint; ++j) {
    double a = partition[j], b = partition[j + 1];
    int side = b <= 0.0 ? -1 : 1;
    for (int q = 0; q < nq; ++q) {
      points_.push_back(0.5 * (a + b) + 0.5 * (b - a) * rule.x[q]);
      point_side_.push_back(side);
    }
  }
  if (k.is_zero()) return;
  std::size_t np = points_.size();
  weights_.assign(targets_.size() * np, 0.0);
  parallel_for(targets_.size(), [&](std::size_t i) {
    double x = targets_[i].x;
    double* w = &weights_[i * np];
    for (std::size_t j = 0; j < nint; ++j) {
      double a = partition[j], b = partition[j + 1], len = b - a;
      const double* y = &points_[j * nq];
      auto basis = [&](int q, double t) {
        double v = 1.0;
        for (int r = 0; r < nq; ++r)
          if (r != q) v *= (t - y[r]) / (y[q] - y[r]);
        return v;
      };
      double dist = x < a ? a - x : (x > b ? x - b : 0.0);
      if (dist > len) {
        const quad::Rule& hi = quad::gauss_legendre(16);
        for (std::size_t m = 0; m < hi.x.size(); ++m) {
          double t = 0.5 * (a + b) + 0.5 * len * hi.x[m];
          double lam = hi.w[m] * 0.5 * len * lambda_eval(k, x - t, 0);
          for (int q = 0; q < nq; ++q) w[j * nq + q] += lam * basis(q, t);
        }
        continue;
      }
      for (int q = 0; q < nq; ++q) {
        auto f = [&](double t) { return basis(q, t) * lambda_eval(k, x - t, 0); };
        w[j * nq + q] = split_integrate(f, a, b, {}, x, false);
      }
    }
  });
}

void ProductRule::apply(const std::vector<double>& gprime, std::vector<double>& out) const {
  out.assign(targets_.size(), 0.0);
  if (weights_.empty()) return;
  std::size_t np = points_.size();
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    const double* w = &weights_[i * np];
    double s = 0.0;
    for (std::size_t p = 0; p < np; ++p) s += w[p] * gprime[p];
    out[i] = s;
  }
}

}  // namespace shockfit
