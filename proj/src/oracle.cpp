#include "shockfit/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>

#include <fftw3.h>
#include <json.hpp>

#include "shockfit/errors.hpp"
#include "shockfit/parallel.hpp"
#include "shockfit/quadrature.hpp"

namespace shockfit {

double initial_value(const ProblemSpec& spec, double x) {
  double s = x - spec.y0;
  int side = s < 0.0 ? -1 : 1;
  double w = spec.data.w_bar(s, side);
  if (spec.v_bar.is_zero()) return w;
  CorrectorParams p;
  p.kernel = spec.kernel;
  p.v_bar = spec.v_bar;
  double wm = spec.data.w_bar(0.0, -1), wp = spec.data.w_bar(0.0, 1);
  double sp = rh_speed(spec.flux, wm, wp);
  p.sigma = wm - wp;
  p.b_minus = spec.flux.eval(wm, 1) - sp;
  p.b_plus = spec.flux.eval(wp, 1) - sp;
  return w + corrector_eval(p, s, 0, side);
}

double godunov_flux(const Flux& f, double ul, double ur) {
  return godunov_flux(f, f.critical_point(), ul, ur);
}

double godunov_flux(const Flux& f, double c, double ul, double ur) {
  if (std::isnan(c)) {
    double d = f.eval(0.5 * (ul + ur), 1);
    return f.eval(d >= 0.0 ? ul : ur);
  }
  if (ul <= ur) return f.eval(std::clamp(c, ul, ur));
  return std::max(f.eval(ul), f.eval(ur));
}

namespace {

// Linear convolution out_i = sum_k w[i - k + (n - 1)] u_k through a padded FFT.
class Convolver {
 public:
  Convolver() = default;
  Convolver(const std::vector<double>& weights, std::size_t n) : n_(n) {
    N_ = 4 * n;
    nc_ = N_ / 2 + 1;
    std::vector<double> buf(N_, 0.0);
    // weight for offset d sits at index d mod N
    for (std::size_t q = 0; q < weights.size(); ++q) {
      long d = static_cast<long>(q) - static_cast<long>(n - 1);
      buf[static_cast<std::size_t>((d + static_cast<long>(N_)) % static_cast<long>(N_))] = weights[q];
    }
    wk_.resize(nc_);
    transform(buf, wk_);
  }

  std::vector<double> apply(const std::vector<double>& u) const {
    std::vector<double> buf(N_, 0.0);
    std::copy(u.begin(), u.end(), buf.begin());
    std::vector<std::complex<double>> uk(nc_);
    transform(buf, uk);
    for (std::size_t q = 0; q < nc_; ++q) uk[q] *= wk_[q];
    fftw_plan p = fftw_plan_dft_c2r_1d(static_cast<int>(N_), reinterpret_cast<fftw_complex*>(uk.data()),
                                       buf.data(), FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = buf[i] / static_cast<double>(N_);
    return out;
  }

 private:
  void transform(std::vector<double>& in, std::vector<std::complex<double>>& out) const {
    fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(N_), in.data(),
                                       reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
  }

  std::size_t n_ = 0, N_ = 0, nc_ = 0;
  std::vector<std::complex<double>> wk_;
};

FvSource resolve(const Kernel& k, FvSource mode) {
  if (mode == FvSource::spectral && !k.is_hilbert())
    throw Error(ErrorCode::config, "spectral source path needs the Hilbert kernel");
  if (mode == FvSource::automatic) return k.is_hilbert() ? FvSource::spectral : FvSource::quadrature;
  return mode;
}

std::vector<double> cell_weights(const Kernel& k, std::size_t n, double dx) {
  std::vector<double> w(2 * n - 1);
  for (std::size_t q = 0; q < w.size(); ++q) {
    long d = static_cast<long>(q) - static_cast<long>(n - 1);
    if (d == 0) continue;
    double c = d * dx;
    w[q] = lambda_eval(k, c + 0.5 * dx, 0) - lambda_eval(k, c - 0.5 * dx, 0);
  }
  return w;
}

// Hilbert transform through the periodic multiplier on a 4x padded copy. The padded
// period P turns 1/(pi z) into cot(pi z / P) / P; the leading terms of
// cot(a) - 1/a = -(a/3 + a^3/45 + 2a^5/945 + ...) are removed through moments of u.
std::vector<double> spectral_source(const std::vector<double>& u, double dx) {
  std::size_t n = u.size(), N = 4 * n, off = n + n / 2;
  std::vector<double> grid(N), pad(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) grid[i] = i * dx;
  std::copy(u.begin(), u.end(), pad.begin() + static_cast<long>(off));
  std::vector<double> h = hilbert_fft(grid, pad);
  // cell centres measured from the middle of the data
  double mid = 0.5 * (n - 1);
  std::array<double, 6> M{};
  for (std::size_t k = 0; k < n; ++k) {
    double y = (k - mid) * dx, p = u[k] * dx;
    for (double& m : M) {
      m += p;
      p *= y;
    }
  }
  const double P = N * dx, a = M_PI / P;
  const double c[3] = {1.0 / 3.0, 1.0 / 45.0, 2.0 / 945.0};
  static const double binom[6][6] = {{1}, {1, 1}, {1, 2, 1}, {1, 3, 3, 1}, {1, 4, 6, 4, 1},
                                     {1, 5, 10, 10, 5, 1}};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = (i - mid) * dx, corr = 0.0;
    for (int k = 0; k < 3; ++k) {
      int m = 2 * k + 1;
      // sum_k u_k (x - y_k)^m dx
      double S = 0.0;
      for (int j = 0; j <= m; ++j) S += binom[m][j] * std::pow(x, m - j) * ((j & 1) ? -M[j] : M[j]);
      corr += c[k] * std::pow(a, m) * S;
    }
    out[i] = h[off + i] + corr / P;
  }
  return out;
}

}  // namespace

std::vector<double> fv_source(const Kernel& k, const std::vector<double>& u, double dx,
                              FvSource mode) {
  if (k.is_zero()) return std::vector<double>(u.size(), 0.0);
  mode = resolve(k, mode);
  if (mode == FvSource::spectral) return spectral_source(u, dx);
  Convolver c(cell_weights(k, u.size(), dx), u.size());
  return c.apply(u);
}

double FvState::value(std::size_t snap, double x) const {
  const std::vector<double>& u = snapshots.at(snap).u;
  double s = (x - centers.front()) / dx;
  if (s <= 0.0) return u.front();
  if (s >= static_cast<double>(u.size() - 1)) return u.back();
  std::size_t i = static_cast<std::size_t>(s);
  double th = s - i;
  return (1.0 - th) * u[i] + th * u[i + 1];
}

double FvState::shock_location(std::size_t snap) const {
  const std::vector<double>& u = snapshots.at(snap).u;
  std::size_t best = 0;
  double g = -1.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    double d = u[i] - u[i + 1];
    if (d > g) {
      g = d;
      best = i;
    }
  }
  return centers[best] + 0.5 * dx;
}

std::size_t FvState::snapshot_at(double t) const {
  for (std::size_t i = 0; i < snapshots.size(); ++i)
    if (std::abs(snapshots[i].t - t) <= 1e-12 * std::max(1.0, t)) return i;
  throw Error(ErrorCode::range, "time not covered by the finite-volume trajectory");
}

FvState fv_solve(const ProblemSpec& spec, const FvSettings& s, double t_end,
                 const std::vector<double>& output_times) {
  if (s.n_cells < 16) throw Error(ErrorCode::config, "oracle needs at least 16 cells");
  if (!(s.cfl > 0.0) || s.cfl > 0.45) throw Error(ErrorCode::config, "oracle CFL must lie in (0, 0.45]");
  FvState st;
  const std::size_t n = static_cast<std::size_t>(s.n_cells);
  st.L = s.L;
  st.dx = 2.0 * s.L / n;
  st.cfl = s.cfl;
  const double dx = st.dx;
  st.centers.resize(n);
  for (std::size_t i = 0; i < n; ++i) st.centers[i] = -s.L + (i + 0.5) * dx;

  const Flux& f = spec.flux;
  FvSource mode = spec.kernel.is_zero() ? FvSource::quadrature : resolve(spec.kernel, s.source);
  Convolver conv;
  if (!spec.kernel.is_zero() && mode == FvSource::quadrature)
    conv = Convolver(cell_weights(spec.kernel, n, dx), n);
  auto G = [&](const std::vector<double>& u) {
    if (spec.kernel.is_zero()) return std::vector<double>(n, 0.0);
    if (mode == FvSource::spectral) return spectral_source(u, dx);
    return conv.apply(u);
  };

  // cell averages, split at the initial jump
  const quad::Rule& gl = quad::gauss_legendre(4);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = st.centers[i] - 0.5 * dx, b = st.centers[i] + 0.5 * dx;
    std::vector<double> cuts{a};
    if (spec.y0 > a && spec.y0 < b) cuts.push_back(spec.y0);
    cuts.push_back(b);
    double sum = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      double m = 0.5 * (cuts[c] + cuts[c + 1]), h = 0.5 * (cuts[c + 1] - cuts[c]);
      for (std::size_t q = 0; q < gl.x.size(); ++q) {
        double x = m + h * gl.x[q];
        if (x == spec.y0) x = std::nextafter(x, b);
        sum += gl.w[q] * h * initial_value(spec, x);
      }
    }
    u[i] = sum / dx;
  }

  std::vector<double> outs = output_times;
  outs.push_back(t_end);
  std::sort(outs.begin(), outs.end());
  outs.erase(std::unique(outs.begin(), outs.end()), outs.end());
  std::size_t next_out = 0;
  double t = 0.0;
  while (next_out < outs.size() && outs[next_out] <= 0.0) {
    st.snapshots.push_back({0.0, u});
    ++next_out;
  }

  auto source_half = [&](std::vector<double>& v, double h) {
    std::vector<double> k1 = G(v), tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = v[i] + h * k1[i];
    std::vector<double> k2 = G(tmp);
    for (std::size_t i = 0; i < n; ++i) v[i] += 0.5 * h * (k1[i] + k2[i]);
  };
  auto max_speed = [&](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(f.eval(x, 1)));
    return std::max(m, 1e-8);
  };

  std::vector<double> flux(n + 1);
  const double crit = f.critical_point();
  while (next_out < outs.size()) {
    double target = outs[next_out];
    double dt = std::min(s.cfl * dx / max_speed(u), target - t);
    std::vector<double> u1;
    for (;;) {
      u1 = u;
      source_half(u1, 0.5 * dt);
      if (dt * max_speed(u1) <= 0.5 * dx) break;
      dt *= 0.5;
      ++st.rejected;
      if (dt < 1e-14) throw Error(ErrorCode::stiffness, "oracle time step underflow");
    }
    parallel_for(n + 1, [&](std::size_t i) {
      double ul = u1[i == 0 ? 0 : i - 1], ur = u1[i == n ? n - 1 : i];
      flux[i] = godunov_flux(f, crit, ul, ur);
    });
    double before = 0.0, after = 0.0;
    std::vector<double> u2(n);
    for (std::size_t i = 0; i < n; ++i) {
      u2[i] = u1[i] - dt / dx * (flux[i + 1] - flux[i]);
      before += u1[i];
      after += u2[i];
    }
    double boundary = dt / dx * (flux[n] - flux[0]);
    st.conservation_defect =
        std::max(st.conservation_defect, std::abs(after - before + boundary) / std::max(1.0, std::abs(before)));
    source_half(u2, 0.5 * dt);
    u = std::move(u2);
    ++st.steps;
    t = (target - t - dt <= 1e-14 * std::max(1.0, target)) ? target : t + dt;
    if (t == target) {
      st.snapshots.push_back({t, u});
      ++next_out;
    }
  }
  return st;
}

CompareMetrics compare(const Solution& sol, const FvState& fv, double t, double window) {
  if (t < 0.0 || t > sol.T() * (1.0 + 1e-12))
    throw Error(ErrorCode::range, "time not covered by the shock-fitted solution");
  std::size_t k = fv.snapshot_at(t);
  CompareMetrics m;
  m.t = t;
  m.dx = fv.dx;
  double y = sol.shock_position(t);
  auto fit = [&](double X) {
    double x = X - y;
    return sol.u_at(t, x, x < 0.0 ? -1 : 1);
  };
  const std::vector<double>& u = fv.snapshots[k].u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double xc = fv.centers[i];
    if (xc < -window || xc > window) continue;
    double a = xc - 0.5 * fv.dx, b = xc + 0.5 * fv.dx;
    // fitted cell average, split at the shock
    double avg;
    if (y > a && y < b) {
      avg = ((y - a) * fit(0.5 * (a + y)) + (b - y) * fit(0.5 * (y + b))) / fv.dx;
    } else {
      avg = 0.5 * (fit(xc - fv.dx / (2.0 * std::sqrt(3.0))) + fit(xc + fv.dx / (2.0 * std::sqrt(3.0))));
    }
    m.l1 += std::abs(u[i] - avg) * fv.dx;
  }
  m.shock_fit = y;
  m.shock_fv = fv.shock_location(k);
  m.shock_discrepancy = std::abs(m.shock_fit - m.shock_fv);
  m.shock_cells = m.shock_discrepancy / fv.dx;
  double xs = m.shock_fv;
  double xl = xs - 3.5 * fv.dx, xr = xs + 3.5 * fv.dx;
  m.trace_minus_diff = std::abs(fv.value(k, xl) - fit(xl));
  m.trace_plus_diff = std::abs(fv.value(k, xr) - fit(xr));
  return m;
}

void write_fv_csv(const FvState& fv, std::size_t snap, const std::string& path) {
  std::ofstream out(path);
  out << "t,x,side,w,phi,u\n";
  char line[256];
  const FvSnapshot& s = fv.snapshots.at(snap);
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,cell,%.17g,0,%.17g\n", s.t, fv.centers[i], s.u[i],
                  s.u[i]);
    out << line;
  }
}

std::string compare_json(const CompareMetrics& m, int indent) {
  nlohmann::json j{{"t", m.t},
                   {"l1", m.l1},
                   {"shock_fit", m.shock_fit},
                   {"shock_fv", m.shock_fv},
                   {"shock_discrepancy", m.shock_discrepancy},
                   {"shock_cells", m.shock_cells},
                   {"trace_minus_diff", m.trace_minus_diff},
                   {"trace_plus_diff", m.trace_plus_diff},
                   {"dx", m.dx}};
  return j.dump(indent);
}

}  // namespace shockfit
