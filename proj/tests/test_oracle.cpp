#include <doctest.h>

#include <cmath>
#include <numbers>

#include "shockfit/errors.hpp"
#include "shockfit/oracle.hpp"

using namespace shockfit;

namespace {

ProblemSpec riemann() {
  ProblemSpec spec;
  spec.data.uL = 1.0;
  spec.data.uR = 0.0;
  return spec;
}

double l1_exact_riemann(const FvState& fv, std::size_t snap, double t) {
  double s = 0.0;
  for (std::size_t i = 0; i < fv.centers.size(); ++i) {
    double x = fv.centers[i];
    if (std::abs(x) > 4.0) continue;
    double exact = x < t / 2 ? 1.0 : 0.0;
    s += std::abs(fv.snapshots[snap].u[i] - exact) * fv.dx;
  }
  return s;
}

}  // namespace

TEST_CASE("godunov flux for burgers") {
  Flux b = Flux::burgers();
  CHECK(godunov_flux(b, 1.0, 0.0) == doctest::Approx(0.5));
  CHECK(godunov_flux(b, 0.0, 1.0) == doctest::Approx(0.0));
  CHECK(godunov_flux(b, -1.0, 1.0) == doctest::Approx(0.0));
  CHECK(godunov_flux(b, 1.0, -1.0) == doctest::Approx(0.5));
  CHECK(godunov_flux(b, -2.0, -1.0) == doctest::Approx(0.5));
  CHECK(godunov_flux(b, 2.0, 3.0) == doctest::Approx(2.0));
}

TEST_CASE("zero-kernel riemann: shock speed and smearing") {
  FvSettings s;
  s.n_cells = 2048;
  FvState fv = fv_solve(riemann(), s, 0.1, {0.1});
  std::size_t k = fv.snapshot_at(0.1);
  CHECK(std::abs(fv.shock_location(k) - 0.05) <= fv.dx);
  CHECK(l1_exact_riemann(fv, k, 0.1) <= 2.0 * fv.dx * 1.0);
  // conservative transport step: only rounding drift
  CHECK(fv.conservation_defect < 1e-12);
}

TEST_CASE("oracle self-convergence") {
  double prev = 0.0, ratio = 0.0;
  for (int n : {512, 1024, 2048}) {
    FvSettings s;
    s.n_cells = n;
    FvState fv = fv_solve(riemann(), s, 0.1, {0.1});
    double e = l1_exact_riemann(fv, fv.snapshot_at(0.1), 0.1);
    if (prev > 0.0) ratio = prev / e;
    prev = e;
  }
  CHECK(ratio > 1.6);
}

TEST_CASE("source on the uniform grid") {
  const int n = 4096;
  const double L = 8.0, dx = 2 * L / n;
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) {
    double x = -L + (i + 0.5) * dx;
    u[i] = std::abs(x) < 1.0 ? 1.0 : 0.0;
  }
  // first order in dx away from the edges of the box
  auto box_error = [&](int cells, FvSource mode) {
    double h = 2 * L / cells;
    std::vector<double> v(cells);
    for (int i = 0; i < cells; ++i) v[i] = std::abs(-L + (i + 0.5) * h) < 1.0 ? 1.0 : 0.0;
    std::vector<double> g = fv_source(Kernel::hilbert(), v, h, mode);
    double worst = 0.0;
    for (int i = 0; i < cells; ++i) {
      double x = -L + (i + 0.5) * h;
      if (std::abs(std::abs(x) - 1.0) < 0.25 || std::abs(x) > 4.0) continue;
      double exact = std::log(std::abs((x + 1) / (x - 1))) / std::numbers::pi;
      worst = std::max(worst, std::abs(g[i] - exact));
    }
    return worst;
  };
  // cell integrals of the kernel are exact for cell-aligned boxes
  CHECK(box_error(n, FvSource::quadrature) < 1e-12);
  double e1 = box_error(n, FvSource::spectral), e2 = box_error(2 * n, FvSource::spectral);
  CHECK(e1 < dx);
  CHECK(e1 / e2 > 1.8);
  CHECK_THROWS_AS(fv_source(Kernel::burgers_poisson(), u, dx, FvSource::spectral), Error);
  std::vector<double> z = fv_source(Kernel::zero(), u, dx, FvSource::automatic);
  for (double v : z) CHECK(v == 0.0);
}

TEST_CASE("oracle settings are validated") {
  FvSettings s;
  s.cfl = 0.6;
  CHECK_THROWS_AS(fv_solve(riemann(), s, 0.1, {0.1}), Error);
  s.cfl = 0.45;
  s.n_cells = 8;
  CHECK_THROWS_AS(fv_solve(riemann(), s, 0.1, {0.1}), Error);
}

TEST_CASE("fit against capture on the zero-kernel riemann problem") {
  SolverSettings ss;
  ss.T = 0.1;
  ss.macro_steps = 16;
  SolveResult res = outer_solve(riemann(), ss);
  FvSettings s;
  s.n_cells = 2048;
  FvState fv = fv_solve(riemann(), s, 0.1, {0.1});
  CompareMetrics m = compare(res.solution, fv, 0.1);
  CHECK(m.l1 <= 2.0 * fv.dx);
  CHECK(m.shock_cells <= 2.0);
  CHECK(m.trace_minus_diff < 1e-3);
  CHECK(m.trace_plus_diff < 1e-3);
  CHECK_THROWS_AS(compare(res.solution, fv, 0.3), Error);
}
