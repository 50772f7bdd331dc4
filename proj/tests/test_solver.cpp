#include <doctest.h>

#include <cmath>

#include "shockfit/errors.hpp"
#include "shockfit/solver.hpp"

using namespace shockfit;

TEST_CASE("time levels") {
  TimeLevels lv = TimeLevels::make(0.2, 64, 4, 8);
  CHECK(lv.T() == doctest::Approx(0.2));
  CHECK(lv.field.size() == 73);
  CHECK(lv.trace.size() == 265);
  for (std::size_t j = 0; j < lv.field.size(); ++j)
    CHECK(lv.trace[lv.field_to_trace[j]] == doctest::Approx(lv.field[j]).epsilon(1e-14));
  for (std::size_t j = 1; j < lv.field.size(); ++j) CHECK(lv.field[j] > lv.field[j - 1]);
  CHECK_THROWS_AS(TimeLevels::make(-1.0, 64, 4, 8), Error);
}

TEST_CASE("backward characteristics") {
  SpaceTimeFn c = [](double, double, int) { return -0.5; };
  SpaceTimeFn zero = [](double, double, int) { return 0.0; };
  CharacteristicPath p = trace_characteristic(c, zero, 0.2, 0.1, 1);
  CHECK(p.x.front() == doctest::Approx(0.2).epsilon(1e-14));
  for (std::size_t i = 0; i < p.t.size(); ++i) CHECK(p.x[i] == doctest::Approx(0.1 + 0.5 * (0.2 - p.t[i])));

  SpaceTimeFn lin = [](double, double x, int) { return x; };
  SpaceTimeFn one = [](double, double, int) { return 1.0; };
  CharacteristicPath q = trace_characteristic(lin, one, 1.0, 1.0, 1);
  CHECK(std::abs(q.x.front() - std::exp(-1.0)) < 1e-8);

  // constant unit source integrates to the elapsed time
  SpaceTimeFn src = [](double, double, int) { return 1.0; };
  std::vector<double> grid;
  for (int i = 0; i <= 32; ++i) grid.push_back(0.3 * i / 32);
  CharacteristicPath s = trace_characteristic(c, zero, grid, 0.4, 1, &src, 0.0, 1.0);
  CHECK(s.integral == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(s.x.front() == doctest::Approx(0.55).epsilon(1e-12));

  // shock-frame Burgers Riemann coefficient a = w_bar - 1/2
  SpaceTimeFn a = [](double, double x, int side) { return (x < 0 || (x == 0 && side < 0)) ? 0.5 : -0.5; };
  CharacteristicPath r = trace_characteristic(a, zero, 0.2, 0.1, 1);
  CHECK(r.x.front() == doctest::Approx(0.2));
  CHECK(r.funnel_violations == 0);
  CHECK_THROWS_AS(trace_characteristic(a, zero, 0.2, 0.0, 0), Error);
}

TEST_CASE("zero-kernel Riemann: stationary shock frame") {
  ProblemSpec spec;
  spec.data.uL = 1.0;
  spec.data.uR = 0.0;
  SolverSettings s;
  s.T = 0.2;
  SolveResult res = outer_solve(spec, s);
  const Solution& sol = res.solution;
  CHECK(res.diagnostics.certificate);
  CHECK(res.diagnostics.halvings == 0);
  double drift = 0.0;
  for (std::size_t j = 0; j < sol.levels.field.size(); ++j)
    for (std::size_t i = 0; i < sol.r.size(); i += 5)
      for (int side : {-1, 1}) {
        double x = side * sol.r[i];
        drift = std::max(drift, std::abs(sol.w.fields[j].eval(x, side) - (side < 0 ? 1.0 : 0.0)));
      }
  CHECK(drift <= 1e-8);
  for (const ShockPathSample& p : sol.shock_path) {
    CHECK(std::abs(p.y - p.t / 2) <= 1e-8);
    CHECK(std::abs(p.speed - 0.5) <= 1e-8);
  }
  LipschitzReport l = lipschitz_trace_check(sol);
  CHECK(std::isnan(l.exponent));
  CHECK(l.envelope.fitted_constant == 0.0);
  CHECK(characteristic_balance_check(sol, 10).max_residual <= 1e-6);
  CHECK(res.diagnostics.invariants.entropy == 0);
  CHECK(res.diagnostics.invariants.norm == 0);
  CHECK(res.diagnostics.invariants.funnel == 0);
}

namespace {

struct Setup {
  ProblemSpec spec;
  SolverSettings s;
  std::vector<double> r;
  TimeLevels lv;
};

Setup coarse_setup(const Kernel& k, double T) {
  Setup u;
  u.spec.kernel = k;
  u.spec.data.uL = 0.02;
  u.spec.data.uR = -0.02;
  u.spec.data.taper = 4.0;
  u.s.T = T;
  u.s.hmax = 0.2;
  u.s.macro_steps = 8;
  u.s.graded_levels = 2;
  u.s.ratio = 1.4;
  u.s.h0_rel = 1e-4;
  u.r = prepare_grid(u.spec, u.s, T);
  u.lv = TimeLevels::make(T, u.s.macro_steps, u.s.trace_refine, u.s.graded_levels);
  return u;
}

}  // namespace

TEST_CASE("inner loop: vanishing source reaches the fixed point at once") {
  Setup u = coarse_setup(Kernel::zero(), 0.2);
  History w1 = constant_history(u.spec, u.lv, u.r);
  CoefficientField a = make_coefficient(u.spec, w1, u.lv);
  SourceBatch batch(u.spec.kernel, u.r, u.s.nq);
  InnerResult res = inner_solve(u.spec, a, u.lv, u.r, batch, u.s);
  CHECK(res.iterations <= 2);
  REQUIRE(!res.beta.empty());
  CHECK(res.beta.back() <= 1e-14);
}

TEST_CASE("inner loop: oversized horizon trips the gates") {
  Setup u = coarse_setup(Kernel::hilbert(), 5.0);
  History w1 = constant_history(u.spec, u.lv, u.r);
  CoefficientField a = make_coefficient(u.spec, w1, u.lv);
  SourceBatch batch(u.spec.kernel, u.r, u.s.nq);
  bool horizon = false;
  try {
    inner_solve(u.spec, a, u.lv, u.r, batch, u.s);
  } catch (const Error& e) {
    horizon = e.code() == ErrorCode::horizon;
  }
  CHECK(horizon);
}

TEST_CASE("solution export round trip") {
  ProblemSpec spec;
  spec.data.uL = 1.0;
  spec.data.uR = 0.0;
  SolverSettings s;
  s.T = 0.1;
  s.macro_steps = 16;
  SolveResult res = outer_solve(spec, s);
  CHECK(res.solution.shock_position(0.1) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(res.solution.u_at(0.05, -0.3, -1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(res.solution.u_at(0.2, 0.1, 1), Error);
  std::string js = diagnostics_json(res.diagnostics);
  CHECK(js.find("contraction_ratios") != std::string::npos);
}
