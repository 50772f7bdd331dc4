#include <doctest.h>

#include <cmath>
#include <random>

#include "shockfit/errors.hpp"
#include "shockfit/singular_operator.hpp"
#include "shockfit/source.hpp"
#include "shockfit/spline.hpp"

using namespace shockfit;

namespace {

double datum(double x, int side) {
  static const Cutoff eta;
  double step = (x < 0.0 || (x == 0.0 && side < 0)) ? 0.5 : -0.5;
  return step * eta.eval(x / 2.0, 0) + 0.05 * std::sin(2 * x) * std::exp(-x * x);
}

PiecewiseField field(double hmax) {
  return PiecewiseField::sample(graded_nodes(4.0, 4e-5, 1.15, hmax), datum);
}

SourceContext context(const Kernel& k, double hmax, double vbar, double t = 0.1) {
  return make_source_context(k, Flux::burgers(), field(hmax), make_xalpha(vbar, 0.8), t, -0.02, 0.01,
                             -0.01, true);
}

}  // namespace

TEST_CASE("context reads the traces") {
  SourceContext c = context(Kernel::hilbert(), 0.05, 0.1);
  CHECK(c.cp.sigma == doctest::Approx(1.0));
  CHECK(c.cp.b_minus == doctest::Approx(0.5));
  CHECK(c.cp.b_plus == doctest::Approx(-0.5));
  CHECK(c.speed == doctest::Approx(0.0).scale(1.0));
  PiecewiseField bad = PiecewiseField::sample(graded_nodes(4.0, 4e-5, 1.15, 0.05),
                                              [](double x, int side) { return -datum(x, side); });
  CHECK_THROWS_AS(make_source_context(Kernel::hilbert(), Flux::burgers(), bad, make_xalpha(0, 0.8), 0.1), Error);
}

TEST_CASE("zero kernel and zero v_bar give a vanishing source") {
  SourceContext z = context(Kernel::zero(), 0.05, 0.0);
  for (double x : {-0.7, -1e-3, 0.02, 0.4}) {
    CHECK(source_A(z, x) == 0.0);
    CHECK(source_B(z, x) == 0.0);
    CHECK(source_C(z, x) == 0.0);
    CHECK(source_eval(z, x) == 0.0);
  }
}

TEST_CASE("zero kernel with v_bar: A = -d phi_x") {
  SourceContext z = context(Kernel::zero(), 0.05, 0.1);
  for (double x : {-0.3, 0.2}) {
    double phi = corrector_eval(z.cp, x), phix = corrector_eval(z.cp, x, 1);
    double w = z.w.eval(x, x < 0 ? -1 : 1);
    double d = (w + phi) - w;  // Burgers: f' = identity
    CHECK(source_A(z, x) == doctest::Approx(-d * phix).epsilon(1e-12));
  }
}

TEST_CASE("A against a principal value re-evaluation") {
  SourceContext c = context(Kernel::hilbert(), 0.05, 0.1);
  double x = 0.3;
  double phi = corrector_eval(c.cp, x), phix = corrector_eval(c.cp, x, 1);
  double pv = g_apply_pv(c.kernel, corrector_view(c.cp), x);
  CHECK(source_A(c, x) == doctest::Approx(pv - phi * phix).epsilon(1e-5));
}

TEST_CASE("B extracts the jump") {
  SourceContext c = context(Kernel::hilbert(), 0.05, 0.1);
  Cutoff eta;
  for (double x : {0.2, -0.5}) {
    double g = g_apply_pv(c.kernel, c.w.view(), x);
    // G[w] carries the jump w(0+) - w(0-) = -sigma times Lambda; B removes it
    double expect = g + c.cp.sigma * lambda_eval(c.kernel, x, 0) * eta.eval(x, 0);
    CHECK(source_B(c, x) == doctest::Approx(expect).epsilon(1e-5));
  }
  double bmax = 0.0;
  for (double x : log_grid(1e-4, 0.25, 16)) bmax = std::max(bmax, std::abs(source_B(c, x)));
  CHECK(std::isfinite(bmax));
  CHECK(bmax < 2.0);
  // continuous field: B = G[w]
  // entropy needs w(0-) > w(0+); a tiny jump leaves B = G[w] up to sigma |Lambda|
  const double tiny = 1e-6;
  PiecewiseField smooth = PiecewiseField::sample(graded_nodes(4.0, 4e-5, 1.15, 0.05), [=](double x, int side) {
    return std::exp(-x * x) + ((x < 0.0 || (x == 0.0 && side < 0)) ? tiny : 0.0);
  });
  SourceContext s = make_source_context(Kernel::hilbert(), Flux::burgers(), smooth, make_xalpha(0, 0.8), 0.1,
                                        0, 0, 0, true);
  CHECK(std::abs(source_B(s, 0.3) - g_apply_jump_form(s.kernel, smooth.view(), 0.3)) <=
        1.01 * tiny * std::abs(lambda_eval(s.kernel, 0.3, 0)));
}

TEST_CASE("C: closed form against the direct path") {
  SourceContext c = context(Kernel::hilbert(), 0.05, 0.1);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 8; ++i) {
    double x = u(rng);
    CHECK(source_C(c, x) == doctest::Approx(source_C_direct(c, x)).epsilon(1e-6).scale(1.0));
  }
  CHECK(std::isfinite(source_C(c, 0.0, 1)));
  CHECK(std::isfinite(source_C(c, 0.0, -1)));
  SourceContext at0 = context(Kernel::hilbert(), 0.05, 0.1, 0.0);
  CHECK_THROWS_AS(source_C(at0, 0.2), Error);
}

TEST_CASE("grouping identity and refinement") {
  SourceContext c = context(Kernel::hilbert(), 0.05, 0.1);
  for (double x : {-0.8, -0.05, 0.01, 0.6})
    CHECK(std::abs(source_eval(c, x) - source_eval_ungrouped(c, x)) < 1e-8);
  SourceContext f = context(Kernel::hilbert(), 0.025, 0.1);
  double a = source_eval(c, 0.2), b = source_eval(f, 0.2);
  CHECK(std::isfinite(a));
  CHECK(std::abs(a - b) < 1e-5);
}

TEST_CASE("batched evaluation matches pointwise") {
  Kernel h = Kernel::hilbert();
  std::vector<double> r = graded_nodes(4.0, 4e-5, 1.15, 0.05);
  SourceContext c = context(h, 0.05, 0.1);
  SourceBatch batch(h, r, 4);
  std::vector<double> l, rr;
  batch.evaluate(c, l, rr);
  REQUIRE(l.size() == r.size());
  for (std::size_t i : {std::size_t(40), std::size_t(90), r.size() / 2}) {
    CHECK(rr[i] == doctest::Approx(source_eval(c, r[i])).epsilon(1e-6).scale(1.0));
    CHECK(l[i] == doctest::Approx(source_eval(c, -r[i])).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("source bound probe") {
  std::vector<double> r = graded_nodes(4.0, 4e-5, 1.15, 0.05);
  auto samples = [&](const Kernel& k, double vbar) {
    std::vector<SourceSample> s;
    SourceBatch batch(k, r, 4);
    for (double t : {0.02, 0.1}) {
      SourceSample q;
      q.ctx = context(k, 0.05, vbar, t);
      std::vector<double> l, rr;
      batch.evaluate(q.ctx, l, rr);
      q.table = PiecewiseField(r, l, rr);
      s.push_back(std::move(q));
    }
    return s;
  };
  std::vector<double> deltas{1.0 / 64, 1.0 / 16};
  SourceProbe z = source_bound_check(samples(Kernel::zero(), 0.0), log_grid(1e-4, 0.24, 8), deltas, 1.0);
  CHECK(z.gamma1 == 0.0);
  SourceProbe h = source_bound_check(samples(Kernel::hilbert(), 0.1), log_grid(1e-4, 0.24, 8), deltas, 1.0);
  CHECK(h.gamma1 > 0.0);
  CHECK(h.F.violation_count == 0);
  CHECK(h.F_x.violation_count == 0);
  CHECK(h.h2.violation_count == 0);
}
