#include <doctest.h>

#include <cmath>
#include <numbers>

#include "shockfit/errors.hpp"
#include "shockfit/kernels.hpp"
#include "shockfit/quadrature.hpp"

using namespace shockfit;
using std::numbers::pi;

TEST_CASE("hilbert kernel values and oddness") {
  Kernel h = Kernel::hilbert();
  CHECK(kernel_eval(h, 1.0, 0) == doctest::Approx(1.0 / pi).epsilon(1e-15));
  CHECK(kernel_eval(h, -1.0, 0) == doctest::Approx(-1.0 / pi).epsilon(1e-15));
  CHECK(kernel_eval(h, 2.0, 1) == doctest::Approx(-1.0 / (4.0 * pi)).epsilon(1e-14));
  CHECK_THROWS_AS(kernel_eval(h, 0.0, 0), Error);
}

TEST_CASE("burgers-poisson kernel") {
  Kernel bp = Kernel::burgers_poisson();
  CHECK(kernel_eval(bp, 1.0, 0) == doctest::Approx(-0.5 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(kernel_eval(bp, -1.0, 0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(lambda_eval(bp, 1.0, 0) ==
        doctest::Approx(0.5 * (std::exp(-1.0) - std::exp(-2.0))).epsilon(1e-12));
  // independent quadrature of the defining integral
  double q = -quad::adaptive([](double y) { return -0.5 * std::exp(-y); }, 1.0, 2.0, 1e-14);
  CHECK(lambda_eval(bp, 1.0, 0) == doctest::Approx(q).epsilon(1e-12));
  CHECK(lambda2_quadrature(bp, 3.0) == doctest::Approx(lambda_eval(bp, 3.0, 0)).epsilon(1e-10));
}

TEST_CASE("admissibility sweep |K^(i)| |x|^(i+1) <= C") {
  for (const Kernel& k : {Kernel::hilbert(), Kernel::burgers_poisson()}) {
    double worst = 0.0;
    for (int e = -600; e <= 300; ++e) {
      double x = std::pow(10.0, e / 100.0);
      for (double s : {-x, x})
        for (int i = 0; i <= 2; ++i)
          worst = std::max(worst, std::abs(kernel_eval(k, s, i)) * std::pow(x, i + 1));
    }
    CHECK(worst <= k.bound_constant() * (1.0 + 1e-12));
  }
}

TEST_CASE("lambda: even antiderivative") {
  Kernel h = Kernel::hilbert();
  CHECK(lambda_eval(h, std::exp(1.0), 0) == doctest::Approx(1.0 / pi).epsilon(1e-14));
  for (const Kernel& k : {Kernel::hilbert(), Kernel::burgers_poisson()}) {
    CHECK(lambda_eval(k, 0.37, 0) == doctest::Approx(lambda_eval(k, -0.37, 0)).epsilon(1e-14));
    CHECK_THROWS_AS(lambda_eval(k, 0.0, 0), Error);
    // central differences converge at second order
    double x = 0.8, e1 = 0.0, e2 = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      double hh = pass == 0 ? 1e-2 : 5e-3;
      double fd = (lambda_eval(k, x + hh, 0) - lambda_eval(k, x - hh, 0)) / (2 * hh);
      (pass == 0 ? e1 : e2) = std::abs(fd - kernel_eval(k, x, 0));
    }
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("phi antiderivative of lambda") {
  Kernel h = Kernel::hilbert();
  CHECK(phi_eval(h, 0.0) == 0.0);
  CHECK(phi_eval(Kernel::burgers_poisson(), 0.0) == 0.0);
  CHECK(phi_eval(h, 1.0) == doctest::Approx(-1.0 / pi).epsilon(1e-12));
  CHECK(phi_eval_quadrature(h, 1.0) == doctest::Approx(-1.0 / pi).epsilon(1e-8));
  CHECK(phi_eval(h, -0.5) == doctest::Approx(-phi_eval(h, 0.5)).epsilon(1e-14));
  Kernel bp = Kernel::burgers_poisson();
  for (double x : {0.3, 1.7, 2.5})
    CHECK(phi_eval(bp, x) == doctest::Approx(phi_eval_quadrature(bp, x)).epsilon(1e-8));
}

TEST_CASE("cutoff") {
  Cutoff eta;
  CHECK(eta.eval(0.7, 0) == 1.0);
  CHECK(eta.eval(-1.0, 0) == 1.0);
  CHECK(eta.eval(2.0, 0) == 0.0);
  CHECK(eta.eval(-2.5, 0) == 0.0);
  double prev = 1.0;
  for (int i = 0; i <= 200; ++i) {
    double x = 1.0 + i / 200.0;
    double v = eta.eval(x, 0);
    CHECK(v <= prev + 1e-15);
    CHECK(v == doctest::Approx(eta.eval(-x, 0)).epsilon(1e-15));
    prev = v;
  }
  // derivative orders against central differences, C^3 at the junctions
  for (double x : {1.2, 1.5, 1.9})
    for (int o = 1; o <= 3; ++o) {
      double hh = 1e-5;
      double fd = (eta.eval(x + hh, o - 1) - eta.eval(x - hh, o - 1)) / (2 * hh);
      CHECK(fd == doctest::Approx(eta.eval(x, o)).epsilon(1e-6).scale(1.0));
    }
  for (int o = 1; o <= 3; ++o) {
    CHECK(std::abs(eta.eval(1.0 + 1e-9, o)) < 1e-5);
    CHECK(std::abs(eta.eval(2.0 - 1e-9, o)) < 1e-5);
  }
}

TEST_CASE("phi(x, b)") {
  Kernel h = Kernel::hilbert();
  Cutoff eta;
  CHECK(phi_xb_eval(h, eta, 0.0, 0.3, 0) == 0.0);
  CHECK(phi_xb_eval(h, eta, 1.0, 0.0, 0) == doctest::Approx(1.0 / pi).epsilon(1e-12));
  CHECK(phi_xb_eval(h, eta, 0.5, 0.0, 1) == doctest::Approx(-std::log(0.5) / pi).epsilon(1e-12));
  double hh = 1e-6;
  double fd = (phi_xb_eval(h, eta, 0.5 + hh, 0.0, 0) - phi_xb_eval(h, eta, 0.5 - hh, 0.0, 0)) / (2 * hh);
  CHECK(fd == doctest::Approx(0.220635600152).epsilon(1e-8));
  // d/db phi = Phi'(b) + d/dx phi where eta = 1
  for (double x : {0.2, -0.4})
    for (double b : {0.05, -0.1}) {
      double lhs = phi_xb_db(h, eta, x, b);
      double rhs = lambda_eval(h, b, 0) + phi_xb_eval(h, eta, x, b, 1);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}
