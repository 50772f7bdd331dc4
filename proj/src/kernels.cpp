#include "shockfit/kernels.hpp"

#include <cmath>
#include <numbers>

#include "shockfit/errors.hpp"
#include "shockfit/quadrature.hpp"

namespace shockfit {

namespace {

constexpr double kPi = std::numbers::pi;

void require_nonzero(double x, const char* what) {
  if (x == 0.0) throw Error(ErrorCode::domain, std::string(what) + ": kernel singular at origin");
}

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

}  // namespace

SingularPart singular_part_from_name(const std::string& id) {
  if (id == "none") return SingularPart::none;
  if (id == "hilbert") return SingularPart::hilbert;
  throw Error(ErrorCode::config, "unknown singular kernel id '" + id + "'");
}

IntegrablePart integrable_part_from_name(const std::string& id) {
  if (id == "none") return IntegrablePart::none;
  if (id == "exp_odd") return IntegrablePart::exp_odd;
  if (id == "gauss_odd") return IntegrablePart::gauss_odd;
  throw Error(ErrorCode::config, "unknown integrable kernel id '" + id + "'");
}

Kernel::Kernel(SingularPart k1, double s1, IntegrablePart k2, double s2, double bound_constant,
               std::string name)
    : k1_(k1), s1_(s1), k2_(k2), s2_(s2), c_(bound_constant), name_(std::move(name)) {
  if (!(c_ > 0.0)) throw Error(ErrorCode::config, "kernel bound constant C must be positive");
}

Kernel Kernel::hilbert() {
  return Kernel(SingularPart::hilbert, 1.0, IntegrablePart::none, 0.0, 2.0 / kPi, "hilbert");
}

Kernel Kernel::burgers_poisson() {
  // max |x|^3 |K''| = 27 e^-3 / 2
  return Kernel(SingularPart::none, 0.0, IntegrablePart::exp_odd, 1.0, 0.7, "burgers_poisson");
}

Kernel Kernel::zero() {
  return Kernel(SingularPart::none, 0.0, IntegrablePart::none, 0.0, 1.0, "zero");
}

double Kernel::singular_eval(double x, int order) const {
  require_nonzero(x, "singular_eval");
  if (k1_ == SingularPart::none) return 0.0;
  switch (order) {
    case 0: return s1_ / (kPi * x);
    case 1: return -s1_ / (kPi * x * x);
    case 2: return 2.0 * s1_ / (kPi * x * x * x);
    default: throw Error(ErrorCode::range, "kernel derivative order must be 0..2");
  }
}

double Kernel::integrable_eval(double x, int order) const {
  require_nonzero(x, "integrable_eval");
  switch (k2_) {
    case IntegrablePart::none:
      return 0.0;
    case IntegrablePart::exp_odd: {
      double e = 0.5 * s2_ * std::exp(-std::abs(x));
      switch (order) {
        case 0: return -sgn(x) * e;
        case 1: return e;
        case 2: return -sgn(x) * e;
        default: break;
      }
      break;
    }
    case IntegrablePart::gauss_odd: {
      double e = s2_ * std::exp(-x * x);
      switch (order) {
        case 0: return -x * e;
        case 1: return -(1.0 - 2.0 * x * x) * e;
        case 2: return (6.0 * x - 4.0 * x * x * x) * e;
        default: break;
      }
      break;
    }
  }
  throw Error(ErrorCode::range, "kernel derivative order must be 0..2");
}

double Kernel::singular_antiderivative(double x) const {
  require_nonzero(x, "singular_antiderivative");
  if (k1_ == SingularPart::none) return 0.0;
  return s1_ * std::log(std::abs(x)) / kPi;
}

double Kernel::integrable_antiderivative(double x) const {
  require_nonzero(x, "integrable_antiderivative");
  double a = std::abs(x);
  switch (k2_) {
    case IntegrablePart::none: return 0.0;
    case IntegrablePart::exp_odd: return 0.5 * s2_ * (std::exp(-a) - std::exp(-2.0));
    case IntegrablePart::gauss_odd: return 0.5 * s2_ * (std::exp(-a * a) - std::exp(-4.0));
  }
  return 0.0;
}

double Kernel::phi_closed(double x) const {
  if (x == 0.0) return 0.0;
  double a = std::abs(x), s = 0.0;
  if (k1_ == SingularPart::hilbert) s += s1_ * (x * std::log(a) - x) / kPi;
  switch (k2_) {
    case IntegrablePart::none: break;
    case IntegrablePart::exp_odd:
      s += 0.5 * s2_ * sgn(x) * ((1.0 - std::exp(-a)) - std::exp(-2.0) * a);
      break;
    case IntegrablePart::gauss_odd:
      s += 0.5 * s2_ * (0.5 * std::sqrt(kPi) * std::erf(x) - std::exp(-4.0) * x);
      break;
  }
  return s;
}

double Kernel::tail_l1_bound(double r) const {
  switch (k2_) {
    case IntegrablePart::none: return 0.0;
    case IntegrablePart::exp_odd: return std::abs(s2_) * std::exp(-r);
    case IntegrablePart::gauss_odd: return std::abs(s2_) * std::exp(-r * r);
  }
  return 0.0;
}

double Cutoff::eval(double x, int order) const {
  double a = std::abs(x);
  if (a >= 2.0) return 0.0;
  if (a <= 1.0) return order == 0 ? 1.0 : 0.0;
  double s = a - 1.0, s2 = s * s, s3 = s2 * s;
  double v;
  switch (order) {
    case 0: return 1.0 - s2 * s2 * (35.0 - 84.0 * s + 70.0 * s2 - 20.0 * s3);
    case 1: v = -140.0 * s3 * (1.0 - 3.0 * s + 3.0 * s2 - s3); break;
    case 2: v = -s2 * (420.0 - 1680.0 * s + 2100.0 * s2 - 840.0 * s3); break;
    case 3: v = -s * (840.0 - 5040.0 * s + 8400.0 * s2 - 4200.0 * s3); break;
    case 4: v = -(840.0 - 10080.0 * s + 25200.0 * s2 - 16800.0 * s3); break;
    default: throw Error(ErrorCode::range, "cutoff derivative order must be 0..4");
  }
  // odd orders flip sign on the negative axis
  return (order % 2 == 1 && x < 0) ? -v : v;
}

double kernel_eval(const Kernel& k, double x, int order) {
  require_nonzero(x, "kernel_eval");
  return k.singular_eval(x, order) + k.integrable_eval(x, order);
}

double lambda_eval(const Kernel& k, double x, int order) {
  require_nonzero(x, "lambda_eval");
  switch (order) {
    case 0: return k.singular_antiderivative(x) + k.integrable_antiderivative(x);
    case 1: return kernel_eval(k, x, 0);
    case 2: return kernel_eval(k, x, 1);
    default: throw Error(ErrorCode::range, "lambda derivative order must be 0..2");
  }
}

double lambda2_quadrature(const Kernel& k, double x) {
  require_nonzero(x, "lambda2_quadrature");
  double a = std::abs(x);
  auto k2 = [&](double y) { return k.integrable_eval(y, 0); };
  if (a <= 2.0) return -quad::adaptive(k2, a, 2.0, 1e-13);
  return quad::adaptive(k2, 2.0, a, 1e-13);
}

double phi_eval(const Kernel& k, double x) { return k.phi_closed(x); }

double phi_eval_quadrature(const Kernel& k, double x) {
  if (x == 0.0) return 0.0;
  auto lam = [&](double y) {
    return k.singular_antiderivative(y) + lambda2_quadrature(k, y);
  };
  if (x > 0) return quad::graded(lam, 0.0, x, true, false, 1e-13);
  return -quad::graded(lam, x, 0.0, false, true, 1e-13);
}

double phi_xb_eval(const Kernel& k, const Cutoff& eta, double x, double b, int order_x) {
  if (order_x < 0 || order_x > 3) throw Error(ErrorCode::range, "phi order must be 0..3");
  if (std::abs(x) >= 2.0) return 0.0;
  static const int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  double s = 0.0;
  for (int j = 0; j <= order_x; ++j) {
    double e = eta.eval(x, j);
    if (e == 0.0) continue;
    int m = order_x - j;
    double d;
    if (m == 0)
      d = phi_eval(k, b) - phi_eval(k, x + b);
    else
      d = -lambda_eval(k, x + b, m - 1);
    s += binom[order_x][j] * e * d;
  }
  return s;
}

double phi_xb_db(const Kernel& k, const Cutoff& eta, double x, double b) {
  double e = eta.eval(x, 0);
  if (e == 0.0) return 0.0;
  return e * (lambda_eval(k, b, 0) - lambda_eval(k, x + b, 0));
}

}  // namespace shockfit
