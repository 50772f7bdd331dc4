#pragma once

#include <string>

namespace shockfit {

// Closed-form ids for the two parts of K = K1 + K2.
enum class SingularPart { none, hilbert };
enum class IntegrablePart { none, exp_odd, gauss_odd };

SingularPart singular_part_from_name(const std::string& id);
IntegrablePart integrable_part_from_name(const std::string& id);

class Kernel {
 public:
  Kernel(SingularPart k1, double s1, IntegrablePart k2, double s2, double bound_constant,
         std::string name);

  static Kernel hilbert();
  static Kernel burgers_poisson();
  static Kernel zero();

  // i-th derivative of K1, K2 at x != 0.
  double singular_eval(double x, int order) const;
  double integrable_eval(double x, int order) const;

  // Even antiderivative of K1 (ln|x|/pi for the Hilbert kernel).
  double singular_antiderivative(double x) const;
  // Closed form of the even antiderivative of K2 normalised as in Lambda_2.
  double integrable_antiderivative(double x) const;
  // Closed form of Phi, the antiderivative of Lambda vanishing at 0.
  double phi_closed(double x) const;

  double bound_constant() const { return c_; }
  double tail_l1_bound(double r) const;

  bool is_zero() const { return k1_ == SingularPart::none && k2_ == IntegrablePart::none; }
  bool is_hilbert() const { return k1_ == SingularPart::hilbert && k2_ == IntegrablePart::none; }
  const std::string& name() const { return name_; }

 private:
  SingularPart k1_;
  double s1_;
  IntegrablePart k2_;
  double s2_;
  double c_;
  std::string name_;
};

// Polynomial smoothstep bump: 1 on [-1,1], 0 outside [-2,2], C^3.
class Cutoff {
 public:
  double eval(double x, int order) const;
};

double kernel_eval(const Kernel& k, double x, int order);
double lambda_eval(const Kernel& k, double x, int order);
// Lambda_2 through quadrature of K2 from 2, as written in the definition.
double lambda2_quadrature(const Kernel& k, double x);
double phi_eval(const Kernel& k, double x);
double phi_eval_quadrature(const Kernel& k, double x);

// d^order/dx^order of eta(x) [Phi(b) - Phi(x + b)].
double phi_xb_eval(const Kernel& k, const Cutoff& eta, double x, double b, int order_x);
// d/db of eta(x) [Phi(b) - Phi(x + b)].
double phi_xb_db(const Kernel& k, const Cutoff& eta, double x, double b);

}  // namespace shockfit
