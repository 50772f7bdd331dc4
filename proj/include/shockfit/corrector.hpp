#pragma once

#include <vector>

#include "shockfit/kernels.hpp"
#include "shockfit/singular_operator.hpp"
#include "shockfit/state.hpp"

namespace shockfit {

struct CorrectorParams {
  Kernel kernel = Kernel::zero();
  Cutoff cutoff;
  XAlpha v_bar;
  double sigma = 0.0;
  double b_minus = 0.0;
  double b_plus = 0.0;
  double sigma_dot = 0.0;
  double b_minus_dot = 0.0;
  double b_plus_dot = 0.0;
  double t = 0.0;
  // false until trace derivatives have been estimated
  bool has_rates = false;

  double b(int side) const { return side < 0 ? b_minus : b_plus; }
  double b_dot(int side) const { return side < 0 ? b_minus_dot : b_plus_dot; }
};

// Validates the sign and range conditions the corrector relies on.
void check_corrector_params(const CorrectorParams& p);

// side picks the branch at x = 0; elsewhere the sign of x decides.
double corrector_eval(const CorrectorParams& p, double x, int order = 0, int side = 0);
double corrector_tilde(const CorrectorParams& p, double x, int order = 0, int side = 0);
double corrector_bar(const CorrectorParams& p, double x, int order = 0, int side = 0);
double corrector_time_derivative(const CorrectorParams& p, double x, int side = 0);

// Continuous field view of phi(t, .) with support [-2, 2].
FieldView corrector_view(const CorrectorParams& p);

struct CorrectorProbe {
  BoundReport phi;
  BoundReport phi_x;
  BoundReport phi_xx;
  BoundReport phi_xxx;
  BoundReport h2;
};

// H^2 norm of phi(t, .) over |x| >= delta.
double corrector_h2_off(const CorrectorParams& p, double delta);

// Envelopes of the corrector estimates on 0 < |x| < 1/4. Each entry of params is
// one time sample.
CorrectorProbe corrector_bound_check(const std::vector<CorrectorParams>& params,
                                     const std::vector<double>& grid,
                                     const std::vector<double>& deltas,
                                     const CorrectorProbe* reference = nullptr, double slack = 0.0);

std::vector<BoundReport> corrector_reports(const CorrectorProbe& p);

}  // namespace shockfit
