#pragma once

#include <string>
#include <vector>

#include "shockfit/run.hpp"
#include "shockfit/singular_operator.hpp"

namespace shockfit {

struct SuiteResult {
  std::string selector;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool passed() const;
};

// kernels, operator, corrector, source, solver, appendix, or all.
std::vector<std::string> verify_selectors();
std::vector<SuiteResult> verify_suite(const std::string& selector);

std::string suites_json(const std::vector<SuiteResult>& s, int indent = 2);
std::string suites_text(const std::vector<SuiteResult>& s);

// Fixtures shared with the tests.
// Random piecewise smooth field with a jump at the origin and support [-2/k, 2/k].
FieldView random_piecewise_field(unsigned seed);
// Indicator of [-1, 1] and the Lorentzian 1/(1+x^2) truncated at |x| = R.
FieldView indicator_field();
FieldView lorentzian_field(double R);
// G[indicator] and G[1/(1+x^2)] for the Hilbert kernel.
double hilbert_indicator(double x);
double hilbert_lorentzian(double x);
// Hilbert image of the Lorentzian tail beyond |x| = R.
double hilbert_lorentzian_tail(double x, double R);
// Standard corrector data: sigma = 1, b- = 0.5, b+ = -0.5, alpha = 0.8.
CorrectorParams standard_corrector(double t, double vbar_amplitude = 1.0);
// Tapered Riemann field with a smooth perturbation on a graded grid.
PiecewiseField standard_field(double uL, double uR);

}  // namespace shockfit
