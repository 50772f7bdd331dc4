#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shockfit/kernels.hpp"

namespace shockfit {

// Piecewise smooth function with support [lo, hi] and a possible jump at 0.
// eval(x, side, order): side < 0 selects the left limit at x = 0, side > 0 the right.
struct FieldView {
  std::function<double(double, int, int)> eval;
  double lo = 0.0;
  double hi = 0.0;
  // interior points where derivatives may be discontinuous
  std::vector<double> breaks;
  // derivative has an integrable singularity at the origin
  bool singular_at_zero = false;

  double at(double x, int order = 0) const;
  double limit(double x, int side, int order = 0) const;
};

struct SampledField {
  std::vector<double> grid;
  std::vector<double> values;
  // (g(0-), g(0+)); used when 0 is a grid node
  std::array<double, 2> one_sided_limits_at_zero{0.0, 0.0};
  std::vector<double> derivative_values;

  FieldView view() const;
};

struct BoundReport {
  std::string quantity;
  std::string envelope;
  // (x, t, measured)
  std::vector<std::array<double, 3>> samples;
  std::vector<double> envelope_values;
  double fitted_constant = 0.0;
  int violation_count = 0;
  double max_ratio = 0.0;
  double slack = 0.0;
  std::optional<double> reference_constant;
};

// Fits the minimal constant c with measured <= c * envelope. With a reference
// constant, violations are counted against reference * (1 + slack).
BoundReport fit_envelope(const std::string& quantity, const std::string& envelope,
                         std::vector<std::array<double, 3>> samples,
                         std::vector<double> envelope_values,
                         std::optional<double> reference = std::nullopt, double slack = 0.0);
std::string bound_report_json(const BoundReport& r, int indent = -1);

std::vector<double> default_epsilons();

double g_apply_pv(const Kernel& k, const FieldView& g, double x,
                  const std::vector<double>& epsilons = default_epsilons());
double g_apply_pv(const Kernel& k, const SampledField& g, double x,
                  const std::vector<double>& epsilons = default_epsilons());

// Integral of g'(y) Lambda(x - y) over the support; finite also at x = 0.
double regular_integral(const Kernel& k, const FieldView& g, double x);
// Sum of jump * Lambda(x - y_jump) over the jumps at 0 and at the support ends.
double jump_terms(const Kernel& k, const FieldView& g, double x, bool include_origin);

double g_apply_jump_form(const Kernel& k, const FieldView& g, double x);
double g_apply_jump_form(const Kernel& k, const SampledField& g, double x);

// Derivative of G[g] through the jump form of g'.
double g_apply_derivative(const Kernel& k, const FieldView& g, double x);

std::vector<double> hilbert_fft(const std::vector<double>& grid, const std::vector<double>& g);

double regular_part(const Kernel& k, const FieldView& v, double x);
double regular_part(const Kernel& k, const SampledField& v, double x);

struct EnvelopeProbe {
  BoundReport value;
  BoundReport d1;
  BoundReport d2;
  BoundReport h2;
};

// Envelopes of G[g] near the origin: c0, c1 ln^2|x|, c2 |ln|x|/x|, c3 delta^(-2/3).
// Optional reference constants come from a coarser probe.
EnvelopeProbe envelope_probe(const Kernel& k, const FieldView& g, const std::vector<double>& grid,
                             const std::vector<double>& deltas, bool with_d2,
                             const EnvelopeProbe* reference = nullptr, double slack = 0.0);

FieldView chi_phi_b(const Kernel& k, double b);
FieldView linear_profile(double lambda1, double lambda2);

EnvelopeProbe appendix_probe(const Kernel& k, double b, const std::vector<double>& grid,
                             const std::vector<double>& deltas,
                             const EnvelopeProbe* reference = nullptr, double slack = 0.0);

std::vector<double> log_grid(double lo, double hi, int n_per_side);

// Product-integration weights for the map g' -> integral of g'(y) Lambda(x_i - y),
// with g' sampled at Gauss points of every interval of a partition.
class ProductRule {
 public:
  struct Target {
    double x;
    int side;
  };

  ProductRule() = default;
  ProductRule(const Kernel& k, const std::vector<double>& partition, std::vector<Target> targets,
              int nq = 4);

  const std::vector<double>& points() const { return points_; }
  // side of each point (-1 left of origin, +1 right)
  const std::vector<int>& point_sides() const { return point_side_; }
  std::size_t target_count() const { return targets_.size(); }
  const std::vector<Target>& targets() const { return targets_; }
  bool empty() const { return weights_.empty(); }

  void apply(const std::vector<double>& gprime, std::vector<double>& out) const;

 private:
  std::vector<Target> targets_;
  std::vector<double> points_;
  std::vector<int> point_side_;
  std::vector<double> weights_;
};

}  // namespace shockfit
