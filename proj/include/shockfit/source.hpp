#pragma once

#include <vector>

#include "shockfit/corrector.hpp"
#include "shockfit/singular_operator.hpp"
#include "shockfit/state.hpp"

namespace shockfit {

struct SourceContext {
  Kernel kernel = Kernel::zero();
  Flux flux;
  PiecewiseField w;
  CorrectorParams cp;
  // Rankine-Hugoniot speed of the traces of w
  double speed = 0.0;

  double t() const { return cp.t; }
  double b_field(double x, int side) const { return flux.eval(w.eval(x, side), 1) - speed; }
};

// Builds a context with sigma and b_pm read from the traces of w.
SourceContext make_source_context(const Kernel& k, const Flux& f, const PiecewiseField& w,
                                  const XAlpha& v_bar, double t, double sigma_dot = 0.0,
                                  double b_minus_dot = 0.0, double b_plus_dot = 0.0,
                                  bool has_rates = false);

// All source terms accept x = 0 together with a side and then return the one-sided limit.
double source_A(const SourceContext& c, double x, int side = 0);
double source_B(const SourceContext& c, double x, int side = 0);
double source_C(const SourceContext& c, double x, int side = 0);
double source_C_direct(const SourceContext& c, double x, int side = 0);
double source_eval(const SourceContext& c, double x, int side = 0);
// G[phi] - d phi_x + G[w] - phi_t - b phi_x, x != 0
double source_eval_ungrouped(const SourceContext& c, double x);

// Batched evaluation at every node of a grid through precomputed product weights.
class SourceBatch {
 public:
  SourceBatch() = default;
  SourceBatch(const Kernel& k, const std::vector<double>& r, int nq = 4);

  // F at the nodes, ordered by |x| per side.
  void evaluate(const SourceContext& c, std::vector<double>& left, std::vector<double>& right) const;
  // G[w] at the nodes through the jump form (used by cross checks).
  void apply_g(const PiecewiseField& w, std::vector<double>& left, std::vector<double>& right) const;

  const std::vector<double>& radii() const { return r_; }

 private:
  std::vector<double> r_;
  ProductRule rule_;
  bool zero_ = true;
  Kernel kernel_ = Kernel::zero();
};

struct SourceSample {
  SourceContext ctx;
  // F(t, .) at the nodes, for norms
  PiecewiseField table;
};

struct SourceProbe {
  BoundReport F;
  BoundReport F_x;
  BoundReport h2;
  double gamma1 = 0.0;
  double ell_constant = 0.0;
};

// Fits Gamma_1 with ell(t) = ell_constant * t^(alpha - 1).
SourceProbe source_bound_check(const std::vector<SourceSample>& samples,
                               const std::vector<double>& grid, const std::vector<double>& deltas,
                               double ell_constant, const SourceProbe* reference = nullptr,
                               double slack = 0.0);

}  // namespace shockfit
