#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "shockfit/corrector.hpp"
#include "shockfit/errors.hpp"
#include "shockfit/source.hpp"
#include "shockfit/state.hpp"

namespace shockfit {

struct SolverSettings {
  // node grading: first cell h0_rel * L, growth ratio, largest cell
  double h0_rel = 1e-5;
  double ratio = 1.15;
  double hmax = 0.05;
  // field snapshots every T / macro_steps; trace history trace_refine times finer
  int macro_steps = 64;
  int trace_refine = 4;
  // extra dyadic levels below the first macro step
  int graded_levels = 8;
  double tol_inner = 1e-8;
  double tol_outer = 1e-8;
  int k_max = 40;
  int n_max = 30;
  int halvings_max = 5;
  // RK4 substeps keep h |a_x| below this
  double step_factor = 0.05;
  double min_step = 1e-12;
  int nq = 4;
  // starting horizon; <= 0 selects the characteristic-lemma value
  double T = 0.0;
  double L_min = 4.0;
  // number of corrector time samples stored per accepted outer iterate
  int corrector_samples = 6;
};

struct TimeLevels {
  std::vector<double> field;
  std::vector<double> trace;
  std::vector<std::size_t> field_to_trace;

  static TimeLevels make(double T, int macro_steps, int trace_refine, int graded_levels);
  double T() const { return field.back(); }
};

// Per-level fields on a shared grid, linear in time between levels.
class FieldTable {
 public:
  FieldTable() = default;
  FieldTable(std::vector<double> times, std::vector<PiecewiseField> levels);

  double eval(double t, double x, int side, int order = 0) const;
  // value and x-derivative with a single interval search
  void eval_slope(double t, double x, int side, double& v, double& dv) const;
  const PiecewiseField& level(std::size_t j) const { return levels_[j]; }
  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return levels_.size(); }

 private:
  std::vector<double> times_;
  std::vector<PiecewiseField> levels_;
};

// Time-indexed shock-frame field with its trace history.
struct History {
  std::vector<PiecewiseField> fields;
  std::vector<double> trace_minus;
  std::vector<double> trace_plus;
};

struct TraceRates {
  double sigma_dot = 0.0;
  double b_minus_dot = 0.0;
  double b_plus_dot = 0.0;
  bool valid = false;
};

TraceRates trace_rates(const History& h, const TimeLevels& lv, const Flux& f, std::size_t m);

// Corrector parameters of w at field level j.
CorrectorParams level_corrector(const ProblemSpec& spec, const History& w, const TimeLevels& lv,
                                std::size_t j);

struct CoefficientField {
  FieldTable a;
  double b0 = 0.0;
  double b1 = 0.0;
  double delta1 = 0.0;
};

CoefficientField make_coefficient(const ProblemSpec& spec, const History& w, const TimeLevels& lv);

// Sampled sign condition on (0, 2 delta] and [-2 delta, 0) over all field levels.
bool sign_condition_holds(const CoefficientField& a, double delta);
// Largest dyadic delta <= delta_max with the sign condition, 0 if none.
double sign_condition_delta(const CoefficientField& a, double delta_max);

struct CharacteristicPath {
  std::vector<double> t;
  std::vector<double> x;
  // integral of the source along the path
  double integral = 0.0;
  int substeps = 0;
  int funnel_violations = 0;
};

using SpaceTimeFn = std::function<double(double t, double x, int side)>;

// Backward characteristic x' = a(t, x), x(t0) = x0 on a time grid ending at t0.
// With a source, the integral over [0, t0] is accumulated; below t_source the
// source is taken as c t^(alpha-1) matched at t_source.
CharacteristicPath trace_characteristic(const SpaceTimeFn& a, const SpaceTimeFn& a_x,
                                        const std::vector<double>& grid, double x0, int side,
                                        const SpaceTimeFn* source = nullptr,
                                        double t_source = 0.0, double alpha = 1.0,
                                        double step_factor = 0.05, double min_step = 1e-12);
// Uniform grid of n steps on [0, t0].
CharacteristicPath trace_characteristic(const SpaceTimeFn& a, const SpaceTimeFn& a_x, double t0,
                                        double x0, int side, int n_steps = 256);

struct ShockPathSample {
  double t = 0.0;
  double y = 0.0;
  double u_minus = 0.0;
  double u_plus = 0.0;
  double speed = 0.0;
};

struct InvariantCounts {
  int entropy = 0;
  int norm = 0;
  int funnel = 0;
  int b_ordering = 0;
  double min_sigma = 0.0;
  double max_h2 = 0.0;
  long paths = 0;
};

struct IterationDiagnostics {
  std::vector<std::vector<double>> beta_inner;
  std::vector<std::vector<double>> sigma_inner;
  std::vector<double> beta_outer;
  std::vector<double> contraction_ratios;
  double fitted_gamma1 = 0.0;
  double fitted_gamma2 = 0.0;
  std::vector<BoundReport> gamma2_reports;
  // (t, |w-'| t^(1-a), |w+'| t^(1-a))
  std::vector<std::array<double, 3>> lipschitz_envelope;
  double lipschitz_constant = 0.0;
  std::vector<std::vector<CorrectorParams>> iterate_correctors;
  InvariantCounts invariants;
  double T_start = 0.0;
  double T = 0.0;
  double delta1 = 0.0;
  double b0 = 0.0;
  double b1 = 0.0;
  double L = 0.0;
  int halvings = 0;
  int picard_steps = 0;
  bool certificate = false;
  std::vector<std::string> attempts;
};

struct Solution {
  ProblemSpec spec;
  SolverSettings settings;
  TimeLevels levels;
  std::vector<double> r;
  History w;
  std::vector<CorrectorParams> corrector;
  std::vector<ShockPathSample> shock_path;

  double T() const { return levels.T(); }
  // u = w + phi at field level j
  double u_level(std::size_t j, double x, int side) const;
  // linear in time between field levels
  double u_at(double t, double x, int side) const;
  double w_at(double t, double x, int side) const;
  double shock_position(double t) const;
  ShockPathSample trace_at(double t) const;
};

// Duhamel update for all field nodes and trace levels.
// The source table F(t, x, w_k) is returned through source_out when given.
History picard_step(const ProblemSpec& spec, const CoefficientField& a, const History& wk,
                    const TimeLevels& lv, const std::vector<double>& r, const SourceBatch& batch,
                    const SolverSettings& s, InvariantCounts* counts = nullptr,
                    FieldTable* source_out = nullptr);

struct InnerResult {
  History w;
  std::vector<double> beta;
  std::vector<double> sigma;
  std::vector<BoundReport> gamma2;
  int iterations = 0;
};

// ell_constant scales ell(t) = ell_constant * t^(alpha - 1) in the Gamma_2 envelopes.
InnerResult inner_solve(const ProblemSpec& spec, const CoefficientField& a, const TimeLevels& lv,
                        const std::vector<double>& r, const SourceBatch& batch,
                        const SolverSettings& s, double ell_constant = 0.0,
                        InvariantCounts* counts = nullptr);

History constant_history(const ProblemSpec& spec, const TimeLevels& lv,
                         const std::vector<double>& r);

// Spatial grid and window for a spec; fills spec.L, delta0, M0.
std::vector<double> prepare_grid(ProblemSpec& spec, const SolverSettings& s, double T);

struct SolveResult {
  Solution solution;
  IterationDiagnostics diagnostics;
};

class NoCertificateError : public Error {
 public:
  NoCertificateError(const std::string& what, IterationDiagnostics d)
      : Error(ErrorCode::no_certificate, what), diag_(std::move(d)) {}
  const IterationDiagnostics& diagnostics() const { return diag_; }

 private:
  IterationDiagnostics diag_;
};

SolveResult outer_solve(const ProblemSpec& spec, const SolverSettings& s,
                        const std::function<void(const std::string&)>& log = nullptr);

struct BalanceReport {
  double max_residual = 0.0;
  double mean_residual = 0.0;
  int paths = 0;
};

BalanceReport characteristic_balance_check(const Solution& sol, int n_paths, unsigned seed = 1);

struct LipschitzReport {
  BoundReport envelope;
  // NaN when the trace derivative vanishes identically
  double exponent_minus = 0.0;
  double exponent_plus = 0.0;
  double exponent = 0.0;
};

LipschitzReport lipschitz_trace_check(const Solution& sol, double t_min_fraction = 0.01);

// Trace derivative samples (t, w-', w+') at the trace levels.
std::vector<std::array<double, 3>> trace_derivatives(const Solution& sol);

void write_solution_csv(const Solution& sol, const std::string& dir);
void write_shock_path_csv(const Solution& sol, const std::string& path);
std::string diagnostics_json(const IterationDiagnostics& d, int indent = 2);

}  // namespace shockfit
