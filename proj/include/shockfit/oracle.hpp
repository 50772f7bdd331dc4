#pragma once

#include <string>
#include <vector>

#include "shockfit/solver.hpp"
#include "shockfit/state.hpp"

namespace shockfit {

enum class FvSource { automatic, spectral, quadrature };

struct FvSettings {
  int n_cells = 16384;
  double cfl = 0.45;
  double L = 8.0;
  FvSource source = FvSource::automatic;
};

struct FvSnapshot {
  double t = 0.0;
  std::vector<double> u;
};

// Uniform cells on [-L, L] in original coordinates.
struct FvState {
  double L = 0.0;
  double dx = 0.0;
  double cfl = 0.0;
  std::vector<double> centers;
  std::vector<FvSnapshot> snapshots;
  int steps = 0;
  int rejected = 0;
  // largest relative change of sum(u) dx over a transport step, ignoring boundary flux
  double conservation_defect = 0.0;

  // linear interpolation between cell centres
  double value(std::size_t snap, double x) const;
  // centre of the steepest-gradient interface
  double shock_location(std::size_t snap) const;
  std::size_t snapshot_at(double t) const;
};

// Initial datum u(0, x) = w_bar(x - y0) + phi(0, x - y0).
double initial_value(const ProblemSpec& spec, double x);

// G[u] on the uniform grid, zero outside; 4x zero padding.
std::vector<double> fv_source(const Kernel& k, const std::vector<double>& u, double dx,
                              FvSource mode);

double godunov_flux(const Flux& f, double ul, double ur);
// c: point where f' vanishes, NaN when f is monotone
double godunov_flux(const Flux& f, double c, double ul, double ur);

FvState fv_solve(const ProblemSpec& spec, const FvSettings& s, double t_end,
                 const std::vector<double>& output_times);

struct CompareMetrics {
  double t = 0.0;
  double l1 = 0.0;
  double shock_fit = 0.0;
  double shock_fv = 0.0;
  double shock_discrepancy = 0.0;
  double shock_cells = 0.0;
  double trace_minus_diff = 0.0;
  double trace_plus_diff = 0.0;
  double dx = 0.0;
};

// L1 over [-window, window] in original coordinates plus shock and trace discrepancies;
// traces are read 3 cells outside the shock.
CompareMetrics compare(const Solution& sol, const FvState& fv, double t, double window = 4.0);

void write_fv_csv(const FvState& fv, std::size_t snap, const std::string& path);
std::string compare_json(const CompareMetrics& m, int indent = -1);

}  // namespace shockfit
