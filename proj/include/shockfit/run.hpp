#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shockfit/config.hpp"
#include "shockfit/corrector.hpp"
#include "shockfit/oracle.hpp"
#include "shockfit/solver.hpp"
#include "shockfit/source.hpp"

namespace shockfit {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RefinedCorrectorProbe {
  CorrectorProbe coarse;
  CorrectorProbe fine;
};

struct RefinedSourceProbe {
  SourceProbe coarse;
  SourceProbe fine;
};

struct OracleComparison {
  int n_cells = 0;
  CompareMetrics metrics;
  int steps = 0;
  int rejected = 0;
  double conservation_defect = 0.0;
};

struct RunReport {
  std::string name;
  std::optional<SolveResult> result;
  // filled when the solver gave up; diagnostics still written
  std::optional<IterationDiagnostics> failed_diagnostics;
  std::optional<RefinedCorrectorProbe> corrector;
  std::optional<RefinedSourceProbe> source;
  std::optional<LipschitzReport> lipschitz;
  std::optional<BalanceReport> balance;
  std::vector<OracleComparison> comparisons;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool all_passed() const;
};

using Logger = std::function<void(const std::string&)>;

// Probe grid on x_min <= |x| <= x_max; refine doubles the point count.
std::vector<double> probe_grid(const ProbeSettings& p, bool refine);
std::vector<double> probe_deltas();

RefinedCorrectorProbe probe_correctors(const IterationDiagnostics& d, const ProbeSettings& p);
RefinedSourceProbe probe_source(const Solution& sol, const IterationDiagnostics& d,
                                const ProbeSettings& p);
std::vector<OracleComparison> run_comparisons(const RunConfig& cfg, const Solution& sol);

// Pass/fail lines for every invariant; thresholds depend on the kernel and datum.
std::vector<Check> evaluate_checks(const RunConfig& cfg, const RunReport& rep);

// Full run: solve, probes, optional oracle comparison, artifacts. Exit code 0, 3.
// Config errors propagate as Error(config); internal faults as other errors.
int run_config(const RunConfig& cfg, RunReport& report, const Logger& log = nullptr);
// Solver against the oracle only.
int compare_config(const RunConfig& cfg, RunReport& report, const Logger& log = nullptr);
// One probe by name: corrector, source, lipschitz, balance, gamma2, contraction, invariants.
int probe_config(const std::string& quantity, const RunConfig& cfg, std::string& json_out,
                 const Logger& log = nullptr);

std::string report_json(const RunReport& r, int indent = 2);
std::string report_summary(const RunReport& r);
void write_artifacts(const RunConfig& cfg, const RunReport& r);

}  // namespace shockfit
