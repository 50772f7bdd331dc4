#pragma once

#include <string>
#include <vector>

#include "shockfit/oracle.hpp"
#include "shockfit/solver.hpp"
#include "shockfit/state.hpp"

namespace shockfit {

struct ProbeSettings {
  // points per side of the log grid on 1e-4 <= |x| <= probe_x_max
  int points = 24;
  double x_min = 1e-4;
  double x_max = 0.24;
  // relative drift allowed between a probe and its refined rerun
  double refine_slack = 0.1;
  int time_samples = 6;
  int balance_paths = 20;
};

struct OutputSettings {
  std::string directory = "shockfit_out";
  // any of csv, json, plot
  std::vector<std::string> formats{"csv", "json", "plot"};

  bool wants(const std::string& f) const;
};

struct RunConfig {
  std::string name;
  ProblemSpec spec;
  SolverSettings solver;
  FvSettings oracle;
  bool oracle_enabled = false;
  std::vector<int> oracle_resolutions;
  std::vector<double> compare_times;
  ProbeSettings probes;
  OutputSettings output;
  unsigned seed = 1;
};

// Throws Error(config) with "<source>:<line>: <field>: <reason>".
RunConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
RunConfig parse_config_file(const std::string& path);

}  // namespace shockfit
