#include "shockfit/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "shockfit/errors.hpp"

namespace shockfit {

namespace {

using nlohmann::json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json report(const BoundReport& b) { return json::parse(bound_report_json(b)); }

json reports(const std::vector<BoundReport>& v) {
  json a = json::array();
  for (const auto& b : v) a.push_back(report(b));
  return a;
}

std::vector<BoundReport> source_reports(const SourceProbe& p) { return {p.F, p.F_x, p.h2}; }

// Zero violations against the coarse fit and a constant that moved by at most the slack.
Check refinement_check(const std::string& name, const std::vector<BoundReport>& coarse,
                       const std::vector<BoundReport>& fine, double slack) {
  Check c{name, true, ""};
  std::ostringstream os;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const BoundReport& a = coarse[i];
    const BoundReport& b = fine[i];
    double ca = a.fitted_constant, cb = b.fitted_constant;
    bool finite = std::isfinite(ca) && std::isfinite(cb);
    bool stable = finite && (ca == 0.0 ? cb == 0.0 : std::abs(cb - ca) <= slack * ca);
    bool ok = finite && a.violation_count == 0 && b.violation_count == 0 && stable;
    if (!ok) c.passed = false;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s%s c=%.4g->%.4g viol=%d", i ? "; " : "", a.quantity.c_str(),
                  ca, cb, b.violation_count);
    os << buf;
  }
  c.detail = os.str();
  return c;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

bool RunReport::all_passed() const {
  if (!result) return false;
  for (const Check& c : checks)
    if (!c.passed) return false;
  return true;
}

std::vector<double> probe_grid(const ProbeSettings& p, bool refine) {
  return log_grid(p.x_min, p.x_max, refine ? 2 * p.points : p.points);
}

std::vector<double> probe_deltas() { return {1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8}; }

RefinedCorrectorProbe probe_correctors(const IterationDiagnostics& d, const ProbeSettings& p) {
  std::vector<CorrectorParams> all;
  for (const auto& it : d.iterate_correctors) all.insert(all.end(), it.begin(), it.end());
  RefinedCorrectorProbe out;
  out.coarse = corrector_bound_check(all, probe_grid(p, false), probe_deltas());
  out.fine = corrector_bound_check(all, probe_grid(p, true), probe_deltas(), &out.coarse,
                                   p.refine_slack);
  return out;
}

namespace {

std::vector<SourceSample> source_samples(const Solution& sol, const std::vector<double>& r,
                                         const SourceBatch& batch, int count) {
  const TimeLevels& lv = sol.levels;
  const ProblemSpec& spec = sol.spec;
  std::vector<std::size_t> picks;
  double t_lo = lv.field[1], T = lv.T();
  for (int i = 0; i < count; ++i) {
    double target = count == 1 ? T : t_lo * std::pow(T / t_lo, double(i) / (count - 1));
    std::size_t best = 1;
    for (std::size_t j = 1; j < lv.field.size(); ++j)
      if (std::abs(std::log(lv.field[j] / target)) < std::abs(std::log(lv.field[best] / target))) best = j;
    if (std::find(picks.begin(), picks.end(), best) == picks.end()) picks.push_back(best);
  }
  std::vector<SourceSample> out;
  for (std::size_t j : picks) {
    const CorrectorParams& cp = sol.corrector[j];
    PiecewiseField w = r == sol.r ? sol.w.fields[j]
                                  : PiecewiseField::sample(r, [&](double x, int side) {
                                      return sol.w.fields[j].eval(x, side);
                                    });
    SourceSample s;
    s.ctx = make_source_context(spec.kernel, spec.flux, w, spec.v_bar, lv.field[j], cp.sigma_dot,
                                cp.b_minus_dot, cp.b_plus_dot, cp.has_rates);
    std::vector<double> left, right;
    batch.evaluate(s.ctx, left, right);
    s.table = PiecewiseField(r, left, right);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

RefinedSourceProbe probe_source(const Solution& sol, const IterationDiagnostics& d,
                                const ProbeSettings& p) {
  const SolverSettings& s = sol.settings;
  double ell = d.lipschitz_constant;
  RefinedSourceProbe out;
  SourceBatch coarse_batch(sol.spec.kernel, sol.r, s.nq);
  auto cs = source_samples(sol, sol.r, coarse_batch, p.time_samples);
  out.coarse = source_bound_check(cs, probe_grid(p, false), probe_deltas(), ell);
  // halve every cell of the node grid for the refined tables
  std::vector<double> rf;
  for (std::size_t i = 0; i + 1 < sol.r.size(); ++i) {
    rf.push_back(sol.r[i]);
    rf.push_back(0.5 * (sol.r[i] + sol.r[i + 1]));
  }
  rf.push_back(sol.r.back());
  SourceBatch fine_batch(sol.spec.kernel, rf, s.nq);
  auto fs = source_samples(sol, rf, fine_batch, p.time_samples);
  out.fine = source_bound_check(fs, probe_grid(p, true), probe_deltas(), ell, &out.coarse,
                                p.refine_slack);
  return out;
}

std::vector<OracleComparison> run_comparisons(const RunConfig& cfg, const Solution& sol) {
  std::vector<double> times = cfg.compare_times;
  if (times.empty()) times.push_back(std::min(0.1, sol.T()));
  for (double t : times)
    if (t > sol.T() * (1.0 + 1e-12))
      throw Error(ErrorCode::range, "comparison time " + fmt("%g", t) + " beyond the horizon " +
                                        fmt("%g", sol.T()));
  std::vector<int> res = cfg.oracle_resolutions;
  if (res.empty()) res.push_back(cfg.oracle.n_cells);
  std::vector<OracleComparison> out;
  for (int n : res) {
    FvSettings fs = cfg.oracle;
    fs.n_cells = n;
    FvState fv = fv_solve(sol.spec, fs, *std::max_element(times.begin(), times.end()), times);
    if (cfg.output.wants("csv")) {
      std::filesystem::create_directories(cfg.output.directory);
      for (std::size_t i = 0; i < times.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "oracle_n%d_%02zu.csv", n, i);
        write_fv_csv(fv, fv.snapshot_at(times[i]),
                     (std::filesystem::path(cfg.output.directory) / name).string());
      }
    }
    for (double t : times) {
      OracleComparison c;
      c.n_cells = n;
      c.metrics = compare(sol, fv, t);
      c.steps = fv.steps;
      c.rejected = fv.rejected;
      c.conservation_defect = fv.conservation_defect;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<Check> evaluate_checks(const RunConfig& cfg, const RunReport& rep) {
  std::vector<Check> out;
  if (!rep.result) {
    out.push_back({"contraction_certificate", false, "solver gave up without a certificate"});
    return out;
  }
  const Solution& sol = rep.result->solution;
  const IterationDiagnostics& d = rep.result->diagnostics;
  const ProblemSpec& spec = sol.spec;
  {
    std::ostringstream os;
    os << "T=" << d.T << " halvings=" << d.halvings << " ratios=[";
    for (std::size_t i = 0; i < d.contraction_ratios.size(); ++i)
      os << (i ? "," : "") << fmt("%.3g", d.contraction_ratios[i]);
    os << "]";
    out.push_back({"contraction_certificate", d.certificate, os.str()});
  }
  const InvariantCounts& ic = d.invariants;
  out.push_back({"entropy", ic.entropy == 0 && ic.b_ordering == 0,
                 "violations=" + std::to_string(ic.entropy) + " b_ordering=" +
                     std::to_string(ic.b_ordering) + " min_sigma=" + fmt("%.6g", ic.min_sigma) +
                     " floor=" + fmt("%.6g", spec.delta0 / 3.0)});
  out.push_back({"h2_norm", ic.norm == 0,
                 "violations=" + std::to_string(ic.norm) + " max=" + fmt("%.6g", ic.max_h2) +
                     " M0=" + fmt("%.6g", spec.M0)});
  out.push_back({"funnel", ic.funnel == 0,
                 "violations=" + std::to_string(ic.funnel) + " paths=" + std::to_string(ic.paths)});
  {
    double worst = 0.0;
    const auto& p = sol.shock_path;
    for (std::size_t m = 1; m < p.size(); ++m) {
      double ydot = (p[m].y - p[m - 1].y) / (p[m].t - p[m - 1].t);
      worst = std::max(worst, std::abs(ydot - 0.5 * (p[m].speed + p[m - 1].speed)));
    }
    out.push_back({"rh_consistency", worst <= 1e-10, "max |ydot - rh_speed| = " + fmt("%.3g", worst)});
  }
  double slack = cfg.probes.refine_slack;
  if (rep.corrector)
    out.push_back(refinement_check("corrector_envelopes", corrector_reports(rep.corrector->coarse),
                                   corrector_reports(rep.corrector->fine), slack));
  if (rep.source)
    out.push_back(refinement_check("source_envelopes", source_reports(rep.source->coarse),
                                   source_reports(rep.source->fine), slack));
  if (rep.lipschitz) {
    double alpha = spec.data.alpha, e = rep.lipschitz->exponent;
    bool ok = std::isnan(e) ? rep.lipschitz->envelope.fitted_constant == 0.0 : e >= alpha - 1.05;
    out.push_back({"trace_lipschitz", ok,
                   std::isnan(e) ? std::string("traces constant, exponent undefined, c=0")
                                 : "exponent=" + fmt("%.4g", e) + " floor=" + fmt("%.4g", alpha - 1.05)});
  }
  if (rep.balance) {
    bool smooth_free = spec.data.bump_amplitude == 0.0 && spec.v_bar.is_zero();
    double tol = spec.kernel.is_zero() ? (smooth_free ? 1e-6 : 1e-4) : 5e-3;
    out.push_back({"characteristic_balance", rep.balance->max_residual <= tol,
                   "max residual=" + fmt("%.3g", rep.balance->max_residual) + " tol=" +
                       fmt("%.0e", tol) + " paths=" + std::to_string(rep.balance->paths)});
  }
  if (!rep.comparisons.empty()) {
    // finest resolution at the first comparison time, monotone decrease across resolutions
    double t0 = rep.comparisons.front().metrics.t;
    std::vector<const OracleComparison*> at;
    for (const auto& c : rep.comparisons)
      if (c.metrics.t == t0) at.push_back(&c);
    std::sort(at.begin(), at.end(), [](auto* a, auto* b) { return a->n_cells < b->n_cells; });
    const CompareMetrics& m = at.back()->metrics;
    out.push_back({"oracle_l1", m.l1 <= 5e-3,
                   "L1=" + fmt("%.3g", m.l1) + " at t=" + fmt("%g", t0) + " n=" +
                       std::to_string(at.back()->n_cells)});
    out.push_back({"oracle_shock", m.shock_cells <= 3.0,
                   "discrepancy=" + fmt("%.3g", m.shock_cells) + " cells"});
    if (at.size() > 1) {
      bool mono = true;
      std::ostringstream os;
      for (std::size_t i = 0; i < at.size(); ++i) {
        os << (i ? " > " : "") << fmt("%.3g", at[i]->metrics.l1);
        if (i && !(at[i]->metrics.l1 < at[i - 1]->metrics.l1)) mono = false;
      }
      out.push_back({"oracle_monotone", mono, os.str()});
    }
  }
  return out;
}

namespace {

// Solve and record the outcome; false when the solver gave up.
bool solve_into(const RunConfig& cfg, RunReport& rep, const Logger& log) {
  try {
    rep.result = outer_solve(cfg.spec, cfg.solver, log);
    return true;
  } catch (const NoCertificateError& e) {
    rep.failed_diagnostics = e.diagnostics();
    if (log) log(std::string("no certificate: ") + e.what());
    return false;
  }
}

}  // namespace

int run_config(const RunConfig& cfg, RunReport& rep, const Logger& log) {
  auto t0 = std::chrono::steady_clock::now();
  rep.name = cfg.name;
  if (solve_into(cfg, rep, log)) {
    const Solution& sol = rep.result->solution;
    IterationDiagnostics& d = rep.result->diagnostics;
    if (log) log("probing corrector envelopes");
    rep.corrector = probe_correctors(d, cfg.probes);
    if (log) log("probing source envelopes");
    rep.source = probe_source(sol, d, cfg.probes);
    d.fitted_gamma1 = rep.source->fine.gamma1;
    rep.lipschitz = lipschitz_trace_check(sol);
    if (cfg.probes.balance_paths > 0) {
      if (log) log("characteristic balance");
      rep.balance = characteristic_balance_check(sol, cfg.probes.balance_paths, cfg.seed);
    }
    if (cfg.oracle_enabled) {
      if (log) log("oracle comparison");
      rep.comparisons = run_comparisons(cfg, sol);
    }
  }
  rep.checks = evaluate_checks(cfg, rep);
  rep.seconds = elapsed(t0);
  write_artifacts(cfg, rep);
  return rep.all_passed() ? 0 : 3;
}

int compare_config(const RunConfig& cfg, RunReport& rep, const Logger& log) {
  auto t0 = std::chrono::steady_clock::now();
  rep.name = cfg.name;
  if (solve_into(cfg, rep, log)) {
    if (log) log("oracle comparison");
    rep.comparisons = run_comparisons(cfg, rep.result->solution);
  }
  std::vector<Check> all = evaluate_checks(cfg, rep);
  for (const Check& c : all)
    if (c.name == "contraction_certificate" || c.name.rfind("oracle_", 0) == 0) rep.checks.push_back(c);
  rep.seconds = elapsed(t0);
  write_artifacts(cfg, rep);
  return rep.all_passed() ? 0 : 3;
}

int probe_config(const std::string& quantity, const RunConfig& cfg, std::string& json_out,
                 const Logger& log) {
  static const std::vector<std::string> known{"corrector", "source",      "lipschitz", "balance",
                                              "gamma2",    "contraction", "invariants"};
  if (std::find(known.begin(), known.end(), quantity) == known.end())
    throw Error(ErrorCode::config, "unknown probe quantity '" + quantity +
                                       "' (expected corrector, source, lipschitz, balance, "
                                       "gamma2, contraction or invariants)");
  RunReport rep;
  rep.name = cfg.name;
  if (!solve_into(cfg, rep, log)) {
    json_out = json{{"quantity", quantity}, {"error", "no certificate"}}.dump(2);
    return 3;
  }
  const Solution& sol = rep.result->solution;
  const IterationDiagnostics& d = rep.result->diagnostics;
  json j{{"quantity", quantity}};
  bool ok = true;
  if (quantity == "corrector") {
    auto p = probe_correctors(d, cfg.probes);
    j["coarse"] = reports(corrector_reports(p.coarse));
    j["fine"] = reports(corrector_reports(p.fine));
    ok = refinement_check("c", corrector_reports(p.coarse), corrector_reports(p.fine),
                          cfg.probes.refine_slack).passed;
  } else if (quantity == "source") {
    auto p = probe_source(sol, d, cfg.probes);
    j["coarse"] = reports(source_reports(p.coarse));
    j["fine"] = reports(source_reports(p.fine));
    j["gamma1"] = {num(p.coarse.gamma1), num(p.fine.gamma1)};
    ok = refinement_check("s", source_reports(p.coarse), source_reports(p.fine),
                          cfg.probes.refine_slack).passed;
  } else if (quantity == "lipschitz") {
    auto l = lipschitz_trace_check(sol);
    j["envelope"] = report(l.envelope);
    j["exponent"] = num(l.exponent);
    j["exponent_minus"] = num(l.exponent_minus);
    j["exponent_plus"] = num(l.exponent_plus);
  } else if (quantity == "balance") {
    auto b = characteristic_balance_check(sol, std::max(1, cfg.probes.balance_paths), cfg.seed);
    j["max_residual"] = b.max_residual;
    j["mean_residual"] = b.mean_residual;
    j["paths"] = b.paths;
  } else if (quantity == "gamma2") {
    j["fitted_gamma2"] = num(d.fitted_gamma2);
    j["reports"] = reports(d.gamma2_reports);
  } else if (quantity == "contraction") {
    j["beta_outer"] = d.beta_outer;
    j["contraction_ratios"] = d.contraction_ratios;
    j["certificate"] = d.certificate;
    ok = d.certificate;
  } else {
    j["invariants"] = json::parse(diagnostics_json(d, -1))["invariants"];
    ok = d.invariants.entropy == 0 && d.invariants.norm == 0 && d.invariants.funnel == 0;
  }
  json_out = j.dump(2);
  return ok ? 0 : 3;
}

std::string report_json(const RunReport& r, int indent) {
  json j;
  j["name"] = r.name;
  j["seconds"] = r.seconds;
  j["passed"] = r.all_passed();
  json checks = json::array();
  for (const Check& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = checks;
  if (r.result) j["diagnostics"] = json::parse(diagnostics_json(r.result->diagnostics, -1));
  else if (r.failed_diagnostics) j["diagnostics"] = json::parse(diagnostics_json(*r.failed_diagnostics, -1));
  if (r.result) {
    const Solution& s = r.result->solution;
    j["problem"] = {{"kernel", s.spec.kernel.name()},
                    {"flux", s.spec.flux.name()},
                    {"delta0", s.spec.delta0},
                    {"M0", s.spec.M0},
                    {"L", s.spec.L},
                    {"y0", s.spec.y0},
                    {"alpha", s.spec.data.alpha},
                    {"nodes_per_side", s.r.size()}};
  }
  if (r.corrector)
    j["corrector_probe"] = {{"coarse", reports(corrector_reports(r.corrector->coarse))},
                            {"fine", reports(corrector_reports(r.corrector->fine))}};
  if (r.source)
    j["source_probe"] = {{"coarse", reports(source_reports(r.source->coarse))},
                         {"fine", reports(source_reports(r.source->fine))},
                         {"gamma1_coarse", num(r.source->coarse.gamma1)},
                         {"gamma1_fine", num(r.source->fine.gamma1)},
                         {"ell_constant", num(r.source->coarse.ell_constant)}};
  if (r.lipschitz)
    j["trace_lipschitz"] = {{"envelope", report(r.lipschitz->envelope)},
                            {"exponent", num(r.lipschitz->exponent)},
                            {"exponent_minus", num(r.lipschitz->exponent_minus)},
                            {"exponent_plus", num(r.lipschitz->exponent_plus)}};
  if (r.balance)
    j["characteristic_balance"] = {{"max_residual", r.balance->max_residual},
                                   {"mean_residual", r.balance->mean_residual},
                                   {"paths", r.balance->paths}};
  json cmp = json::array();
  for (const auto& c : r.comparisons) {
    json m = json::parse(compare_json(c.metrics));
    m["n_cells"] = c.n_cells;
    m["steps"] = c.steps;
    m["rejected_steps"] = c.rejected;
    m["conservation_defect"] = c.conservation_defect;
    cmp.push_back(m);
  }
  if (!cmp.empty()) j["oracle_comparisons"] = cmp;
  return j.dump(indent);
}

std::string report_summary(const RunReport& r) {
  std::ostringstream os;
  os << "run " << r.name << " (" << fmt("%.1f", r.seconds) << " s)\n";
  if (r.result) {
    const IterationDiagnostics& d = r.result->diagnostics;
    os << "horizon T=" << d.T << " (start " << d.T_start << ", " << d.halvings
       << " halvings), outer iterations " << d.beta_outer.size() << ", picard steps "
       << d.picard_steps << "\n";
  }
  for (const Check& c : r.checks)
    os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  os << (r.all_passed() ? "all checks passed" : "some checks failed") << "\n";
  return os.str();
}

namespace {

const char* kPlotScript = R"PY(import csv, glob, os, sys
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))

def rows(path):
    with open(path) as f:
        return list(csv.DictReader(f))

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
snaps = sorted(glob.glob(os.path.join(here, "snapshot_*.csv")))
for path in snaps[:: max(1, len(snaps) // 6)] + snaps[-1:]:
    data = rows(path)
    for side in ("left", "right"):
        pts = [(float(d["x"]), float(d["u"])) for d in data if d["side"] == side]
        ax1.plot([p[0] for p in pts], [p[1] for p in pts], lw=0.8,
                 label="t=%.3g" % float(data[0]["t"]) if side == "left" else None)
ax1.set_xlabel("x - y(t)")
ax1.set_ylabel("u")
ax1.legend(fontsize=7)
path = rows(os.path.join(here, "shock_path.csv"))
ax2.plot([float(d["t"]) for d in path], [float(d["y"]) for d in path])
ax2.set_xlabel("t")
ax2.set_ylabel("y(t)")
fig.tight_layout()
fig.savefig(os.path.join(here, "solution.png"), dpi=120)
)PY";

}  // namespace

void write_artifacts(const RunConfig& cfg, const RunReport& r) {
  namespace fs = std::filesystem;
  fs::path dir(cfg.output.directory);
  fs::create_directories(dir);
  if (cfg.output.wants("csv") && r.result) {
    write_solution_csv(r.result->solution, dir.string());
    write_shock_path_csv(r.result->solution, (dir / "shock_path.csv").string());
  }
  if (cfg.output.wants("json")) {
    std::ofstream(dir / "diagnostics.json") << report_json(r) << "\n";
  }
  if (cfg.output.wants("plot") && r.result) std::ofstream(dir / "plot.py") << kPlotScript;
  std::ofstream(dir / "summary.txt") << report_summary(r);
}

}  // namespace shockfit
