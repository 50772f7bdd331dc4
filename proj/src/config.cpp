#include "shockfit/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "shockfit/errors.hpp"

namespace shockfit {

bool OutputSettings::wants(const std::string& f) const {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

namespace {

using nlohmann::json;

// Line of the first occurrence of every dotted key path in a JSON text.
std::map<std::string, int> key_lines(const std::string& text) {
  std::map<std::string, int> out;
  struct Frame {
    bool object;
    std::string key;
  };
  std::vector<Frame> stack;
  int line = 1;
  std::size_t i = 0, n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == '\n') ++line;
    if (c == '{' || c == '[') {
      stack.push_back({c == '{', ""});
    } else if ((c == '}' || c == ']') && !stack.empty()) {
      stack.pop_back();
    } else if (c == '"') {
      std::string s;
      ++i;
      while (i < n && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < n) ++i;
        if (text[i] == '\n') ++line;
        s += text[i++];
      }
      std::size_t j = i + 1;
      while (j < n && std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '\n') ++j;
      if (j < n && text[j] == ':' && !stack.empty() && stack.back().object) {
        stack.back().key = s;
        std::string path;
        for (const auto& f : stack) {
          if (!f.object) continue;
          if (!path.empty()) path += '.';
          path += f.key;
        }
        out.emplace(path, line);
      }
    }
    ++i;
  }
  return out;
}

class Reader {
 public:
  Reader(const std::string& text, std::string source)
      : source_(std::move(source)), lines_(key_lines(text)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& why) const {
    // anchor at the field, else at its closest present parent
    std::string p = path;
    int line = 1;
    while (true) {
      auto it = lines_.find(p);
      if (it != lines_.end()) {
        line = it->second;
        break;
      }
      auto dot = p.rfind('.');
      if (dot == std::string::npos) break;
      p = p.substr(0, dot);
    }
    throw Error(ErrorCode::config,
                source_ + ":" + std::to_string(line) + ": " + path + ": " + why);
  }

  void check_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key()))
        fail(join(path, it.key()), "unknown field");
  }

  double number(const json& obj, const std::string& path, const std::string& key,
                double fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) fail(join(path, key), "must be finite");
    return d;
  }

  int integer(const json& obj, const std::string& path, const std::string& key, int fallback,
              int lo) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
    long long x = v.get<long long>();
    if (x < lo || x > 1000000000) fail(join(path, key), "must be at least " + std::to_string(lo));
    return static_cast<int>(x);
  }

  std::string string(const json& obj, const std::string& path, const std::string& key,
                     const std::string& fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
  }

  static std::string join(const std::string& a, const std::string& b) {
    return a.empty() ? b : a + "." + b;
  }

 private:
  std::string source_;
  std::map<std::string, int> lines_;
};

const json& section(const json& root, const std::string& key) {
  static const json empty = json::object();
  return root.contains(key) ? root.at(key) : empty;
}

void read_kernel(const Reader& rd, const json& k, RunConfig& cfg) {
  rd.check_keys(k, "kernel", {"type", "C", "singular", "integrable", "singular_scale",
                              "integrable_scale"});
  std::string type = rd.string(k, "kernel", "type", "hilbert");
  if (type == "hilbert") {
    cfg.spec.kernel = Kernel::hilbert();
  } else if (type == "burgers_poisson") {
    cfg.spec.kernel = Kernel::burgers_poisson();
  } else if (type == "zero") {
    cfg.spec.kernel = Kernel::zero();
  } else if (type == "custom") {
    SingularPart k1;
    IntegrablePart k2;
    try {
      k1 = singular_part_from_name(rd.string(k, "kernel", "singular", "none"));
    } catch (const Error& e) {
      rd.fail("kernel.singular", e.what());
    }
    try {
      k2 = integrable_part_from_name(rd.string(k, "kernel", "integrable", "none"));
    } catch (const Error& e) {
      rd.fail("kernel.integrable", e.what());
    }
    if (!k.contains("C")) rd.fail("kernel.C", "custom kernels must declare C");
    double c = rd.number(k, "kernel", "C", 0.0);
    if (!(c > 0)) rd.fail("kernel.C", "must be positive");
    double s1 = rd.number(k, "kernel", "singular_scale", 1.0);
    double s2 = rd.number(k, "kernel", "integrable_scale", 1.0);
    cfg.spec.kernel = Kernel(k1, s1, k2, s2, c, "custom");
  } else {
    rd.fail("kernel.type", "unknown kernel type '" + type +
                               "' (expected hilbert, burgers_poisson, zero or custom)");
  }
}

void read_flux(const Reader& rd, const json& f, RunConfig& cfg) {
  rd.check_keys(f, "flux", {"type", "a", "b", "coefficients"});
  std::string type = rd.string(f, "flux", "type", "burgers");
  if (type == "burgers") {
    cfg.spec.flux = Flux::burgers();
  } else if (type == "quadratic_plus_linear") {
    double a = rd.number(f, "flux", "a", 1.0), b = rd.number(f, "flux", "b", 0.0);
    if (!(a > 0)) rd.fail("flux.a", "must be positive for a strictly convex flux");
    cfg.spec.flux = Flux::quadratic_plus_linear(a, b);
  } else if (type == "custom") {
    if (!f.contains("coefficients") || !f.at("coefficients").is_array() ||
        f.at("coefficients").empty())
      rd.fail("flux.coefficients", "expected a non-empty array of numbers");
    std::vector<double> c;
    for (const auto& v : f.at("coefficients")) {
      if (!v.is_number()) rd.fail("flux.coefficients", "expected numbers");
      c.push_back(v.get<double>());
    }
    cfg.spec.flux = Flux(c, "custom");
  } else {
    rd.fail("flux.type", "unknown flux type '" + type +
                             "' (expected burgers, quadratic_plus_linear or custom)");
  }
}

void read_initial_data(const Reader& rd, const json& d, RunConfig& cfg) {
  rd.check_keys(d, "initial_data", {"riemann", "bump", "v_bar"});
  InitialData& id = cfg.spec.data;
  const json& rm = section(d, "riemann");
  rd.check_keys(rm, "initial_data.riemann", {"uL", "uR", "y0", "taper"});
  id.uL = rd.number(rm, "initial_data.riemann", "uL", 1.0);
  id.uR = rd.number(rm, "initial_data.riemann", "uR", 0.0);
  if (!(id.uL > id.uR)) rd.fail("initial_data.riemann.uR", "entropy condition needs uL > uR");
  cfg.spec.y0 = rd.number(rm, "initial_data.riemann", "y0", 0.0);
  id.taper = rd.number(rm, "initial_data.riemann", "taper", 0.0);
  if (id.taper < 0) rd.fail("initial_data.riemann.taper", "must be non-negative");

  const json& bp = section(d, "bump");
  rd.check_keys(bp, "initial_data.bump", {"amplitude", "center", "width"});
  id.bump_amplitude = rd.number(bp, "initial_data.bump", "amplitude", 0.0);
  id.bump_center = rd.number(bp, "initial_data.bump", "center", 0.0);
  id.bump_width = rd.number(bp, "initial_data.bump", "width", 1.0);
  if (!(id.bump_width > 0)) rd.fail("initial_data.bump.width", "must be positive");

  const json& vb = section(d, "v_bar");
  rd.check_keys(vb, "initial_data.v_bar", {"amplitude", "alpha"});
  id.vbar_amplitude = rd.number(vb, "initial_data.v_bar", "amplitude", 0.0);
  id.alpha = rd.number(vb, "initial_data.v_bar", "alpha", 0.8);
  if (!(id.alpha > 0.75 && id.alpha < 1.0))
    rd.fail("initial_data.v_bar.alpha", "must lie in the open interval (3/4, 1)");

  // strict convexity over the range the data can reach
  double lo = std::min({id.uL, id.uR, 0.0}) - std::abs(id.bump_amplitude) -
              std::abs(id.vbar_amplitude);
  double hi = std::max({id.uL, id.uR, 0.0}) + std::abs(id.bump_amplitude) +
              std::abs(id.vbar_amplitude);
  double pad = 0.5 * (hi - lo) + 0.1;
  if (!(cfg.spec.flux.convexity_floor(lo - pad, hi + pad) > 0))
    rd.fail("flux", "flux is not strictly convex over the range of the initial data");
}

void read_solver(const Reader& rd, const json& s, RunConfig& cfg) {
  const std::string p = "solver";
  rd.check_keys(s, p, {"T", "tol_inner", "tol_outer", "k_max", "n_max", "halvings_max",
                       "macro_steps", "trace_refine", "graded_levels", "hmax", "h0_rel",
                       "ratio", "L_min", "step_factor", "corrector_samples"});
  SolverSettings& o = cfg.solver;
  o.T = rd.number(s, p, "T", o.T);
  o.tol_inner = rd.number(s, p, "tol_inner", o.tol_inner);
  o.tol_outer = rd.number(s, p, "tol_outer", o.tol_outer);
  if (!(o.tol_inner > 0)) rd.fail("solver.tol_inner", "must be positive");
  if (!(o.tol_outer > 0)) rd.fail("solver.tol_outer", "must be positive");
  o.k_max = rd.integer(s, p, "k_max", o.k_max, 1);
  o.n_max = rd.integer(s, p, "n_max", o.n_max, 1);
  o.halvings_max = rd.integer(s, p, "halvings_max", o.halvings_max, 0);
  o.macro_steps = rd.integer(s, p, "macro_steps", o.macro_steps, 2);
  o.trace_refine = rd.integer(s, p, "trace_refine", o.trace_refine, 1);
  o.graded_levels = rd.integer(s, p, "graded_levels", o.graded_levels, 0);
  o.corrector_samples = rd.integer(s, p, "corrector_samples", o.corrector_samples, 1);
  o.hmax = rd.number(s, p, "hmax", o.hmax);
  o.h0_rel = rd.number(s, p, "h0_rel", o.h0_rel);
  o.ratio = rd.number(s, p, "ratio", o.ratio);
  o.L_min = rd.number(s, p, "L_min", o.L_min);
  o.step_factor = rd.number(s, p, "step_factor", o.step_factor);
  if (!(o.hmax > 0)) rd.fail("solver.hmax", "must be positive");
  if (!(o.h0_rel > 0 && o.h0_rel < 0.1)) rd.fail("solver.h0_rel", "must lie in (0, 0.1)");
  if (!(o.ratio >= 1.0)) rd.fail("solver.ratio", "must be at least 1");
  if (!(o.L_min >= 3.0)) rd.fail("solver.L_min", "must be at least 3 (corrector support)");
  if (!(o.step_factor > 0)) rd.fail("solver.step_factor", "must be positive");
}

void read_oracle(const Reader& rd, const json& s, RunConfig& cfg) {
  const std::string p = "oracle";
  rd.check_keys(s, p, {"enabled", "n_cells", "cfl", "L", "source", "resolutions", "times"});
  if (s.contains("enabled")) {
    if (!s.at("enabled").is_boolean()) rd.fail("oracle.enabled", "expected true or false");
    cfg.oracle_enabled = s.at("enabled").get<bool>();
  } else {
    cfg.oracle_enabled = !s.empty();
  }
  FvSettings& o = cfg.oracle;
  o.n_cells = rd.integer(s, p, "n_cells", o.n_cells, 16);
  o.cfl = rd.number(s, p, "cfl", o.cfl);
  if (!(o.cfl > 0 && o.cfl <= 0.45)) rd.fail("oracle.cfl", "must lie in (0, 0.45]");
  o.L = rd.number(s, p, "L", o.L);
  if (!(o.L > 0)) rd.fail("oracle.L", "must be positive");
  std::string src = rd.string(s, p, "source", "automatic");
  if (src == "automatic") o.source = FvSource::automatic;
  else if (src == "spectral") o.source = FvSource::spectral;
  else if (src == "quadrature") o.source = FvSource::quadrature;
  else rd.fail("oracle.source", "unknown source '" + src + "' (expected automatic, spectral or quadrature)");
  if (o.source == FvSource::spectral && !cfg.spec.kernel.is_hilbert() && !cfg.spec.kernel.is_zero())
    rd.fail("oracle.source", "the spectral path needs the Hilbert kernel");
  if (s.contains("resolutions")) {
    if (!s.at("resolutions").is_array()) rd.fail("oracle.resolutions", "expected an array");
    for (const auto& v : s.at("resolutions")) {
      if (!v.is_number_integer() || v.get<long long>() < 16)
        rd.fail("oracle.resolutions", "expected integers >= 16");
      cfg.oracle_resolutions.push_back(v.get<int>());
    }
  }
  if (s.contains("times")) {
    if (!s.at("times").is_array()) rd.fail("oracle.times", "expected an array");
    for (const auto& v : s.at("times")) {
      if (!v.is_number() || !(v.get<double>() > 0)) rd.fail("oracle.times", "expected positive times");
      cfg.compare_times.push_back(v.get<double>());
    }
  }
}

void read_probes(const Reader& rd, const json& s, RunConfig& cfg) {
  const std::string p = "probes";
  rd.check_keys(s, p, {"points", "x_min", "x_max", "refine_slack", "time_samples",
                       "balance_paths"});
  ProbeSettings& o = cfg.probes;
  o.points = rd.integer(s, p, "points", o.points, 2);
  o.x_min = rd.number(s, p, "x_min", o.x_min);
  o.x_max = rd.number(s, p, "x_max", o.x_max);
  if (!(o.x_min > 0 && o.x_min < o.x_max && o.x_max < 0.25))
    rd.fail("probes.x_max", "need 0 < x_min < x_max < 1/4");
  o.refine_slack = rd.number(s, p, "refine_slack", o.refine_slack);
  if (!(o.refine_slack >= 0)) rd.fail("probes.refine_slack", "must be non-negative");
  o.time_samples = rd.integer(s, p, "time_samples", o.time_samples, 1);
  o.balance_paths = rd.integer(s, p, "balance_paths", o.balance_paths, 0);
}

void read_output(const Reader& rd, const json& s, RunConfig& cfg) {
  rd.check_keys(s, "output", {"directory", "formats"});
  cfg.output.directory = rd.string(s, "output", "directory", cfg.output.directory);
  if (cfg.output.directory.empty()) rd.fail("output.directory", "must not be empty");
  if (s.contains("formats")) {
    if (!s.at("formats").is_array()) rd.fail("output.formats", "expected an array");
    cfg.output.formats.clear();
    for (const auto& v : s.at("formats")) {
      if (!v.is_string()) rd.fail("output.formats", "expected strings");
      std::string f = v.get<std::string>();
      if (f != "csv" && f != "json" && f != "plot")
        rd.fail("output.formats", "unknown format '" + f + "' (expected csv, json or plot)");
      cfg.output.formats.push_back(f);
    }
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw Error(ErrorCode::config, source + ":" + std::to_string(line) + ": invalid JSON: " + e.what());
  }
  Reader rd(text, source);
  if (!root.is_object()) rd.fail("", "top level must be an object");
  rd.check_keys(root, "", {"name", "kernel", "flux", "initial_data", "solver", "oracle", "probes",
                           "output", "seed"});
  RunConfig cfg;
  cfg.name = rd.string(root, "", "name", "run");
  read_kernel(rd, section(root, "kernel"), cfg);
  read_flux(rd, section(root, "flux"), cfg);
  read_initial_data(rd, section(root, "initial_data"), cfg);
  read_solver(rd, section(root, "solver"), cfg);
  read_oracle(rd, section(root, "oracle"), cfg);
  read_probes(rd, section(root, "probes"), cfg);
  read_output(rd, section(root, "output"), cfg);
  if (root.contains("seed")) {
    const json& v = root.at("seed");
    if (!v.is_number_unsigned()) rd.fail("seed", "expected a non-negative integer");
    cfg.seed = v.get<unsigned>();
  }
  if (cfg.solver.T > 0)
    for (double t : cfg.compare_times)
      if (t > cfg.solver.T) rd.fail("oracle.times", "comparison time exceeds solver.T");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config, path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace shockfit
