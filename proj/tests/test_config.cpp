#include <doctest.h>

#include <string>

#include "shockfit/config.hpp"
#include "shockfit/errors.hpp"

using namespace shockfit;

namespace {

const char* kBase = R"({
  "name": "t",
  "kernel": {"type": "hilbert"},
  "flux": {"type": "burgers"},
  "initial_data": {"riemann": {"uL": 0.5, "uR": -0.5, "taper": 4}}
})";

std::string config_error(const std::string& text) {
  try {
    parse_config_text(text, "cfg.json");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) return e.what();
    return "wrong code";
  }
  return "";
}

std::string with(const std::string& from, const std::string& to) {
  std::string s = kBase;
  s.replace(s.find(from), from.size(), to);
  return s;
}

}  // namespace

TEST_CASE("minimal config") {
  RunConfig c = parse_config_text(kBase);
  CHECK(c.name == "t");
  CHECK(c.spec.kernel.is_hilbert());
  CHECK(c.spec.data.uL == 0.5);
  CHECK(c.spec.data.taper == 4.0);
  CHECK_FALSE(c.oracle_enabled);
  CHECK(c.solver.tol_inner == SolverSettings{}.tol_inner);
}

TEST_CASE("unknown kernel type names the field and line") {
  std::string msg = config_error(with(R"("type": "hilbert")", R"("type": "unknown")"));
  CHECK(msg.find("kernel.type") != std::string::npos);
  CHECK(msg.find("cfg.json:3") != std::string::npos);
}

TEST_CASE("rejected configs") {
  CHECK(config_error("{ not json").size() > 0);
  CHECK(config_error(with(R"("name": "t",)", R"("name": "t", "colour": 1,)")).find("colour") != std::string::npos);
  CHECK(config_error(with(R"("uL": 0.5)", R"("uL": -0.9)")).find("initial_data") != std::string::npos);
  CHECK(config_error(with(R"("taper": 4}})", R"("taper": 4}, "v_bar": {"amplitude": 0.1, "alpha": 0.7}})"))
            .find("initial_data.v_bar.alpha") != std::string::npos);
  CHECK(config_error(with(R"("type": "burgers")", R"("type": "quadratic_plus_linear", "a": -1, "b": 0)"))
            .find("flux.a") != std::string::npos);
  std::string bp = with(R"("type": "hilbert")", R"("type": "burgers_poisson")");
  bp.insert(bp.rfind('}'), R"(, "oracle": {"source": "spectral"})");
  CHECK(config_error(bp).find("oracle.source") != std::string::npos);
  std::string cfl = kBase;
  cfl.insert(cfl.rfind('}'), R"(, "oracle": {"cfl": 0.9})");
  CHECK(config_error(cfl).find("oracle.cfl") != std::string::npos);
  std::string late = kBase;
  late.insert(late.rfind('}'), R"(, "solver": {"T": 0.05}, "oracle": {"times": [0.1]})");
  CHECK(config_error(late).find("oracle.times") != std::string::npos);
}

TEST_CASE("custom kernel and oracle section") {
  std::string s = with(R"({"type": "hilbert"})",
                       R"({"type": "custom", "singular": "hilbert", "integrable": "exp_odd",
                           "C": 2.0, "singular_scale": 1.0, "integrable_scale": 0.5})");
  s.insert(s.rfind('}'), R"(, "oracle": {"resolutions": [1024, 2048], "times": [0.05]}, "seed": 9)");
  RunConfig c = parse_config_text(s);
  CHECK_FALSE(c.spec.kernel.is_hilbert());
  CHECK(c.spec.kernel.bound_constant() == 2.0);
  CHECK(c.oracle_enabled);
  CHECK(c.oracle_resolutions == std::vector<int>{1024, 2048});
  CHECK(c.seed == 9u);
}

TEST_CASE("bundled presets parse") {
  for (const char* name : {"zero_kernel_riemann", "zero_kernel_smooth_jump", "burgers_hilbert_standard",
                           "burgers_hilbert_compare", "burgers_hilbert_alpha09"}) {
    RunConfig c = parse_config_file(std::string(SHOCKFIT_PRESET_DIR) + "/" + name + ".json");
    CHECK(c.name == name);
  }
  CHECK_THROWS_AS(parse_config_file("/nonexistent/config.json"), Error);
}
