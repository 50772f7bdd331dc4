#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <numbers>
#include <string>

#include "shockfit/shockfit.h"

TEST_CASE("c api: kernels") {
  sf_kernel* k = nullptr;
  REQUIRE(sf_kernel_create("hilbert", &k) == SF_OK);
  double v = 0.0;
  CHECK(sf_kernel_eval(k, 1.0, 0, &v) == SF_OK);
  CHECK(v == doctest::Approx(1.0 / std::numbers::pi));
  CHECK(sf_lambda_eval(k, std::exp(1.0), 0, &v) == SF_OK);
  CHECK(v == doctest::Approx(1.0 / std::numbers::pi));
  CHECK(sf_phi_eval(k, 1.0, &v) == SF_OK);
  CHECK(v == doctest::Approx(-1.0 / std::numbers::pi));
  CHECK(sf_phi_xb_eval(k, 0.5, 0.0, 1, &v) == SF_OK);
  CHECK(v == doctest::Approx(-std::log(0.5) / std::numbers::pi));
  CHECK(sf_kernel_bound_constant(k) > 0.0);
  CHECK(sf_kernel_eval(k, 0.0, 0, &v) == SF_ERR_DOMAIN);
  CHECK(std::string(sf_last_error()).size() > 0);
  CHECK(sf_kernel_eval(k, 1.0, 0, nullptr) == SF_ERR_ARGUMENT);
  sf_kernel_destroy(k);

  sf_kernel* bad = nullptr;
  CHECK(sf_kernel_create("unknown", &bad) == SF_ERR_CONFIG);
  CHECK(bad == nullptr);
  CHECK(sf_kernel_create(nullptr, &bad) == SF_ERR_ARGUMENT);
  sf_kernel* c = nullptr;
  REQUIRE(sf_kernel_custom("none", 0.0, "exp_odd", -0.5, 1.0, &c) == SF_OK);
  CHECK(sf_kernel_eval(c, 1.0, 0, &v) == SF_OK);
  // scale multiplies the built-in -(1/2) sign(x) e^{-|x|}
  CHECK(v == doctest::Approx(0.25 * std::exp(-1.0)));
  sf_kernel_destroy(c);
  CHECK(sf_kernel_custom("none", 0.0, "none", 0.0, -1.0, &c) == SF_ERR_CONFIG);
  sf_kernel_destroy(nullptr);
}

TEST_CASE("c api: run from text") {
  const char* cfg = R"({
    "name": "capi",
    "kernel": {"type": "zero"},
    "initial_data": {"riemann": {"uL": 1, "uR": 0}},
    "solver": {"T": 0.1, "macro_steps": 16},
    "output": {"directory": "capi_out", "formats": ["json"]}
  })";
  sf_run* run = nullptr;
  REQUIRE(sf_run_config_text(cfg, &run) == SF_OK);
  CHECK(sf_run_passed(run) == 1);
  auto js = nlohmann::json::parse(sf_run_report_json(run));
  CHECK(js["name"] == "capi");
  CHECK(std::string(sf_run_summary(run)).find("PASS") != std::string::npos);
  CHECK(std::string(sf_run_output_directory(run)) == "capi_out");
  sf_run_destroy(run);

  sf_run* none = nullptr;
  CHECK(sf_run_config_text(R"({"kernel": {"type": "unknown"}})", &none) == SF_ERR_CONFIG);
  CHECK(none == nullptr);
  CHECK(std::string(sf_last_error()).find("kernel.type") != std::string::npos);
  CHECK(sf_run_config("/nonexistent.json", &none) == SF_ERR_CONFIG);
  CHECK(sf_run_passed(nullptr) == 0);
}

TEST_CASE("c api: verify and probe selectors") {
  char* js = nullptr;
  char* text = nullptr;
  CHECK(sf_verify("nonsense", &js, &text) == SF_ERR_CONFIG);
  CHECK(js == nullptr);
  REQUIRE(sf_verify("kernels", &js, &text) == SF_OK);
  CHECK(nlohmann::json::parse(js).is_array());
  CHECK(std::string(text).find("kernels") != std::string::npos);
  sf_string_free(js);
  sf_string_free(text);

  std::string preset = std::string(SHOCKFIT_PRESET_DIR) + "/zero_kernel_riemann.json";
  char* out = nullptr;
  CHECK(sf_probe("nonsense", preset.c_str(), &out) == SF_ERR_CONFIG);
  REQUIRE(sf_probe("invariants", preset.c_str(), &out) == SF_OK);
  CHECK(nlohmann::json::parse(out).is_object());
  sf_string_free(out);
  CHECK(std::string(sf_status_name(SF_ERR_NO_CERTIFICATE)) == "no_certificate");
}
