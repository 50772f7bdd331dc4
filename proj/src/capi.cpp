#include "shockfit/shockfit.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "shockfit/config.hpp"
#include "shockfit/errors.hpp"
#include "shockfit/kernels.hpp"
#include "shockfit/run.hpp"
#include "shockfit/verify.hpp"

using namespace shockfit;

struct sf_kernel {
  Kernel k;
};

struct sf_run {
  RunReport report;
  std::string json;
  std::string summary;
  std::string directory;
};

namespace {

thread_local std::string g_error;
sf_log_fn g_log = nullptr;
void* g_log_user = nullptr;

Logger logger() {
  if (!g_log) return nullptr;
  sf_log_fn fn = g_log;
  void* user = g_log_user;
  return [fn, user](const std::string& m) { fn(m.c_str(), user); };
}

sf_status status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::config: return SF_ERR_CONFIG;
    case ErrorCode::no_certificate: return SF_ERR_NO_CERTIFICATE;
    case ErrorCode::domain: return SF_ERR_DOMAIN;
    default: return SF_ERR_INTERNAL;
  }
}

template <class F>
sf_status guard(F&& body) {
  g_error.clear();
  try {
    return body();
  } catch (const Error& e) {
    g_error = std::string(error_name(e.code())) + ": " + e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_error = std::string("internal: ") + e.what();
    return SF_ERR_INTERNAL;
  } catch (...) {
    g_error = "internal: unknown failure";
    return SF_ERR_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

sf_status missing(const char* what) {
  g_error = std::string("argument: ") + what + " is null";
  return SF_ERR_ARGUMENT;
}

sf_status finish_run(const RunConfig& cfg, int code, sf_run* r, sf_run** out) {
  r->json = report_json(r->report);
  r->summary = report_summary(r->report);
  r->directory = cfg.output.directory;
  *out = r;
  if (code != 0) g_error = "no_certificate: some checks failed, see the report";
  return code == 0 ? SF_OK : SF_ERR_NO_CERTIFICATE;
}

template <class Run>
sf_status run_with(const RunConfig& cfg, sf_run** out, Run&& runner) {
  auto* r = new sf_run;
  try {
    int code = runner(cfg, r->report);
    return finish_run(cfg, code, r, out);
  } catch (...) {
    delete r;
    throw;
  }
}

}  // namespace

extern "C" {

const char* sf_status_name(sf_status s) {
  switch (s) {
    case SF_OK: return "ok";
    case SF_ERR_CONFIG: return "config";
    case SF_ERR_NO_CERTIFICATE: return "no_certificate";
    case SF_ERR_INTERNAL: return "internal";
    case SF_ERR_DOMAIN: return "domain";
    case SF_ERR_ARGUMENT: return "argument";
  }
  return "unknown";
}

const char* sf_last_error(void) { return g_error.c_str(); }

void sf_string_free(char* s) { std::free(s); }

void sf_set_logger(sf_log_fn fn, void* user) {
  g_log = fn;
  g_log_user = user;
}

sf_status sf_kernel_create(const char* type, sf_kernel** out) {
  if (!type) return missing("type");
  if (!out) return missing("out");
  return guard([&] {
    std::string t = type;
    if (t == "hilbert") *out = new sf_kernel{Kernel::hilbert()};
    else if (t == "burgers_poisson") *out = new sf_kernel{Kernel::burgers_poisson()};
    else if (t == "zero") *out = new sf_kernel{Kernel::zero()};
    else throw Error(ErrorCode::config, "unknown kernel type '" + t + "'");
    return SF_OK;
  });
}

sf_status sf_kernel_custom(const char* singular, double singular_scale, const char* integrable,
                           double integrable_scale, double bound_constant, sf_kernel** out) {
  if (!singular) return missing("singular");
  if (!integrable) return missing("integrable");
  if (!out) return missing("out");
  return guard([&] {
    if (!(bound_constant > 0)) throw Error(ErrorCode::config, "bound constant must be positive");
    *out = new sf_kernel{Kernel(singular_part_from_name(singular), singular_scale,
                                integrable_part_from_name(integrable), integrable_scale,
                                bound_constant, "custom")};
    return SF_OK;
  });
}

void sf_kernel_destroy(sf_kernel* k) { delete k; }

double sf_kernel_bound_constant(const sf_kernel* k) { return k ? k->k.bound_constant() : 0.0; }

sf_status sf_kernel_eval(const sf_kernel* k, double x, int order, double* out) {
  if (!k) return missing("kernel");
  if (!out) return missing("out");
  return guard([&] {
    *out = kernel_eval(k->k, x, order);
    return SF_OK;
  });
}

sf_status sf_lambda_eval(const sf_kernel* k, double x, int order, double* out) {
  if (!k) return missing("kernel");
  if (!out) return missing("out");
  return guard([&] {
    *out = lambda_eval(k->k, x, order);
    return SF_OK;
  });
}

sf_status sf_phi_eval(const sf_kernel* k, double x, double* out) {
  if (!k) return missing("kernel");
  if (!out) return missing("out");
  return guard([&] {
    *out = phi_eval(k->k, x);
    return SF_OK;
  });
}

sf_status sf_phi_xb_eval(const sf_kernel* k, double x, double b, int order_x, double* out) {
  if (!k) return missing("kernel");
  if (!out) return missing("out");
  return guard([&] {
    *out = phi_xb_eval(k->k, Cutoff{}, x, b, order_x);
    return SF_OK;
  });
}

sf_status sf_run_config(const char* path, sf_run** out) {
  if (!path) return missing("path");
  if (!out) return missing("out");
  *out = nullptr;
  return guard([&] {
    RunConfig cfg = parse_config_file(path);
    return run_with(cfg, out, [](const RunConfig& c, RunReport& r) { return run_config(c, r, logger()); });
  });
}

sf_status sf_run_config_text(const char* json, sf_run** out) {
  if (!json) return missing("json");
  if (!out) return missing("out");
  *out = nullptr;
  return guard([&] {
    RunConfig cfg = parse_config_text(json);
    return run_with(cfg, out, [](const RunConfig& c, RunReport& r) { return run_config(c, r, logger()); });
  });
}

sf_status sf_compare(const char* path, sf_run** out) {
  if (!path) return missing("path");
  if (!out) return missing("out");
  *out = nullptr;
  return guard([&] {
    RunConfig cfg = parse_config_file(path);
    cfg.oracle_enabled = true;
    return run_with(cfg, out, [](const RunConfig& c, RunReport& r) { return compare_config(c, r, logger()); });
  });
}

void sf_run_destroy(sf_run* r) { delete r; }

int sf_run_passed(const sf_run* r) { return r && r->report.all_passed() ? 1 : 0; }

const char* sf_run_report_json(const sf_run* r) { return r ? r->json.c_str() : ""; }

const char* sf_run_summary(const sf_run* r) { return r ? r->summary.c_str() : ""; }

const char* sf_run_output_directory(const sf_run* r) { return r ? r->directory.c_str() : ""; }

sf_status sf_probe(const char* quantity, const char* path, char** json_out) {
  if (!quantity) return missing("quantity");
  if (!path) return missing("path");
  if (!json_out) return missing("json_out");
  *json_out = nullptr;
  return guard([&] {
    RunConfig cfg = parse_config_file(path);
    std::string js;
    int code = probe_config(quantity, cfg, js, logger());
    *json_out = dup(js);
    if (code != 0) g_error = "no_certificate: probe failed, see the report";
    return code == 0 ? SF_OK : SF_ERR_NO_CERTIFICATE;
  });
}

sf_status sf_verify(const char* selector, char** json_out, char** text_out) {
  if (!selector) return missing("selector");
  if (json_out) *json_out = nullptr;
  if (text_out) *text_out = nullptr;
  return guard([&] {
    std::vector<SuiteResult> res = verify_suite(selector);
    if (json_out) *json_out = dup(suites_json(res));
    if (text_out) *text_out = dup(suites_text(res));
    bool ok = true;
    for (const auto& r : res) ok = ok && r.passed();
    if (!ok) g_error = "verification failed";
    return ok ? SF_OK : SF_ERR_NO_CERTIFICATE;
  });
}

}  // extern "C"
