#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "shockfit/shockfit.h"

namespace {

void log_line(const char* msg, void*) { std::fprintf(stderr, "%s\n", msg); }

int report_error(sf_status s) {
  std::fprintf(stderr, "error (%s): %s\n", sf_status_name(s), sf_last_error());
  return s == SF_ERR_CONFIG ? 2 : (s == SF_ERR_NO_CERTIFICATE ? 3 : 4);
}

int finish_run(sf_status s, sf_run* run) {
  if (!run) return report_error(s);
  std::fputs(sf_run_summary(run), stdout);
  std::printf("artifacts in %s\n", sf_run_output_directory(run));
  int code = s == SF_OK ? 0 : 3;
  sf_run_destroy(run);
  return code;
}

bool write_text(const std::string& path, const char* text) {
  std::ofstream out(path);
  out << text << "\n";
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shock-fitted solver and verifier for balance laws with singular sources"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress progress messages");

  std::string config;
  auto* run = app.add_subcommand("run", "solve, probe, compare and write artifacts");
  run->add_option("config", config, "JSON config")->required();

  auto* cmp = app.add_subcommand("compare", "solver against the finite-volume oracle only");
  cmp->add_option("config", config, "JSON config")->required();

  std::string selector, json_path;
  auto* ver = app.add_subcommand("verify", "module property suites on built-in fixtures");
  ver->add_option("selector", selector, "kernels, operator, corrector, source, solver, appendix or all")
      ->required();
  ver->add_option("--json", json_path, "write the machine-readable report here");

  std::string quantity;
  auto* prb = app.add_subcommand("probe", "one bound probe on a solved config, JSON to stdout");
  prb->add_option("quantity", quantity,
                  "corrector, source, lipschitz, balance, gamma2, contraction or invariants")
      ->required();
  prb->add_option("config", config, "JSON config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (!quiet) sf_set_logger(log_line, nullptr);

  if (*run) {
    sf_run* r = nullptr;
    sf_status s = sf_run_config(config.c_str(), &r);
    return finish_run(s, r);
  }
  if (*cmp) {
    sf_run* r = nullptr;
    sf_status s = sf_compare(config.c_str(), &r);
    return finish_run(s, r);
  }
  if (*ver) {
    char* js = nullptr;
    char* text = nullptr;
    sf_status s = sf_verify(selector.c_str(), &js, &text);
    if (!text) {
      sf_string_free(js);
      return report_error(s);
    }
    std::fputs(text, stdout);
    if (!json_path.empty() && !write_text(json_path, js)) {
      std::fprintf(stderr, "cannot write %s\n", json_path.c_str());
      s = SF_ERR_INTERNAL;
    } else if (json_path.empty()) {
      std::printf("%s\n", js);
    }
    sf_string_free(js);
    sf_string_free(text);
    return s == SF_OK ? 0 : (s == SF_ERR_NO_CERTIFICATE ? 3 : 4);
  }
  char* js = nullptr;
  sf_status s = sf_probe(quantity.c_str(), config.c_str(), &js);
  if (!js) return report_error(s);
  std::printf("%s\n", js);
  sf_string_free(js);
  return s == SF_OK ? 0 : 3;
}
