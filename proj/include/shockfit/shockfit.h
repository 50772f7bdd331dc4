#ifndef SHOCKFIT_H
#define SHOCKFIT_H

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum sf_status {
  SF_OK = 0,
  SF_ERR_CONFIG = 2,
  SF_ERR_NO_CERTIFICATE = 3,
  SF_ERR_INTERNAL = 4,
  SF_ERR_DOMAIN = 5,
  SF_ERR_ARGUMENT = 6
} sf_status;

typedef struct sf_kernel sf_kernel;
typedef struct sf_run sf_run;

const char* sf_status_name(sf_status s);
/* Message of the last failing call on this thread; empty when none. */
const char* sf_last_error(void);
/* Strings handed out through char** parameters are released here. */
void sf_string_free(char* s);

/* type: hilbert, burgers_poisson or zero */
sf_status sf_kernel_create(const char* type, sf_kernel** out);
/* singular: none | hilbert; integrable: none | exp_odd | gauss_odd */
sf_status sf_kernel_custom(const char* singular, double singular_scale, const char* integrable,
                           double integrable_scale, double bound_constant, sf_kernel** out);
void sf_kernel_destroy(sf_kernel* k);
double sf_kernel_bound_constant(const sf_kernel* k);

sf_status sf_kernel_eval(const sf_kernel* k, double x, int order, double* out);
sf_status sf_lambda_eval(const sf_kernel* k, double x, int order, double* out);
sf_status sf_phi_eval(const sf_kernel* k, double x, double* out);
sf_status sf_phi_xb_eval(const sf_kernel* k, double x, double b, int order_x, double* out);

/* Full run from a JSON config file or text: solve, probes, optional oracle, artifacts.
   Returns SF_OK or SF_ERR_NO_CERTIFICATE with a run handle, or an error without one. */
sf_status sf_run_config(const char* path, sf_run** out);
sf_status sf_run_config_text(const char* json, sf_run** out);
/* Solver against the finite-volume oracle only. */
sf_status sf_compare(const char* path, sf_run** out);
void sf_run_destroy(sf_run* r);
int sf_run_passed(const sf_run* r);
/* Owned by the handle. */
const char* sf_run_report_json(const sf_run* r);
const char* sf_run_summary(const sf_run* r);
const char* sf_run_output_directory(const sf_run* r);

/* quantity: corrector, source, lipschitz, balance, gamma2, contraction, invariants */
sf_status sf_probe(const char* quantity, const char* path, char** json_out);
/* selector: kernels, operator, corrector, source, solver, appendix, all */
sf_status sf_verify(const char* selector, char** json_out, char** text_out);

/* Progress messages of run, compare and probe; NULL disables. */
typedef void (*sf_log_fn)(const char* message, void* user);
void sf_set_logger(sf_log_fn fn, void* user);

#ifdef __cplusplus
}
#endif

#endif
