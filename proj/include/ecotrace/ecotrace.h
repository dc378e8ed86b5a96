/* C interface of the ecotrace library.
 *
 * Objects are opaque handles created by *_new / *_parse functions and
 * released by the matching *_free. Every fallible call returns an
 * ecot_status; on failure ecot_last_error() describes it (per thread, valid
 * until the next call on that thread). Strings returned through char** out
 * parameters are owned by the caller and released with ecot_string_free. */
#ifndef ECOTRACE_H
#define ECOTRACE_H

#include <stddef.h>

#if defined(_WIN32)
#define ECOT_API __declspec(dllexport)
#else
#define ECOT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ecot_status {
  ECOT_OK = 0,
  ECOT_ERR_DOMAIN = 1,
  ECOT_ERR_INVALID_MODEL = 2,
  ECOT_ERR_PARSE = 3,
  ECOT_ERR_UNKNOWN_KEY = 4,
  ECOT_ERR_MISSING_KEY = 5,
  ECOT_ERR_STEP_UNDERFLOW = 6,
  ECOT_ERR_MAX_STEPS = 7,
  ECOT_ERR_AMBIGUOUS_EVENT = 8,
  ECOT_ERR_ESCAPED = 9,
  ECOT_ERR_NEAR_EQUILIBRIUM = 10,
  ECOT_ERR_UNDECIDED = 11,
  ECOT_ERR_UNRESOLVED_ENDPOINTS = 12,
  ECOT_ERR_REFINEMENT_BUDGET = 13,
  ECOT_ERR_NOT_FOUND = 14,
  ECOT_ERR_NOT_FOUND_GUARANTEED = 15,
  ECOT_ERR_DEFECTIVE_SPECTRUM = 16,
  ECOT_ERR_PROJECTION = 17,
  ECOT_ERR_IO = 18,
  ECOT_ERR_INVALID_ARGUMENT = 19,
  ECOT_ERR_INTERNAL = 99
} ecot_status;

typedef struct ecot_config ecot_config;
typedef struct ecot_model ecot_model;
typedef struct ecot_output ecot_output;

ECOT_API const char* ecot_version(void);
ECOT_API const char* ecot_last_error(void);
ECOT_API const char* ecot_status_name(ecot_status status);
ECOT_API void ecot_string_free(char* s);

/* configuration */
ECOT_API ecot_status ecot_config_new(ecot_config** out);
/* Parses without checking that the model is complete; see ecot_config_validate. */
ECOT_API ecot_status ecot_config_parse(const char* text, ecot_config** out);
ECOT_API ecot_status ecot_config_set(ecot_config* cfg, const char* key, const char* value);
ECOT_API ecot_status ecot_config_get(const ecot_config* cfg, const char* key, char** value);
ECOT_API ecot_status ecot_config_validate(const ecot_config* cfg);
ECOT_API ecot_status ecot_config_emit(const ecot_config* cfg, char** text);
ECOT_API ecot_status ecot_config_hash(const ecot_config* cfg, char** hex);
/* One line per key: name, default and description separated by tabs. */
ECOT_API ecot_status ecot_config_describe(char** text);
ECOT_API void ecot_config_free(ecot_config* cfg);

/* model */
ECOT_API ecot_status ecot_model_new(const ecot_config* cfg, ecot_model** out);
ECOT_API ecot_status ecot_model_angles(const ecot_model* m, double* theta_a, double* theta_b,
                                       double* theta_c);
ECOT_API ecot_status ecot_model_potential(const ecot_model* m, double theta, double* V);
/* Regularized vector field at x = (r, v, theta, w). */
ECOT_API ecot_status ecot_model_field(const ecot_model* m, double h, const double x[4],
                                      double dx[4]);
ECOT_API ecot_status ecot_model_energy_residual(const ecot_model* m, double h, const double x[4],
                                                double* residual);
/* Integrates from x0 over [0, s_end] with the config's integrator options.
 * *samples holds 5 * (*count) doubles (s, r, v, theta, w); free with ecot_samples_free. */
ECOT_API ecot_status ecot_model_integrate(const ecot_model* m, const ecot_config* cfg,
                                          const double x0[4], double s_end, size_t* count,
                                          double** samples);
ECOT_API void ecot_samples_free(double* samples);
ECOT_API void ecot_model_free(ecot_model* m);

/* Subcommands. On success *out holds the files to write. find-eco returns
 * ECOT_ERR_NOT_FOUND or ECOT_ERR_NOT_FOUND_GUARANTEED without output when the
 * search fails; verify-eco returns ECOT_ERR_NOT_FOUND with output when the
 * saved orbit no longer verifies. */
ECOT_API ecot_status ecot_run_model_info(const ecot_config* cfg, ecot_output** out);
ECOT_API ecot_status ecot_run_equilibria(const ecot_config* cfg, ecot_output** out);
ECOT_API ecot_status ecot_run_trace_orbit(const ecot_config* cfg, ecot_output** out);
ECOT_API ecot_status ecot_run_trace_1d(const ecot_config* cfg, ecot_output** out);
ECOT_API ecot_status ecot_run_classify(const ecot_config* cfg, ecot_output** out);
ECOT_API ecot_status ecot_run_sweep(const ecot_config* cfg, int jobs, ecot_output** out);
ECOT_API ecot_status ecot_run_arcs(const ecot_config* cfg, ecot_output** out);
ECOT_API ecot_status ecot_run_find_eco(const ecot_config* cfg, ecot_output** out);
ECOT_API ecot_status ecot_run_verify_eco(const ecot_config* cfg, const char* eco_json,
                                         ecot_output** out);
ECOT_API ecot_status ecot_run_export_figure(const ecot_config* cfg, const char* figure,
                                            ecot_output** out);

ECOT_API size_t ecot_output_file_count(const ecot_output* out);
ECOT_API const char* ecot_output_file_name(const ecot_output* out, size_t i);
ECOT_API const char* ecot_output_file_content(const ecot_output* out, size_t i);
ECOT_API size_t ecot_output_note_count(const ecot_output* out);
ECOT_API const char* ecot_output_note(const ecot_output* out, size_t i);
ECOT_API void ecot_output_free(ecot_output* out);

#ifdef __cplusplus
}
#endif

#endif
