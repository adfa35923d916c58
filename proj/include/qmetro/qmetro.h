#ifndef QMETRO_QMETRO_H
#define QMETRO_QMETRO_H

/* C interface to the qmetro library: probe/ancilla thermometry in a structured
 * reservoir. All matrices are row-major arrays of qm_complex in the (|e>, |g>)
 * basis, two-qubit operators ordered probe (x) ancilla. Every call that can
 * fail returns a qm_status; qm_last_error() then describes the failure for
 * the calling thread. */

#include <stddef.h>

#if defined(QMETRO_BUILDING_LIBRARY)
#define QM_API __attribute__((visibility("default")))
#else
#define QM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qm_status {
  QM_OK = 0,
  QM_ERR_INVALID_ARGUMENT = 1,
  QM_ERR_INVARIANT = 2,
  QM_ERR_DEGENERATE_NULLSPACE = 3,
  QM_ERR_DEGENERATE_MEASUREMENT = 4,
  QM_ERR_NUMERICAL = 5,
  QM_ERR_CONFIG = 6,
  QM_ERR_IO = 7,
  QM_ERR_INTERNAL = 8
} qm_status;

typedef enum qm_interaction {
  QM_INTERACTION_XX = 0,
  QM_INTERACTION_XX_PLUS_ZX = 1,
  QM_INTERACTION_ZX = 2,
  QM_INTERACTION_XZ = 3
} qm_interaction;

typedef enum qm_target {
  QM_TARGET_TEMPERATURE = 0,
  QM_TARGET_OMEGA_A = 1,
  QM_TARGET_GAMMA = 2
} qm_target;

typedef enum qm_subsystem {
  QM_SUBSYSTEM_PROBE = 0,
  QM_SUBSYSTEM_ANCILLA = 1,
  QM_SUBSYSTEM_FULL = 2
} qm_subsystem;

typedef struct qm_complex {
  double re;
  double im;
} qm_complex;

typedef struct qm_params qm_params;
typedef struct qm_config qm_config;

typedef struct qm_closed_form {
  double delta_p;
  double f_T;
  double f_wA;
  double f_gamma;
  double omega_cap;
  double chi;
  double xi;
  double lambda_cap;
  double a_T;
  double a_wA;
  double a_gamma;
  int scaled; /* chi, xi, lambda_cap carry factors e^{-2x}, e^{-x}, e^{-2x} */
} qm_closed_form;

QM_API const char* qm_version(void);
/* Message of the last failed call on this thread ("" if none). */
QM_API const char* qm_last_error(void);
/* Process exit code for a status: 0, 2 (configuration), 3 (numerical), 4. */
QM_API int qm_exit_code(qm_status status);

/* Parameters start at omega_p = 1, omega_a = 0.99, g = 0.08, gamma = 0.05,
 * temperature = 0.3, interaction XX. Fields: omega_p, omega_a, g, gamma,
 * temperature. */
QM_API qm_status qm_params_create(qm_params** out);
QM_API void qm_params_destroy(qm_params* p);
QM_API qm_status qm_params_set(qm_params* p, const char* field, double value);
QM_API qm_status qm_params_get(const qm_params* p, const char* field, double* value);
QM_API qm_status qm_params_set_interaction(qm_params* p, qm_interaction kind);
QM_API qm_status qm_params_get_interaction(const qm_params* p, qm_interaction* kind);

QM_API qm_status qm_thermal_occupation(double omega_a, double temperature, double* n_th,
                                       int* underflow);
QM_API qm_status qm_decay_rates(const qm_params* p, double* down, double* up);
/* 4x4 system Hamiltonian. */
QM_API qm_status qm_hamiltonian(const qm_params* p, qm_complex out[16]);
/* 16x16 generator acting on column-stacked density matrices. */
QM_API qm_status qm_liouvillian(const qm_params* p, qm_complex out[256]);
/* Reduced probe state of the stationary state. */
QM_API qm_status qm_steady_probe(const qm_params* p, qm_complex out[4]);
/* XX interaction only. */
QM_API qm_status qm_closed_form_eval(const qm_params* p, qm_closed_form* out);

QM_API qm_status qm_qfi_bloch(const qm_complex rho[4], const qm_complex drho[4], double* out);
/* dim is 2 or 4; excluded_weight may be NULL. */
QM_API qm_status qm_qfi_sld(int dim, const qm_complex* rho, const qm_complex* drho,
                            double* out, double* excluded_weight);
/* QFI along `times` from probe |g> (x) ancilla |e>. */
QM_API qm_status qm_qfi_curve(const qm_params* p, qm_target target, qm_subsystem subsystem,
                              const double* times, size_t n, double* out);
/* Trace distance and N(t) of the |+>/|-> probe pair with the ancilla in |e>. */
QM_API qm_status qm_backflow(const qm_params* p, const double* times, size_t n,
                             double* distance, double* n_cumulative);

/* Parses a JSON configuration. experiment may be NULL; overrides are
 * key=value strings. */
QM_API qm_status qm_config_create(const char* json_text, const char* experiment,
                                  const char* const* overrides, size_t n_overrides,
                                  qm_config** out);
QM_API void qm_config_destroy(qm_config* c);
/* Resolved configuration as JSON; release with qm_string_free. */
QM_API qm_status qm_config_echo(const qm_config* c, char** out);
/* Runs the experiment and writes the CSV and its summary. output may be NULL
 * to use the configured path; summary_path, if not NULL, receives the summary
 * file name (release with qm_string_free). */
QM_API qm_status qm_run(const qm_config* c, unsigned threads, const char* output,
                        char** summary_path);
/* threads <= 0 means unset: falls back to QMETRO_THREADS, then 1. */
QM_API qm_status qm_resolve_threads(long threads, unsigned* out);
QM_API void qm_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
