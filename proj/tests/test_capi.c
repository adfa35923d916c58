#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "qmetro/qmetro.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  qm_params* p = NULL;
  EXPECT(qm_params_create(&p) == QM_OK);

  double v = 0.0;
  EXPECT(qm_params_get(p, "omega_a", &v) == QM_OK && v == 0.99);
  EXPECT(qm_params_set(p, "g", 0.09) == QM_OK);
  EXPECT(qm_params_get(p, "g", &v) == QM_OK && v == 0.09);
  EXPECT(qm_params_set(p, "colour", 1.0) == QM_ERR_INVALID_ARGUMENT);
  EXPECT(strstr(qm_last_error(), "colour") != NULL);
  EXPECT(qm_params_get(NULL, "g", &v) == QM_ERR_INVALID_ARGUMENT);

  double n = 0.0;
  int underflow = -1;
  EXPECT(qm_thermal_occupation(0.99, 0.3, &n, &underflow) == QM_OK);
  EXPECT(fabs(n - 0.038295631591983342) < 1e-15 && underflow == 0);

  double down = 0.0, up = 0.0;
  EXPECT(qm_decay_rates(p, &down, &up) == QM_OK);
  EXPECT(fabs(down - up - 0.05) < 1e-15);

  qm_complex h[16];
  EXPECT(qm_hamiltonian(p, h) == QM_OK);
  EXPECT(fabs(h[0].re - 0.995) < 1e-15);
  EXPECT(fabs(h[3].re - 0.09) < 1e-15); /* <ee|H|gg> under XX */

  qm_complex l[256];
  EXPECT(qm_liouvillian(p, l) == QM_OK);
  for (int j = 0; j < 16; ++j) {
    double col = 0.0;
    for (int i = 0; i < 4; ++i) col += l[(5 * i) * 16 + j].re;
    EXPECT(fabs(col) < 1e-15);
  }

  qm_complex probe[4];
  EXPECT(qm_steady_probe(p, probe) == QM_OK);
  qm_closed_form cf;
  EXPECT(qm_closed_form_eval(p, &cf) == QM_OK);
  EXPECT(fabs(0.5 * (probe[0].re - probe[3].re) - cf.delta_p) < 1e-10);
  EXPECT(cf.scaled == 0 && cf.f_T > 0.0);

  double times[5] = {0.0, 10.0, 100.0, 1000.0, 5000.0};
  double qfi[5];
  EXPECT(qm_qfi_curve(p, QM_TARGET_TEMPERATURE, QM_SUBSYSTEM_PROBE, times, 5, qfi) == QM_OK);
  EXPECT(qfi[0] == 0.0 && qfi[3] > 0.0);
  double bad_times[2] = {1.0, 0.5};
  EXPECT(qm_qfi_curve(p, QM_TARGET_TEMPERATURE, QM_SUBSYSTEM_PROBE, bad_times, 2, qfi) ==
         QM_ERR_INVALID_ARGUMENT);

  double dist[5], ncum[5];
  EXPECT(qm_backflow(p, times, 5, dist, ncum) == QM_OK);
  EXPECT(fabs(dist[0] - 1.0) < 1e-12 && ncum[0] == 0.0);

  qm_complex rho[4] = {{0.8, 0}, {0, 0}, {0, 0}, {0.2, 0}};
  qm_complex drho[4] = {{0.1, 0}, {0, 0}, {0, 0}, {-0.1, 0}};
  double a = 0.0, b = 0.0, excluded = -1.0;
  EXPECT(qm_qfi_bloch(rho, drho, &a) == QM_OK);
  EXPECT(qm_qfi_sld(2, rho, drho, &b, &excluded) == QM_OK);
  EXPECT(fabs(a - 0.0625) < 1e-12 && fabs(b - 0.0625) < 1e-12 && excluded == 0.0);
  EXPECT(qm_qfi_sld(3, rho, drho, &b, NULL) == QM_ERR_INVALID_ARGUMENT);

  qm_params_set_interaction(p, QM_INTERACTION_ZX);
  qm_interaction kind;
  EXPECT(qm_params_get_interaction(p, &kind) == QM_OK && kind == QM_INTERACTION_ZX);
  EXPECT(qm_steady_probe(p, probe) == QM_ERR_DEGENERATE_NULLSPACE);
  EXPECT(qm_exit_code(QM_ERR_DEGENERATE_NULLSPACE) == 3);
  EXPECT(qm_closed_form_eval(p, &cf) != QM_OK);
  qm_params_destroy(p);

  qm_config* c = NULL;
  const char* ov[] = {"grid.points=20", "grid.horizon=100"};
  EXPECT(qm_config_create("{\"experiment\": \"qfi\"}", "coherence", ov, 2, &c) == QM_OK);
  char* echo = NULL;
  EXPECT(qm_config_echo(c, &echo) == QM_OK);
  EXPECT(echo && strstr(echo, "\"coherence\"") != NULL);
  qm_string_free(echo);

  char* summary = NULL;
  EXPECT(qm_run(c, 1, "capi_coherence.csv", &summary) == QM_OK);
  EXPECT(summary && strcmp(summary, "capi_coherence.summary.json") == 0);
  qm_string_free(summary);
  FILE* f = fopen("capi_coherence.csv", "r");
  EXPECT(f != NULL);
  if (f) {
    char line[64] = {0};
    EXPECT(fgets(line, sizeof line, f) && strcmp(line, "t,coherence\n") == 0);
    fclose(f);
  }
  remove("capi_coherence.csv");
  remove("capi_coherence.summary.json");
  qm_config_destroy(c);

  EXPECT(qm_config_create("{\"experiment\": 3}", NULL, NULL, 0, &c) == QM_ERR_CONFIG);
  EXPECT(qm_exit_code(QM_ERR_CONFIG) == 2);

  unsigned threads = 0;
  EXPECT(qm_resolve_threads(3, &threads) == QM_OK && threads == 3);

  if (failures) fprintf(stderr, "%d C API checks failed\n", failures);
  else printf("C API: all checks passed (%s)\n", qm_version());
  return failures ? 1 : 0;
}
