/* SPDX-License-Identifier: Apache-2.0 */
/* Copyright 2026 The evocalc authors */

/* Exercises the C interface from plain C. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "evocalc/evocalc.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expectation failed: %s (last error: %s)\n", __FILE__, __LINE__, #cond, \
              evo_last_error());                                      \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_grid_and_signal(void) {
  evo_grid* g = NULL;
  EXPECT(evo_grid_window(0.0, 1.0, 0.1, 1.0, &g) == EVO_OK);
  int64_t n = 0;
  double dt = 0.0;
  EXPECT(evo_grid_info(g, NULL, &dt, &n, NULL) == EVO_OK);
  EXPECT(n == 11);
  EXPECT(fabs(dt - 0.1) < 1e-15);

  double re[11];
  for (int k = 0; k < 11; ++k) re[k] = 1.0;
  evo_signal* s = NULL;
  EXPECT(evo_signal_create(g, 1, re, NULL, &s) == EVO_OK);
  evo_signal* h = NULL;
  EXPECT(evo_signal_antiderivative(s, &h) == EVO_OK);
  double out[11], im[11];
  EXPECT(evo_signal_values(h, out, im, 11) == EVO_OK);
  /* Rectangle rule of the constant one: dt (k + 1). */
  for (int k = 0; k < 11; ++k) EXPECT(fabs(out[k] - 0.1 * (k + 1)) < 1e-14 && im[k] == 0.0);
  evo_signal* back = NULL;
  EXPECT(evo_signal_derivative(h, &back) == EVO_OK);
  EXPECT(evo_signal_values(back, out, NULL, 11) == EVO_OK);
  for (int k = 0; k < 11; ++k) EXPECT(fabs(out[k] - 1.0) < 1e-12);
  double nrm = 0.0;
  EXPECT(evo_signal_norm(s, &nrm) == EVO_OK && nrm > 0.0);
  EXPECT(evo_signal_values(h, out, NULL, 3) == EVO_ERR_INVALID_ARGUMENT);
  EXPECT(strlen(evo_last_error()) > 0);

  evo_grid* other = NULL;
  EXPECT(evo_grid_window(0.0, 1.0, 0.05, 1.0, &other) == EVO_OK);
  double re2[21] = {0};
  evo_signal* s2 = NULL;
  EXPECT(evo_signal_create(other, 1, re2, NULL, &s2) == EVO_OK);
  double ire = 0.0, iim = 0.0;
  EXPECT(evo_signal_inner(s, s2, &ire, &iim) == EVO_ERR_GRID_MISMATCH);

  evo_signal* u = NULL;
  EXPECT(evo_signal_picard_sin(s, 1e-12, &u) == EVO_OK);
  evo_signal_destroy(u);

  evo_signal_destroy(s2);
  evo_grid_destroy(other);
  evo_signal_destroy(back);
  evo_signal_destroy(h);
  evo_signal_destroy(s);
  evo_grid_destroy(g);
}

static void test_errors(void) {
  evo_grid* g = NULL;
  EXPECT(evo_grid_create(0.0, -1.0, 10, 1.0, &g) == EVO_ERR_INVALID_ARGUMENT);
  EXPECT(g == NULL);
  EXPECT(evo_grid_create(0.0, 0.1, 10, 1.0, NULL) == EVO_ERR_INVALID_ARGUMENT);
  EXPECT(strcmp(evo_status_name(EVO_ERR_CONFIG), "config error") == 0);
  EXPECT(strlen(evo_version()) > 0);
}

static void test_runs(void) {
  evo_report* r = NULL;
  EXPECT(evo_run_config_text("experiment = transfer\nt_end = 10\nscales = 100, 200\ntol.final = 0.01\n", NULL, 0, &r) ==
         EVO_OK);
  EXPECT(r != NULL);
  EXPECT(evo_report_passed(r) == 1 && evo_report_ok(r) == 1);
  EXPECT(strncmp(evo_report_csv(r), "scale,", 6) == 0);
  EXPECT(strstr(evo_report_json(r), "\"experiment\": \"transfer\"") != NULL);
  evo_report_destroy(r);

  /* A passing run marked as an expected failure is a negative verdict. */
  r = NULL;
  EXPECT(evo_run_config_text("experiment = transfer\nt_end = 10\nscales = 100, 200\ntol.final = 0.01\nexpect = fail\n",
                             NULL, 0, &r) == EVO_ERR_VERDICT);
  EXPECT(r != NULL && evo_report_ok(r) == 0 && evo_report_passed(r) == 1);
  evo_report_destroy(r);

  r = NULL;
  EXPECT(evo_run_config_text("experiment = transfer\nscales =\n", NULL, 0, &r) == EVO_ERR_CONFIG);
  EXPECT(r == NULL);
  EXPECT(evo_run_config("/nonexistent/x.conf", NULL, 0, &r) == EVO_ERR_IO);
}

int main(void) {
  test_grid_and_signal();
  test_errors();
  test_runs();
  if (failures) {
    fprintf(stderr, "%d expectation(s) failed\n", failures);
    return EXIT_FAILURE;
  }
  printf("c api: all expectations met\n");
  return EXIT_SUCCESS;
}
