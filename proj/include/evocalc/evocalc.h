/* SPDX-License-Identifier: Apache-2.0 */
/* Copyright 2026 The evocalc authors */

/* Stable C interface to the evocalc core.  All handles are opaque; every call that can fail
 * returns an evo_status and leaves a message retrievable with evo_last_error() on the calling
 * thread.  Strings returned by accessors are owned by the handle and stay valid until it is
 * destroyed. */

#ifndef EVOCALC_H
#define EVOCALC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(EVOCALC_BUILDING_LIBRARY)
#define EVOCALC_API __declspec(dllexport)
#else
#define EVOCALC_API __declspec(dllimport)
#endif
#else
#define EVOCALC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum evo_status {
  EVO_OK = 0,
  EVO_ERR_INVALID_ARGUMENT = 1,
  EVO_ERR_GRID_MISMATCH = 2,
  EVO_ERR_DIM_MISMATCH = 3,
  EVO_ERR_PRECONDITION = 4,
  EVO_ERR_NUMERICAL = 5,
  EVO_ERR_CONFIG = 6,
  EVO_ERR_IO = 7,
  /* The run completed but its verdict (after expect = fail inversion) is negative. */
  EVO_ERR_VERDICT = 8,
  EVO_ERR_INTERNAL = 9
} evo_status;

typedef struct evo_grid evo_grid;
typedef struct evo_signal evo_signal;
typedef struct evo_report evo_report;
typedef struct evo_suite evo_suite;

EVOCALC_API const char* evo_version(void);
EVOCALC_API const char* evo_status_name(evo_status s);
/* Message of the last failed call on this thread, "" if none. */
EVOCALC_API const char* evo_last_error(void);

/* Uniform time grid t_k = t0 + k dt, k < n, with exponential weight nu > 0. */
EVOCALC_API evo_status evo_grid_create(double t0, double dt, int64_t n, double nu, evo_grid** out);
/* Grid covering [t0, t_end]. */
EVOCALC_API evo_status evo_grid_window(double t0, double t_end, double dt, double nu, evo_grid** out);
EVOCALC_API evo_status evo_grid_info(const evo_grid* g, double* t0, double* dt, int64_t* n, double* nu);
EVOCALC_API void evo_grid_destroy(evo_grid* g);

/* Signal of dim components; re and im hold dim * n values, node-major (all components of
 * node 0 first).  im may be NULL for real data. */
EVOCALC_API evo_status evo_signal_create(const evo_grid* g, int64_t dim, const double* re, const double* im,
                                         evo_signal** out);
EVOCALC_API evo_status evo_signal_shape(const evo_signal* s, int64_t* dim, int64_t* n);
/* Copies values out in the same layout; either buffer may be NULL. */
EVOCALC_API evo_status evo_signal_values(const evo_signal* s, double* re, double* im, size_t count);
EVOCALC_API evo_status evo_signal_norm(const evo_signal* s, double* out);
EVOCALC_API evo_status evo_signal_inner(const evo_signal* a, const evo_signal* b, double* re, double* im);
EVOCALC_API evo_status evo_signal_antiderivative(const evo_signal* s, evo_signal** out);
EVOCALC_API evo_status evo_signal_derivative(const evo_signal* s, evo_signal** out);
/* Solution of u' = sin(u) + f by Picard iteration (scalar signals only). */
EVOCALC_API evo_status evo_signal_picard_sin(const evo_signal* f, double tol, evo_signal** out);
EVOCALC_API void evo_signal_destroy(evo_signal* s);

/* Runs one experiment config and writes <out_base>.csv/.json (out_base NULL: the config's
 * output key, then the experiment name).  Returns EVO_ERR_VERDICT with *out set when the
 * run finished with a negative verdict.  Progress goes to stderr when verbose != 0. */
EVOCALC_API evo_status evo_run_config(const char* path, const char* out_base, int verbose, evo_report** out);
/* Same for config text; nothing is written when out_base is NULL. */
EVOCALC_API evo_status evo_run_config_text(const char* text, const char* out_base, int verbose, evo_report** out);

EVOCALC_API const char* evo_report_experiment(const evo_report* r);
/* Raw verdict: 1 pass, 0 fail. */
EVOCALC_API int evo_report_passed(const evo_report* r);
/* Verdict after expect = fail inversion. */
EVOCALC_API int evo_report_ok(const evo_report* r);
EVOCALC_API double evo_report_runtime(const evo_report* r);
EVOCALC_API const char* evo_report_csv(const evo_report* r);
EVOCALC_API const char* evo_report_json(const evo_report* r);
/* Newline separated failing rows and checks. */
EVOCALC_API const char* evo_report_failures(const evo_report* r);
EVOCALC_API const char* evo_report_csv_path(const evo_report* r);
EVOCALC_API const char* evo_report_json_path(const evo_report* r);
EVOCALC_API void evo_report_destroy(evo_report* r);

/* Runs every *.conf in dir in filename order; out_dir NULL means dir/reports.
 * Returns EVO_ERR_VERDICT with *out set when any config is not ok. */
EVOCALC_API evo_status evo_run_suite(const char* dir, const char* out_dir, int verbose, evo_suite** out);
EVOCALC_API int evo_suite_ok(const evo_suite* s);
EVOCALC_API size_t evo_suite_count(const evo_suite* s);
/* Entry i: config file name, ok flag and failure text ("" when ok). */
EVOCALC_API evo_status evo_suite_entry(const evo_suite* s, size_t i, const char** name, int* ok,
                                       const char** failures);
EVOCALC_API const char* evo_suite_json(const evo_suite* s);
EVOCALC_API const char* evo_suite_json_path(const evo_suite* s);
EVOCALC_API void evo_suite_destroy(evo_suite* s);

#ifdef __cplusplus
}
#endif

#endif /* EVOCALC_H */
