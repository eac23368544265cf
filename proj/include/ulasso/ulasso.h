/*
 * Copyright 2026 The ulasso Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the ulasso library. Every function returns a status code;
 * on failure ulasso_last_error() describes the problem for the calling thread.
 * Handles are opaque and must be released with the matching _free function.
 */
#ifndef ULASSO_ULASSO_H
#define ULASSO_ULASSO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ULASSO_BUILDING)
#    define ULASSO_API __declspec(dllexport)
#  else
#    define ULASSO_API __declspec(dllimport)
#  endif
#else
#  define ULASSO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ulasso_status {
    ULASSO_OK = 0,
    ULASSO_ERR_NULL_ARG = 1,
    ULASSO_ERR_DOMAIN = 2,
    ULASSO_ERR_DEGENERATE_TAILS = 3,
    ULASSO_ERR_DEGENERATE_DESIGN = 4,
    ULASSO_ERR_PRECONDITION = 5,
    ULASSO_ERR_ASSUMPTION = 6,
    ULASSO_ERR_PARSE = 7,
    ULASSO_ERR_IO = 8,
    ULASSO_ERR_CONFIG = 9,
    ULASSO_ERR_ABORTED = 10,
    ULASSO_ERR_BUFFER_TOO_SMALL = 11,
    ULASSO_ERR_INTERNAL = 99
} ulasso_status;

typedef struct ulasso_dataset ulasso_dataset;
typedef struct ulasso_fit ulasso_fit;

/* Tuning and solver settings shared by the fitting entry points. */
typedef struct ulasso_options {
    int grid_points;      /* lambda grid size, >= 2 */
    double grid_ratio;    /* smallest / largest lambda, in (0, 1) */
    double tol;           /* max coordinate change at convergence */
    int max_sweeps;
    int standardize;      /* nonzero: fit on unit-variance subset columns */
} ulasso_options;

typedef struct ulasso_fit_info {
    double q;
    double lambda;
    double delta_lo;
    double delta_hi;
    double kkt_residual;
    double objective;
    double intercept;
    int64_t n_q;
    int64_t support_size;
    int n_iterations;
    int converged;
} ulasso_fit_info;

ULASSO_API const char* ulasso_version(void);
ULASSO_API const char* ulasso_status_string(ulasso_status status);
/* Message of the most recent failure on this thread; empty after success. */
ULASSO_API const char* ulasso_last_error(void);

ULASSO_API void ulasso_options_default(ulasso_options* opts);

/* x is n_rows * p, row-major. y may be NULL for unlabeled data. */
ULASSO_API ulasso_status ulasso_dataset_create(int64_t n_rows, int64_t p, const double* x, const double* s,
                                               const double* y, ulasso_dataset** out);
/* y_col may be NULL. log1p_cols lists covariates transformed as log(1 + x). */
ULASSO_API ulasso_status ulasso_dataset_load_csv(const char* path, const char* s_col, const char* y_col,
                                                 const char* const* log1p_cols, size_t n_log1p, int standardize,
                                                 ulasso_dataset** out);
ULASSO_API ulasso_status ulasso_dataset_write_csv(const ulasso_dataset* ds, const char* path);
ULASSO_API ulasso_status ulasso_dataset_dims(const ulasso_dataset* ds, int64_t* n_rows, int64_t* p, int* labeled);
ULASSO_API void ulasso_dataset_free(ulasso_dataset* ds);

/* opts may be NULL for defaults. */
ULASSO_API ulasso_status ulasso_fit_ulasso(const ulasso_dataset* ds, double q, const ulasso_options* opts,
                                           ulasso_fit** out);
ULASSO_API ulasso_status ulasso_fit_get_info(const ulasso_fit* fit, ulasso_fit_info* info);
/* Copies the p coefficients into out; len must be at least p. */
ULASSO_API ulasso_status ulasso_fit_get_beta(const ulasso_fit* fit, double* out, size_t len);
ULASSO_API void ulasso_fit_free(ulasso_fit* fit);

/* Whole workflows returning JSON text; release with ulasso_string_free. */
ULASSO_API ulasso_status ulasso_fit_real_report(const ulasso_dataset* ds, const double* qs, size_t n_q,
                                                const ulasso_options* opts, char** json_out);
/* format is "csv" or "json". Output files do not depend on workers. */
ULASSO_API ulasso_status ulasso_simulate(const char* config_json, const char* out_dir, int workers,
                                         const char* format, char** summary_out);
ULASSO_API ulasso_status ulasso_oracle_report(const char* design_json, double q, char** json_out);
ULASSO_API void ulasso_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* ULASSO_ULASSO_H */
