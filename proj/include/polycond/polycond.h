/*
   Copyright 2026 The polycond Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

/* C interface to the polycond library. All functions return a pc_status;
 * on failure pc_last_error() describes the problem (thread-local, valid until
 * the next call on the same thread). Strings handed out by the library must be
 * released with pc_string_free. */

#ifndef POLYCOND_POLYCOND_H
#define POLYCOND_POLYCOND_H

#include <stddef.h>
#include <stdint.h>

#if defined(POLYCOND_BUILDING_LIBRARY)
#define PC_API __attribute__((visibility("default")))
#else
#define PC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pc_status {
  PC_OK = 0,
  PC_ERR_SHAPE = 1,
  PC_ERR_ARGUMENT = 2,
  PC_ERR_CONFIG = 3,
  PC_ERR_IO = 4,
  PC_ERR_INVARIANT = 5,
  PC_ERR_ALLOC_CAP = 6,
  PC_ERR_PRECONDITION = 7,
  PC_ERR_CONTRACT = 8,
  PC_ERR_INTERNAL = 9
} pc_status;

/* Opaque polynomial system: random part plus optional deterministic part. */
typedef struct pc_system pc_system;

PC_API const char* pc_version(void);
PC_API const char* pc_last_error(void);
PC_API const char* pc_status_name(pc_status s);
PC_API void pc_string_free(char* s);

/* dist_json: {"kind": "gaussian" | "rademacher" | "uniform_pm" | "table", ...};
 * NULL means gaussian. */
PC_API pc_status pc_system_sample(int n, int d, const char* dist_json, uint64_t master_seed, uint64_t trial,
                                  pc_system** out);
PC_API pc_status pc_system_create_kss(int n, int d, uint64_t master_seed, uint64_t trial, pc_system** out);
/* Row-major tensors of (n - 1) * n^d entries; det may be NULL. */
PC_API pc_status pc_system_from_tensor(int n, int d, const double* rand, const double* det, pc_system** out);
PC_API pc_status pc_system_load(const char* path, pc_system** out);
/* Saves the combined tensor; json_format != 0 selects the pure-JSON variant. */
PC_API pc_status pc_system_save(const pc_system* sys, const char* path, int json_format);
PC_API void pc_system_destroy(pc_system* sys);
PC_API pc_status pc_system_shape(const pc_system* sys, int* n, int* d, int* m);
/* Copies the combined tensor into out[0 .. len). */
PC_API pc_status pc_system_tensor(const pc_system* sys, double* out, size_t len);

/* out_f has m entries. */
PC_API pc_status pc_evaluate(const pc_system* sys, const double* x, double* out_f);
/* dirs holds k direction vectors of length n back to back; out has m entries. */
PC_API pc_status pc_derivative_contract(const pc_system* sys, const double* x, const double* dirs, int k,
                                        double* out);
/* per_form (m entries) may be NULL. */
PC_API pc_status pc_weyl_norm(const pc_system* sys, double* per_form, double* total);

/* Result strings are JSON objects. */
PC_API pc_status pc_cond_at(const pc_system* sys, const double* x, char** result_json);
PC_API pc_status pc_lmin(const pc_system* sys, int restarts, int max_iters, double tol, uint64_t master_seed,
                         uint64_t trial, char** result_json);
/* Writes the squared operator-norm estimate: sup of sum_l t_l(v1, ..., vd)^2 over unit slot vectors. */
PC_API pc_status pc_opnorm(const pc_system* sys, int restarts, int max_sweeps, double tol, uint64_t master_seed,
                           double* value);
PC_API pc_status pc_lcd_estimate(const double* y, size_t len, double alpha, double gamma0, double d_max,
                                 char** result_json);

/* Runs a harness experiment from a JSON config. experiment is one of "tail",
 * "example1", "corollary", "compressible", "opnorm", "lcd", "small_ball",
 * "tensorization", "report-data". threads > 0 overrides the config and never
 * changes results. When the config names an "output", the CSV and JSON sidecar
 * are written there (a directory for "report-data"). */
PC_API pc_status pc_run(const char* experiment, const char* config_json, int threads, char** result_json);

#ifdef __cplusplus
}
#endif

#endif /* POLYCOND_POLYCOND_H */
