// Copyright 2026 The ncflo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the ncflo core. All functions return an ncflo_status; on
 * failure ncflo_last_error() holds a message for the calling thread. Complex
 * arrays are interleaved (re, im). Matrices are row-major. Labels, blocks and
 * steps are 0-based. A branch outcome is passed as 2n ints a_0, b_0, a_1, ...
 */

#ifndef NCFLO_NCFLO_H
#define NCFLO_NCFLO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NCFLO_API __declspec(dllexport)
#elif defined(__GNUC__)
#define NCFLO_API __attribute__((visibility("default")))
#else
#define NCFLO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ncflo_status {
    NCFLO_OK = 0,
    NCFLO_ERR_INVALID_DIMENSION = 1,
    NCFLO_ERR_INVALID_TOLERANCE = 2,
    NCFLO_ERR_INVALID_CONFIG = 3,
    NCFLO_ERR_DIMENSION_MISMATCH = 4,
    NCFLO_ERR_CAPACITY = 5,
    NCFLO_ERR_NORMALIZATION = 6,
    NCFLO_ERR_PAULI_EXCLUSION = 7,
    NCFLO_ERR_POSTSELECTION_FAILURE = 8,
    NCFLO_ERR_NUMERICAL = 9,
    NCFLO_ERR_DEGENERATE = 10,
    NCFLO_ERR_IO = 11,
    NCFLO_ERR_NULL_ARGUMENT = 12,
    NCFLO_ERR_BUFFER_TOO_SMALL = 13,
    NCFLO_ERR_CHECK_FAILED = 14,
    NCFLO_ERR_INTERNAL = 15
} ncflo_status;

enum { NCFLO_ROUTE_PATHCYCLE = 0, NCFLO_ROUTE_DENSE = 1 };

/* Opaque handles. */
typedef struct ncflo_instance ncflo_instance; /* Haar propagator + its RNG stream */
typedef struct ncflo_sub ncflo_sub;           /* post-selected n x n grid of d x d blocks */

NCFLO_API const char *ncflo_version(void);
NCFLO_API const char *ncflo_status_name(ncflo_status status);
/* Message of the last failed call on this thread; empty after success. */
NCFLO_API const char *ncflo_last_error(void);
NCFLO_API void ncflo_string_free(char *s);

/* Closed forms. */
NCFLO_API ncflo_status ncflo_collision_free_rate_exact(int n, int m, int d, double *out);
NCFLO_API ncflo_status ncflo_collision_free_rate_binomial(int n, int m, int d, double *out);
NCFLO_API ncflo_status ncflo_collision_free_rate_asymptotic(double kappa, int d, double *out);

/* Instances. m = ceil(kappa n^2); the last n blocks are occupied. */
NCFLO_API ncflo_status ncflo_instance_create(int n, int d, double kappa, uint64_t seed, ncflo_instance **out);
NCFLO_API void ncflo_instance_free(ncflo_instance *inst);
NCFLO_API ncflo_status ncflo_instance_dims(const ncflo_instance *inst, int *n, int *d, int *m);
NCFLO_API ncflo_status ncflo_instance_collision_free_count(ncflo_instance *inst, int shots, int *hits);
/* attempts may be NULL. */
NCFLO_API ncflo_status ncflo_instance_post_select(ncflo_instance *inst, int max_attempts, ncflo_sub **out,
                                                  int *attempts);

/* blocks: n*n blocks in row-major block order (t, k), each d*d row-major,
 * interleaved complex: 2 n^2 d^2 doubles. */
NCFLO_API ncflo_status ncflo_sub_create(int n, int d, const double *blocks, ncflo_sub **out);
NCFLO_API void ncflo_sub_free(ncflo_sub *sub);
NCFLO_API ncflo_status ncflo_sub_dims(const ncflo_sub *sub, int *n, int *d);
NCFLO_API ncflo_status ncflo_sub_blocks(const ncflo_sub *sub, double *blocks, size_t capacity);
/* Commuting control: S_{t,k} = a_{t,k} 1_d and Z-only byproducts written to beta (2n ints). */
NCFLO_API ncflo_status ncflo_commuting_control_create(int n, int d, double kappa, uint64_t seed, ncflo_sub **out,
                                                      int *beta);

/* Branch operator T_beta(S): d*d complex, 2 d^2 doubles. */
NCFLO_API ncflo_status ncflo_branch_operator(const ncflo_sub *sub, const int *beta, int route, double *out);
/* All d^(2n) amplitudes <r|T_beta|l>, 2 d^(2n) doubles; normalization may be NULL. */
NCFLO_API ncflo_status ncflo_amplitude_table(const ncflo_sub *sub, int l, int r, double *out, size_t capacity,
                                             double *normalization);
/* chi: n-1 ints; chi_max may be NULL. */
NCFLO_API ncflo_status ncflo_chi_profile(const ncflo_sub *sub, const int *beta, int l, int r, double eps,
                                         int operator_boundary, int *chi, int *chi_max);
NCFLO_API ncflo_status ncflo_nc_score(const ncflo_sub *sub, const int *beta, double *out);

NCFLO_API ncflo_status ncflo_rank_witness(int n, int t, int d, int *rank, int *diagonal, double *max_off_diagonal);
/* w: n*n complex row-major; k and out complex (2 doubles). */
NCFLO_API ncflo_status ncflo_fermionant(int n, const double *w, const double *k, double *out);
/* Largest |Z_d - sgn(pi_0) Ferm_d(W) / d^(n+1)| over random scalar-block instances. */
NCFLO_API ncflo_status ncflo_fermionant_check(int n, int d, int instances, uint64_t seed, double *max_abs_error);

/* Runs an experiment from a JSON config. out_dir overrides the config's "out"
 * when non-NULL; no files are written when both are empty. threads > 0
 * overrides NCFLO_THREADS and the config. summary (may be NULL) receives a
 * JSON string to be released with ncflo_string_free. */
NCFLO_API ncflo_status ncflo_run_experiment(const char *config_json, const char *out_dir, int threads,
                                            char **summary);

/* Cross-oracle and closed-form suite. Returns NCFLO_ERR_CHECK_FAILED if any
 * check fails; report (may be NULL) receives a JSON string. */
NCFLO_API ncflo_status ncflo_selftest(uint64_t seed, char **report);

#ifdef __cplusplus
}
#endif

#endif
