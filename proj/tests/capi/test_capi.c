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

/* C API test: links only the shared library. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "ncflo/ncflo.h"

static int failures = 0;

#define EXPECT(cond)                                                          \
    do {                                                                      \
        if (!(cond)) {                                                        \
            fprintf(stderr, "%s:%d: expected %s (%s)\n", __FILE__, __LINE__, \
                    #cond, ncflo_last_error());                               \
            ++failures;                                                       \
        }                                                                     \
    } while (0)

#define EXPECT_OK(call) EXPECT((call) == NCFLO_OK)

static double max_diff(const double *a, const double *b, size_t len) {
    double worst = 0.0;
    for (size_t i = 0; i < len; ++i) {
        double v = fabs(a[i] - b[i]);
        worst = v > worst ? v : worst;
    }
    return worst;
}

static void test_basics(void) {
    EXPECT(strcmp(ncflo_version(), "0.1.0") == 0);
    EXPECT(strcmp(ncflo_status_name(NCFLO_OK), "ok") == 0);
    EXPECT(strcmp(ncflo_status_name(NCFLO_ERR_CAPACITY), ncflo_status_name(NCFLO_ERR_IO)) != 0);

    double p = 0.0;
    EXPECT_OK(ncflo_collision_free_rate_exact(2, 4, 2, &p));
    EXPECT(fabs(p - 24.0 / 28.0) < 1e-14);
    double q = 0.0;
    EXPECT_OK(ncflo_collision_free_rate_binomial(10, 50, 2, &q));
    EXPECT_OK(ncflo_collision_free_rate_exact(10, 50, 2, &p));
    EXPECT(fabs(p - q) < 1e-12);
    EXPECT_OK(ncflo_collision_free_rate_asymptotic(0.5, 2, &p));
    EXPECT(fabs(p - exp(-0.5)) < 1e-15);

    EXPECT(ncflo_collision_free_rate_exact(5, 4, 2, &p) == NCFLO_ERR_INVALID_CONFIG);
    EXPECT(strlen(ncflo_last_error()) > 0);
    EXPECT_OK(ncflo_collision_free_rate_exact(1, 4, 2, &p));
    EXPECT(strlen(ncflo_last_error()) == 0);
    EXPECT(ncflo_collision_free_rate_exact(1, 4, 2, NULL) == NCFLO_ERR_NULL_ARGUMENT);
}

static void test_pipeline(void) {
    ncflo_instance *inst = NULL;
    EXPECT_OK(ncflo_instance_create(3, 2, 0.5, 99, &inst));
    int n = 0, d = 0, m = 0;
    EXPECT_OK(ncflo_instance_dims(inst, &n, &d, &m));
    EXPECT(n == 3 && d == 2 && m == 5);
    int hits = -1;
    EXPECT_OK(ncflo_instance_collision_free_count(inst, 500, &hits));
    EXPECT(hits > 0 && hits <= 500);

    ncflo_sub *sub = NULL;
    int attempts = 0;
    EXPECT_OK(ncflo_instance_post_select(inst, 200, &sub, &attempts));
    EXPECT(attempts >= 1);
    EXPECT_OK(ncflo_sub_dims(sub, &n, &d));
    EXPECT(n == 3 && d == 2);

    int beta[6] = {1, 0, 0, 1, 1, 1};
    double a[8], b[8];
    EXPECT_OK(ncflo_branch_operator(sub, beta, NCFLO_ROUTE_PATHCYCLE, a));
    EXPECT_OK(ncflo_branch_operator(sub, beta, NCFLO_ROUTE_DENSE, b));
    EXPECT(max_diff(a, b, 8) < 1e-10);
    EXPECT(ncflo_branch_operator(sub, beta, 7, a) == NCFLO_ERR_INVALID_CONFIG);

    /* Table entry at beta equals <0|T|0>. */
    double *table = malloc(sizeof(double) * 2 * 64);
    double norm = 0.0;
    EXPECT(ncflo_amplitude_table(sub, 0, 0, table, 10, &norm) == NCFLO_ERR_BUFFER_TOO_SMALL);
    EXPECT_OK(ncflo_amplitude_table(sub, 0, 0, table, 128, &norm));
    long idx = ((1 * 2 + 0) * 4 + (0 * 2 + 1)) * 4 + (1 * 2 + 1);
    EXPECT(fabs(table[2 * idx] - a[0]) < 1e-10 && fabs(table[2 * idx + 1] - a[1]) < 1e-10);
    EXPECT(norm > 0.0);
    free(table);

    int chi[2] = {0, 0}, chi_max = 0;
    EXPECT_OK(ncflo_chi_profile(sub, beta, 0, 0, 1e-3, 0, chi, &chi_max));
    EXPECT(chi[0] == 3 && chi[1] == 3 && chi_max == 3);
    double nu = -1.0;
    EXPECT_OK(ncflo_nc_score(sub, beta, &nu));
    EXPECT(nu > 0.0 && nu <= 2.0);

    double blocks[2 * 9 * 4];
    EXPECT(ncflo_sub_blocks(sub, blocks, 4) == NCFLO_ERR_BUFFER_TOO_SMALL);
    EXPECT_OK(ncflo_sub_blocks(sub, blocks, 72));
    ncflo_sub *copy = NULL;
    EXPECT_OK(ncflo_sub_create(3, 2, blocks, &copy));
    EXPECT_OK(ncflo_branch_operator(copy, beta, NCFLO_ROUTE_PATHCYCLE, b));
    EXPECT(max_diff(a, b, 8) == 0.0);

    ncflo_sub_free(copy);
    ncflo_sub_free(sub);
    ncflo_instance_free(inst);
    ncflo_sub_free(NULL);
    ncflo_instance_free(NULL);
}

static void test_small_closed_forms(void) {
    /* n = 1, S = I: T = I / d. */
    double ident[8] = {1, 0, 0, 0, 0, 0, 1, 0};
    ncflo_sub *sub = NULL;
    EXPECT_OK(ncflo_sub_create(1, 2, ident, &sub));
    int beta[2] = {0, 0};
    double t[8];
    EXPECT_OK(ncflo_branch_operator(sub, beta, NCFLO_ROUTE_DENSE, t));
    double want[8] = {0.5, 0, 0, 0, 0, 0, 0.5, 0};
    EXPECT(max_diff(t, want, 8) < 1e-15);
    ncflo_sub_free(sub);

    ncflo_sub *ctl = NULL;
    int cb[8];
    EXPECT_OK(ncflo_commuting_control_create(4, 2, 0.5, 5, &ctl, cb));
    double nu = -1.0;
    EXPECT_OK(ncflo_nc_score(ctl, cb, &nu));
    EXPECT(nu == 0.0);
    for (int i = 0; i < 4; ++i) {
        EXPECT(cb[2 * i] == 0);
    }
    ncflo_sub_free(ctl);

    int rank = 0, diagonal = 0;
    double off = 1.0;
    EXPECT_OK(ncflo_rank_witness(4, 2, 2, &rank, &diagonal, &off));
    EXPECT(rank == 6 && diagonal == 1 && off < 1e-12);
    EXPECT(ncflo_rank_witness(12, 6, 2, &rank, &diagonal, &off) == NCFLO_ERR_CAPACITY);

    /* Ferm_1 of [[1, 2], [3, 4]] is det = -2; Ferm_k adds k per cycle. */
    double w[8] = {1, 0, 2, 0, 3, 0, 4, 0};
    double k1[2] = {1, 0}, k3[2] = {3, 0}, out[2];
    EXPECT_OK(ncflo_fermionant(2, w, k1, out));
    EXPECT(fabs(out[0] + 2.0) < 1e-14 && fabs(out[1]) < 1e-14);
    EXPECT_OK(ncflo_fermionant(2, w, k3, out));
    EXPECT(fabs(out[0] - (9.0 * 4.0 - 3.0 * 6.0)) < 1e-13);
    double err = 1.0;
    EXPECT_OK(ncflo_fermionant_check(5, 3, 5, 11, &err));
    EXPECT(err < 1e-9);
}

static void test_experiment(void) {
    char *summary = NULL;
    const char *cfg = "{\"mode\": \"all\", \"n\": [3], \"d\": [2], \"instances\": 3, \"shots\": 100, \"seed\": 2}";
    EXPECT_OK(ncflo_run_experiment(cfg, NULL, 1, &summary));
    EXPECT(summary != NULL && strstr(summary, "points") != NULL);
    ncflo_string_free(summary);
    EXPECT(ncflo_run_experiment("{\"nope\": 1}", NULL, 1, NULL) == NCFLO_ERR_INVALID_CONFIG);
    EXPECT(ncflo_run_experiment("not json", NULL, 1, NULL) == NCFLO_ERR_INVALID_CONFIG);

    char *report = NULL;
    EXPECT_OK(ncflo_selftest(12345, &report));
    EXPECT(report != NULL && strlen(report) > 2);
    ncflo_string_free(report);
}

int main(void) {
    test_basics();
    test_pipeline();
    test_small_closed_forms();
    test_experiment();
    if (failures) {
        fprintf(stderr, "%d C API check(s) failed\n", failures);
        return 1;
    }
    printf("C API checks passed\n");
    return 0;
}
