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

#include "ncflo/ncflo.h"

#include <cstring>
#include <new>
#include <string>

#include "brancheval/brancheval.hpp"
#include "expcli/expcli.hpp"
#include "expcli/selftest.hpp"
#include "mathcore/error.hpp"
#include "mpodiag/mpodiag.hpp"
#include "statdiag/statdiag.hpp"

struct ncflo_instance {
    ncflo::flo::DiluteConfig cfg;
    ncflo::flo::PropagatorBlocks v;
    ncflo::math::RngStream rng;
};

struct ncflo_sub {
    ncflo::flo::PostSelectedSub sub;
};

namespace {

using ncflo::math::Complex;
using ncflo::math::ComplexMatrix;

thread_local std::string last_error;

ncflo_status from_code(ncflo::ErrorCode code) {
    return static_cast<ncflo_status>(static_cast<int>(code) + 1);
}

struct NullArgument {};
struct BufferTooSmall {};

template <typename F>
ncflo_status guarded(F &&body) {
    try {
        body();
        last_error.clear();
        return NCFLO_OK;
    } catch (const ncflo::Error &e) {
        last_error = e.what();
        return from_code(e.code());
    } catch (const NullArgument &) {
        last_error = "required pointer argument is NULL";
        return NCFLO_ERR_NULL_ARGUMENT;
    } catch (const BufferTooSmall &) {
        last_error = "output buffer is too small";
        return NCFLO_ERR_BUFFER_TOO_SMALL;
    } catch (const std::bad_alloc &) {
        last_error = "out of memory";
        return NCFLO_ERR_CAPACITY;
    } catch (const std::exception &e) {
        last_error = e.what();
        return NCFLO_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown exception";
        return NCFLO_ERR_INTERNAL;
    }
}

template <typename... P>
void need(const P *...ptrs) {
    if (((ptrs == nullptr) || ...)) {
        throw NullArgument{};
    }
}

char *copy_string(const std::string &s) {
    char *out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

ncflo::branch::BranchOutcome read_beta(const ncflo::flo::PostSelectedSub &s, const int *beta) {
    std::vector<std::pair<int, int>> labels(s.n());
    for (int t = 0; t < s.n(); ++t) {
        labels[t] = {beta[2 * t], beta[2 * t + 1]};
    }
    return ncflo::branch::BranchOutcome(s.d(), std::move(labels));
}

void write_matrix(const ComplexMatrix &m, double *out) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out[2 * (r * m.cols() + c)] = m(r, c).real();
            out[2 * (r * m.cols() + c) + 1] = m(r, c).imag();
        }
    }
}

}  // namespace

extern "C" {

const char *ncflo_version(void) {
    return ncflo::exp::kVersion;
}

const char *ncflo_status_name(ncflo_status status) {
    switch (status) {
        case NCFLO_OK:
            return "ok";
        case NCFLO_ERR_NULL_ARGUMENT:
            return "null-argument";
        case NCFLO_ERR_BUFFER_TOO_SMALL:
            return "buffer-too-small";
        case NCFLO_ERR_CHECK_FAILED:
            return "check-failed";
        case NCFLO_ERR_INTERNAL:
            return "internal";
        default:
            break;
    }
    int code = static_cast<int>(status) - 1;
    if (code >= 0 && code <= static_cast<int>(ncflo::ErrorCode::Io)) {
        return ncflo::error_code_name(static_cast<ncflo::ErrorCode>(code));
    }
    return "unknown";
}

const char *ncflo_last_error(void) {
    return last_error.c_str();
}

void ncflo_string_free(char *s) {
    delete[] s;
}

ncflo_status ncflo_collision_free_rate_exact(int n, int m, int d, double *out) {
    return guarded([&] {
        need(out);
        *out = ncflo::flo::collision_free_rate_exact(n, m, d);
    });
}

ncflo_status ncflo_collision_free_rate_binomial(int n, int m, int d, double *out) {
    return guarded([&] {
        need(out);
        *out = ncflo::flo::collision_free_rate_binomial(n, m, d);
    });
}

ncflo_status ncflo_collision_free_rate_asymptotic(double kappa, int d, double *out) {
    return guarded([&] {
        need(out);
        *out = ncflo::flo::collision_free_rate_asymptotic(kappa, d);
    });
}

ncflo_status ncflo_instance_create(int n, int d, double kappa, uint64_t seed, ncflo_instance **out) {
    return guarded([&] {
        need(out);
        *out = nullptr;
        auto cfg = ncflo::flo::DiluteConfig::make(n, d, kappa);
        ncflo::math::RngStream rng(seed);
        auto v = ncflo::flo::make_instance(cfg, rng);
        *out = new ncflo_instance{cfg, std::move(v), rng};
    });
}

void ncflo_instance_free(ncflo_instance *inst) {
    delete inst;
}

ncflo_status ncflo_instance_dims(const ncflo_instance *inst, int *n, int *d, int *m) {
    return guarded([&] {
        need(inst, n, d, m);
        *n = inst->cfg.n;
        *d = inst->cfg.d;
        *m = inst->cfg.m;
    });
}

ncflo_status ncflo_instance_collision_free_count(ncflo_instance *inst, int shots, int *hits) {
    return guarded([&] {
        need(inst, hits);
        *hits = ncflo::flo::count_collision_free(inst->v, inst->cfg, shots, inst->rng);
    });
}

ncflo_status ncflo_instance_post_select(ncflo_instance *inst, int max_attempts, ncflo_sub **out, int *attempts) {
    return guarded([&] {
        need(inst, out);
        *out = nullptr;
        auto ps = ncflo::flo::post_select(inst->v, inst->cfg, inst->rng, max_attempts);
        if (attempts != nullptr) {
            *attempts = ps.attempts;
        }
        *out = new ncflo_sub{std::move(ps.sub)};
    });
}

ncflo_status ncflo_sub_create(int n, int d, const double *blocks, ncflo_sub **out) {
    return guarded([&] {
        need(blocks, out);
        *out = nullptr;
        ncflo::math::BlockGrid grid(n, d);
        const double *p = blocks;
        for (int t = 0; t < n; ++t) {
            for (int k = 0; k < n; ++k) {
                for (int i = 0; i < d; ++i) {
                    for (int j = 0; j < d; ++j, p += 2) {
                        grid(t, k)(i, j) = Complex(p[0], p[1]);
                    }
                }
            }
        }
        *out = new ncflo_sub{{std::move(grid)}};
    });
}

void ncflo_sub_free(ncflo_sub *sub) {
    delete sub;
}

ncflo_status ncflo_sub_dims(const ncflo_sub *sub, int *n, int *d) {
    return guarded([&] {
        need(sub, n, d);
        *n = sub->sub.n();
        *d = sub->sub.d();
    });
}

ncflo_status ncflo_sub_blocks(const ncflo_sub *sub, double *blocks, size_t capacity) {
    return guarded([&] {
        need(sub, blocks);
        const int n = sub->sub.n();
        const int d = sub->sub.d();
        if (capacity < static_cast<size_t>(2) * n * n * d * d) {
            throw BufferTooSmall{};
        }
        double *p = blocks;
        for (int t = 0; t < n; ++t) {
            for (int k = 0; k < n; ++k) {
                write_matrix(sub->sub.blocks(t, k), p);
                p += 2 * d * d;
            }
        }
    });
}

ncflo_status ncflo_commuting_control_create(int n, int d, double kappa, uint64_t seed, ncflo_sub **out, int *beta) {
    return guarded([&] {
        need(out, beta);
        *out = nullptr;
        ncflo::math::RngStream rng(seed);
        auto cc = ncflo::branch::commuting_control_instance(n, d, rng, kappa);
        for (int t = 0; t < n; ++t) {
            beta[2 * t] = cc.beta.a(t);
            beta[2 * t + 1] = cc.beta.b(t);
        }
        *out = new ncflo_sub{std::move(cc.sub)};
    });
}

ncflo_status ncflo_branch_operator(const ncflo_sub *sub, const int *beta, int route, double *out) {
    return guarded([&] {
        need(sub, beta, out);
        auto b = read_beta(sub->sub, beta);
        ComplexMatrix t;
        if (route == NCFLO_ROUTE_PATHCYCLE) {
            t = ncflo::branch::branch_operator_pathcycle(sub->sub, b).matrix;
        } else if (route == NCFLO_ROUTE_DENSE) {
            t = ncflo::branch::branch_operator_dense(sub->sub, b).matrix;
        } else {
            ncflo::fail(ncflo::ErrorCode::InvalidConfig, "route must be NCFLO_ROUTE_PATHCYCLE or NCFLO_ROUTE_DENSE");
        }
        write_matrix(t, out);
    });
}

ncflo_status ncflo_amplitude_table(const ncflo_sub *sub, int l, int r, double *out, size_t capacity,
                                   double *normalization) {
    return guarded([&] {
        need(sub, out);
        long size = ncflo::kernel::ipow(static_cast<long>(sub->sub.d()) * sub->sub.d(), sub->sub.n());
        if (capacity < static_cast<size_t>(2 * size)) {
            throw BufferTooSmall{};
        }
        auto table = ncflo::branch::amplitude_table(sub->sub, l, r);
        for (size_t i = 0; i < table.amplitudes.size(); ++i) {
            out[2 * i] = table.amplitudes[i].real();
            out[2 * i + 1] = table.amplitudes[i].imag();
        }
        if (normalization != nullptr) {
            *normalization = table.normalization;
        }
    });
}

ncflo_status ncflo_chi_profile(const ncflo_sub *sub, const int *beta, int l, int r, double eps,
                               int operator_boundary, int *chi, int *chi_max) {
    return guarded([&] {
        need(sub, beta, chi);
        auto f = ncflo::mpo::routing_tensor(sub->sub, read_beta(sub->sub, beta), l, r, operator_boundary != 0);
        auto p = ncflo::mpo::chi_profile(f, eps);
        for (size_t i = 0; i < p.chi.size(); ++i) {
            chi[i] = p.chi[i];
        }
        if (chi_max != nullptr) {
            *chi_max = p.chi_max;
        }
    });
}

ncflo_status ncflo_nc_score(const ncflo_sub *sub, const int *beta, double *out) {
    return guarded([&] {
        need(sub, beta, out);
        *out = ncflo::stat::nc_score(ncflo::branch::dress(sub->sub, read_beta(sub->sub, beta))).value;
    });
}

ncflo_status ncflo_rank_witness(int n, int t, int d, int *rank, int *diagonal, double *max_off_diagonal) {
    return guarded([&] {
        need(rank);
        auto w = ncflo::mpo::rank_witness(n, t, d);
        *rank = w.rank;
        if (diagonal != nullptr) {
            *diagonal = w.diagonal ? 1 : 0;
        }
        if (max_off_diagonal != nullptr) {
            *max_off_diagonal = w.max_off_diagonal;
        }
    });
}

ncflo_status ncflo_fermionant(int n, const double *w, const double *k, double *out) {
    return guarded([&] {
        need(w, k, out);
        ncflo::require(n >= 1, ncflo::ErrorCode::InvalidDimension, "ncflo_fermionant: n must be >= 1");
        ComplexMatrix m(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                m(i, j) = Complex(w[2 * (i * n + j)], w[2 * (i * n + j) + 1]);
            }
        }
        Complex f = ncflo::branch::fermionant(m, Complex(k[0], k[1]));
        out[0] = f.real();
        out[1] = f.imag();
    });
}

ncflo_status ncflo_fermionant_check(int n, int d, int instances, uint64_t seed, double *max_abs_error) {
    return guarded([&] {
        need(max_abs_error);
        ncflo::require(instances >= 1, ncflo::ErrorCode::InvalidConfig, "ncflo_fermionant_check: instances >= 1");
        double worst = 0.0;
        for (int i = 0; i < instances; ++i) {
            ncflo::math::RngStream rng(ncflo::math::mix_seed(seed, static_cast<uint64_t>(i)));
            ComplexMatrix a = ncflo::flo::scalar_post_selected(n, 0.5, rng);
            Complex z = ncflo::branch::cyclic_closure(ncflo::branch::scalar_blocks(a, d),
                                                      ncflo::branch::BranchOutcome::zero(n, d));
            worst = std::max(worst, std::abs(z - ncflo::branch::cyclic_closure_fermionant_form(a, d)));
        }
        *max_abs_error = worst;
    });
}

ncflo_status ncflo_run_experiment(const char *config_json, const char *out_dir, int threads, char **summary) {
    return guarded([&] {
        need(config_json);
        if (summary != nullptr) {
            *summary = nullptr;
        }
        ncflo::exp::Json j;
        try {
            j = ncflo::exp::Json::parse(config_json);
        } catch (const nlohmann::json::exception &e) {
            ncflo::fail(ncflo::ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
        }
        auto cfg = ncflo::exp::ExperimentConfig::from_json(j);
        if (out_dir != nullptr) {
            cfg.out = out_dir;
        }
        auto bundle = ncflo::exp::run_ensemble(cfg, threads > 0 ? std::optional<int>(threads) : std::nullopt);
        if (!cfg.out.empty()) {
            ncflo::exp::write_bundle(bundle, cfg.out);
        }
        if (summary != nullptr) {
            *summary = copy_string(bundle.summary.dump(2));
        }
    });
}

ncflo_status ncflo_selftest(uint64_t seed, char **report) {
    bool all_passed = true;
    ncflo_status st = guarded([&] {
        if (report != nullptr) {
            *report = nullptr;
        }
        auto checks = ncflo::exp::run_selftest(seed);
        ncflo::exp::Json j = ncflo::exp::Json::array();
        for (const auto &c : checks) {
            all_passed = all_passed && c.passed;
            j.push_back({{"name", c.name},
                         {"passed", c.passed},
                         {"worst", c.worst},
                         {"tolerance", c.tolerance},
                         {"detail", c.detail}});
        }
        if (report != nullptr) {
            *report = copy_string(j.dump(2));
        }
    });
    if (st == NCFLO_OK && !all_passed) {
        last_error = "one or more self-test checks failed";
        return NCFLO_ERR_CHECK_FAILED;
    }
    return st;
}

}  // extern "C"
