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

#include "expcli/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "brancheval/brancheval.hpp"
#include "mathcore/error.hpp"
#include "mathcore/weyl.hpp"
#include "mpodiag/mpodiag.hpp"

namespace ncflo::exp {

namespace {

using math::Complex;
using math::ComplexMatrix;

flo::PostSelectedSub monitored_sub(int n, int d, math::RngStream &rng) {
    flo::DiluteConfig cfg = flo::DiluteConfig::make(n, d);
    flo::PropagatorBlocks v = flo::make_instance(cfg, rng);
    return flo::post_select(v, cfg, rng).sub;
}

Complex brute_permanent(const ComplexMatrix &w) {
    const int n = static_cast<int>(w.rows());
    Complex total(0.0, 0.0);
    for (const math::Permutation &p : math::permutations(n)) {
        Complex prod(1.0, 0.0);
        for (int t = 0; t < n; ++t) {
            prod *= w(t, p(t));
        }
        total += prod;
    }
    return total;
}

CheckResult measure(const std::string &name, double tol, const std::function<double()> &body) {
    CheckResult r;
    r.name = name;
    r.tolerance = tol;
    try {
        r.worst = body();
        r.passed = r.worst <= tol;
    } catch (const std::exception &e) {
        r.passed = false;
        r.detail = e.what();
    }
    return r;
}

}  // namespace

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
    math::RngStream rng(seed);
    std::vector<CheckResult> out;

    out.push_back(measure("haar unitarity", 1e-12, [&] { return math::unitarity_defect(math::haar_unitary(16, rng)); }));

    out.push_back(measure("weyl transpose relabel", 1e-12, [&] {
        double worst = 0.0;
        for (int d : {2, 3, 5}) {
            for (int a = 0; a < d; ++a) {
                for (int b = 0; b < d; ++b) {
                    auto rel = math::weyl_transpose_relabel(d, a, b);
                    ComplexMatrix lhs = math::weyl(d, a, b).matrix.transpose();
                    ComplexMatrix rhs = rel.phase * math::weyl(d, rel.a, rel.b).matrix;
                    worst = std::max(worst, (lhs - rhs).norm());
                }
            }
        }
        return worst;
    }));

    out.push_back(measure("teleportation identity", 1e-12, [&] {
        double worst = 0.0;
        for (int d : {2, 3}) {
            for (int i = 0; i < 100; ++i) {
                math::ComplexVector psi = math::ginibre(d, rng).col(0);
                ComplexMatrix xi = math::ginibre(d, rng);
                long a = static_cast<long>(rng.below(d));
                long b = static_cast<long>(rng.below(d));
                auto lhs = math::teleport_update(psi, xi, a, b);
                auto rhs = math::teleport_contract_direct(psi, xi, a, b);
                worst = std::max(worst, (lhs - rhs).norm() / std::max(1.0, rhs.norm()));
            }
        }
        return worst;
    }));

    out.push_back(measure("d=2 encode/decode gadget", 0.0, [&] {
        math::ComplexVector p(2);
        p << Complex(0.6, 0.0), Complex(0.0, 0.8);
        auto rep = math::encode_decode_check_d2(p);
        return (rep.encode_ok && rep.decode_ok && rep.collision_ok) ? 0.0 : 1.0;
    }));

    out.push_back(measure("kernel vs slater minors", 1e-10, [&] {
        double worst = 0.0;
        for (int d : {2, 3}) {
            for (int n = 1; n <= 3; ++n) {
                flo::DiluteConfig cfg = flo::DiluteConfig::make(n, d);
                flo::PropagatorBlocks v = flo::make_instance(cfg, rng);
                flo::PostSelection ps = flo::post_select(v, cfg, rng);
                kernel::KernelMatrix k = kernel::build_kernel(ps.sub);
                const long dim = kernel::ipow(d, n);
                for (long row = 0; row < dim; ++row) {
                    auto nu = kernel::basis_digits(row, n, d);
                    for (long col = 0; col < dim; ++col) {
                        auto alpha = kernel::basis_digits(col, n, d);
                        std::vector<kernel::Mode> in, outm;
                        for (int t = 0; t < n; ++t) {
                            in.push_back({cfg.first_input_block() + t, alpha[t]});
                            outm.push_back({ps.record.selected_blocks[t], nu[t]});
                        }
                        Complex s = kernel::slater_amplitude(v, in, outm);
                        worst = std::max(worst, std::abs(s - k.matrix(row, col)));
                    }
                }
            }
        }
        return worst;
    }));

    out.push_back(measure("two-step closed form", 1e-12, [&] {
        double worst = 0.0;
        for (int d : {2, 3}) {
            for (int i = 0; i < 10; ++i) {
                auto sub = monitored_sub(2, d, rng);
                auto beta = branch::BranchOutcome::uniform(2, d, rng);
                auto s = branch::dress(sub, beta).blocks;
                ComplexMatrix want = (s(1, 1) * s(0, 0) - s(1, 0).trace() * s(0, 1)) / static_cast<double>(d * d);
                worst = std::max(worst, (branch::branch_operator_pathcycle(sub, beta).matrix - want).norm());
            }
        }
        return worst;
    }));

    out.push_back(measure("path-cycle vs dense contraction", 1e-10, [&] {
        double worst = 0.0;
        for (int d : {2, 3}) {
            for (int n = 1; n <= 4; ++n) {
                for (int i = 0; i < 3; ++i) {
                    auto sub = monitored_sub(n, d, rng);
                    auto beta = branch::BranchOutcome::uniform(n, d, rng);
                    ComplexMatrix a = branch::branch_operator_pathcycle(sub, beta).matrix;
                    ComplexMatrix b = branch::branch_operator_dense(sub, beta).matrix;
                    worst = std::max(worst, (a - b).norm());
                }
            }
        }
        return worst;
    }));

    out.push_back(measure("amplitude table completeness", 1e-10, [&] {
        double worst = 0.0;
        for (int d : {2, 3}) {
            auto sub = monitored_sub(3, d, rng);
            double total = 0.0;
            for (int r = 0; r < d; ++r) {
                total += branch::amplitude_table(sub, 0, r).normalization;
            }
            double want = kernel::build_kernel(sub).matrix.squaredNorm() / std::pow(d, 3);
            worst = std::max(worst, std::abs(total - want));
        }
        return worst;
    }));

    out.push_back(measure("rank witness n=4 t=2", 0.0, [&] {
        double worst = 0.0;
        for (int d : {2, 3}) {
            auto w = mpo::rank_witness(4, 2, d);
            worst = std::max(worst, (w.rank == 6 && w.diagonal) ? 0.0 : 1.0);
        }
        return worst;
    }));

    out.push_back(measure("fermionant specializations", 1e-12, [&] {
        double worst = 0.0;
        for (int n = 1; n <= 5; ++n) {
            ComplexMatrix w = math::ginibre(n, rng);
            Complex det = w.determinant();
            worst = std::max(worst, std::abs(branch::fermionant(w, 1.0) - det) / std::max(1.0, std::abs(det)));
            Complex perm = (n % 2 == 0 ? 1.0 : -1.0) * brute_permanent(w);
            worst = std::max(worst, std::abs(branch::fermionant(w, -1.0) - perm) / std::max(1.0, std::abs(perm)));
        }
        return worst;
    }));

    out.push_back(measure("cyclic closure fermionant form", 1e-9, [&] {
        double worst = 0.0;
        for (int d : {2, 3}) {
            for (int n = 1; n <= 5; ++n) {
                ComplexMatrix a = flo::scalar_post_selected(n, 0.5, rng);
                Complex z = branch::cyclic_closure(branch::scalar_blocks(a, d), branch::BranchOutcome::zero(n, d));
                worst = std::max(worst, std::abs(z - branch::cyclic_closure_fermionant_form(a, d)));
            }
        }
        return worst;
    }));

    out.push_back(measure("collision-free rate forms", 1e-10, [&] {
        double worst = 0.0;
        for (int d : {2, 3}) {
            for (int n : {4, 8, 16}) {
                int m = flo::DiluteConfig::make(n, d).m;
                worst = std::max(worst, std::abs(flo::collision_free_rate_exact(n, m, d) -
                                                 flo::collision_free_rate_binomial(n, m, d)));
            }
        }
        return worst;
    }));

    return out;
}

}  // namespace ncflo::exp
