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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kernelcore/kernelcore.hpp"
#include "mathcore/error.hpp"
#include "test_support.hpp"

using namespace ncflo;
using math::Complex;
using math::ComplexMatrix;
using math::Permutation;

namespace {

/// P_pi built from its action |v_1..v_n> -> |v_{pi^-1(1)}..v_{pi^-1(n)}>, slot 0 most significant.
ComplexMatrix perm_operator_oracle(const Permutation &pi, int d) {
    const int n = pi.size();
    long dim = kernel::ipow(d, n);
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    std::vector<int> in(n), out(n);
    for (long col = 0; col < dim; ++col) {
        long rem = col;
        for (int t = n - 1; t >= 0; --t) {
            in[t] = static_cast<int>(rem % d);
            rem /= d;
        }
        for (int i = 0; i < n; ++i) {
            // Slot pi(j) receives v_j.
            out[pi(i)] = in[i];
        }
        long row = 0;
        for (int t = 0; t < n; ++t) {
            row = row * d + out[t];
        }
        p(row, col) = 1.0;
    }
    return p;
}

/// sum_sigma sgn(sigma) (S_{1,sigma(1)} (x) ... (x) S_{n,sigma(n)}) P_{sigma^-1}.
ComplexMatrix kernel_oracle(const math::BlockGrid &s) {
    const int n = s.n();
    const int d = s.d();
    long dim = kernel::ipow(d, n);
    ComplexMatrix k = ComplexMatrix::Zero(dim, dim);
    for (const Permutation &sigma : math::permutations(n)) {
        std::vector<ComplexMatrix> factors;
        for (int t = 0; t < n; ++t) {
            factors.push_back(s(t, sigma(t)));
        }
        k += static_cast<double>(sigma.sign()) * testing::kron_all(factors) * perm_operator_oracle(sigma.inverse(), d);
    }
    return k;
}

}  // namespace

TEST_CASE("basis index convention") {
    std::vector<int> digits{1, 0, 2};
    CHECK(kernel::basis_index(digits, 3) == 11);
    CHECK(kernel::basis_digits(11, 3, 3) == digits);
    for (long i = 0; i < 81; ++i) {
        auto dg = kernel::basis_digits(i, 4, 3);
        CHECK(kernel::basis_index(dg, 3) == i);
    }
}

TEST_CASE("permutation operator convention") {
    math::RngStream rng(21);
    const int n = 4, d = 3;
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<int> images{0, 1, 2, 3};
        for (int i = n - 1; i > 0; --i) {
            std::swap(images[i], images[rng.below(i + 1)]);
        }
        Permutation sigma(images);
        std::vector<int> v(n);
        for (int t = 0; t < n; ++t) {
            v[t] = static_cast<int>(rng.below(d));
        }
        auto w = kernel::apply_permutation_operator(sigma, v);
        for (int i = 0; i < n; ++i) {
            CHECK(w[i] == v[sigma.inverse()(i)]);
        }
        ComplexMatrix p = kernel::permutation_operator(sigma, d);
        CHECK(p(kernel::basis_index(w, d), kernel::basis_index(v, d)) == Complex(1.0, 0.0));
        CHECK((p - perm_operator_oracle(sigma, d)).norm() == 0.0);
    }
    // Golden value: the cyclic shift 0->1->2->0 moves |0,1,2> to |2,0,1>.
    Permutation shift(std::vector<int>{1, 2, 0});
    CHECK(kernel::apply_permutation_operator(shift, std::vector<int>{0, 1, 2}) == std::vector<int>{2, 0, 1});
}

TEST_CASE("kernel equals the kronecker-sum definition") {
    math::RngStream rng(22);
    for (int n = 1; n <= 4; ++n) {
        for (int d : {2, 3}) {
            if (kernel::ipow(d, n) > 81) {
                continue;
            }
            auto s = testing::ginibre_sub(n, d, rng);
            auto k = kernel::build_kernel(s);
            ComplexMatrix ref = kernel_oracle(s.blocks);
            INFO("n=" << n << " d=" << d);
            CHECK((k.matrix - ref).norm() < 1e-11 * std::max(1.0, ref.norm()));
        }
    }
}

TEST_CASE("kernel small cases") {
    math::RngStream rng(23);
    auto s1 = testing::ginibre_sub(1, 3, rng);
    CHECK((kernel::build_kernel(s1).matrix - s1.blocks(0, 0)).norm() < 1e-15);

    for (int n = 1; n <= 8; ++n) {
        flo::PostSelectedSub s{math::BlockGrid(n, 1)};
        ComplexMatrix a = math::ginibre(n, rng);
        for (int t = 0; t < n; ++t) {
            for (int k = 0; k < n; ++k) {
                s.blocks(t, k)(0, 0) = a(t, k);
            }
        }
        Complex det = a.determinant();
        Complex got = kernel::build_kernel(s).matrix(0, 0);
        CHECK(std::abs(got - det) < 1e-12 * std::abs(det));
    }

    auto big = testing::ginibre_sub(4, 3, rng);
    bool capped = false;
    try {
        kernel::build_kernel(big, 64);
    } catch (const Error &e) {
        capped = e.code() == ErrorCode::Capacity;
    }
    CHECK(capped);

    // Slice columns equal kernel columns with the last input digit fixed.
    auto s3 = testing::ginibre_sub(3, 2, rng);
    auto k3 = kernel::build_kernel(s3);
    for (int r = 0; r < 2; ++r) {
        ComplexMatrix slice = kernel::kernel_slice_last_input(s3.blocks, r);
        for (long c = 0; c < 4; ++c) {
            CHECK((slice.col(c) - k3.matrix.col(c * 2 + r)).norm() < 1e-14);
        }
    }
}

TEST_CASE("slater amplitudes") {
    math::RngStream rng(24);
    flo::PropagatorBlocks id(ComplexMatrix::Identity(6, 6), 3, 2);
    std::vector<kernel::Mode> modes{{0, 1}, {2, 0}};
    CHECK(std::abs(kernel::slater_amplitude(id, modes, modes) - 1.0) < 1e-15);

    auto cfg = flo::DiluteConfig::make(3, 2, 0.5);
    auto v = flo::make_instance(cfg, rng);
    std::vector<kernel::Mode> in{{2, 0}, {3, 1}};
    std::vector<kernel::Mode> out{{0, 1}, {4, 0}};
    std::vector<kernel::Mode> swapped{{4, 0}, {0, 1}};
    Complex a = kernel::slater_amplitude(v, in, out);
    CHECK(std::abs(kernel::slater_amplitude(v, in, swapped) + a) < 1e-15);

    std::vector<kernel::Mode> dup{{1, 1}, {1, 1}};
    bool pauli = false;
    try {
        kernel::slater_amplitude(v, in, dup);
    } catch (const Error &e) {
        pauli = e.code() == ErrorCode::PauliExclusion;
    }
    CHECK(pauli);
}

TEST_CASE("kernel matches the fock-space oracle") {
    math::RngStream rng(25);
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n) {
        for (int d : {2, 3}) {
            auto cfg = flo::DiluteConfig::make(n, d, 0.5);
            for (int rep = 0; rep < 50; ++rep) {
                auto v = flo::make_instance(cfg, rng);
                auto ps = flo::post_select(v, cfg, rng);
                auto k = kernel::build_kernel(ps.sub);
                const long dim = kernel::ipow(d, n);
                for (long row = 0; row < dim; ++row) {
                    auto nu = kernel::basis_digits(row, n, d);
                    for (long col = 0; col < dim; ++col) {
                        auto alpha = kernel::basis_digits(col, n, d);
                        std::vector<kernel::Mode> in, out;
                        for (int k2 = 0; k2 < n; ++k2) {
                            in.push_back({cfg.m - n + k2, alpha[k2]});
                        }
                        for (int t = 0; t < n; ++t) {
                            out.push_back({ps.record.selected_blocks[t], nu[t]});
                        }
                        Complex slater = kernel::slater_amplitude(v, in, out);
                        worst = std::max(worst, std::abs(slater - k.matrix(row, col)));
                    }
                }
            }
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("path-cycle decomposition of the illustrated terms") {
    auto id = kernel::path_cycle_decompose(Permutation::identity(3));
    CHECK(id.path_vertices == std::vector<int>{0, 1, 2, 3});
    CHECK(id.path_steps == std::vector<int>{0, 1, 2});
    CHECK(id.cycle_steps.empty());

    std::vector<int> a{2, 1, 3};
    auto fa = kernel::path_cycle_decompose(Permutation::from_one_based(a));
    CHECK(fa.path_vertices == std::vector<int>{0, 2, 3});
    CHECK(fa.path_steps == std::vector<int>{0, 2});
    REQUIRE(fa.cycle_steps.size() == 1);
    CHECK(fa.cycle_steps[0] == std::vector<int>{1});
    CHECK(fa.cycle_vertices[0] == std::vector<int>{1});

    std::vector<int> b{3, 2, 1};
    auto fb = kernel::path_cycle_decompose(Permutation::from_one_based(b));
    CHECK(fb.path_vertices == std::vector<int>{0, 3});
    CHECK(fb.path_steps == std::vector<int>{0});
    REQUIRE(fb.cycle_steps.size() == 1);
    CHECK(fb.cycle_steps[0] == std::vector<int>{1, 2});
    CHECK(fb.cycle_vertices[0] == std::vector<int>{1, 2});
}

TEST_CASE("path-cycle bijectivity") {
    for (int n = 1; n <= 7; ++n) {
        for (const Permutation &sigma : math::permutations(n)) {
            auto pc = kernel::path_cycle_decompose(sigma);
            CHECK(pc.reconstruct() == sigma);
            std::vector<int> used(n, 0);
            for (int s : pc.path_steps) {
                used[s] += 1;
            }
            int cyc_edges = 0;
            for (const auto &c : pc.cycle_steps) {
                cyc_edges += static_cast<int>(c.size());
                for (int s : c) {
                    used[s] += 1;
                }
                for (int v : c) {
                    CHECK(v != 0);
                }
            }
            for (const auto &verts : pc.cycle_vertices) {
                for (int v : verts) {
                    CHECK(v != 0);
                    CHECK(v != n);
                }
            }
            CHECK(static_cast<int>(pc.path_steps.size()) + cyc_edges == n);
            CHECK(std::all_of(used.begin(), used.end(), [](int u) { return u == 1; }));
            CHECK(pc.path_vertices.front() == 0);
            CHECK(pc.path_vertices.back() == n);
        }
    }
}
