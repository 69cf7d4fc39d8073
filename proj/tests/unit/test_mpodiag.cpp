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

#include <Eigen/SVD>

#include "mathcore/error.hpp"
#include "mpodiag/mpodiag.hpp"
#include "test_support.hpp"

using namespace ncflo;
using branch::BranchOutcome;
using math::Complex;
using math::ComplexMatrix;
using math::Permutation;

namespace {

/// Matricization written from scratch: left (k_1..k_t) base n, right (k_{t+1}..k_n).
ComplexMatrix matricize(const mpo::RoutingTensor &f, int t) {
    const int n = f.n;
    long rows = kernel::ipow(n, t), cols = kernel::ipow(n, n - t);
    ComplexMatrix m = ComplexMatrix::Zero(rows, cols);
    for (size_t i = 0; i < f.support.size(); ++i) {
        const auto &img = f.support[i].images();
        long left = 0, right = 0;
        for (int s = 0; s < t; ++s) {
            left = left * n + img[s];
        }
        for (int s = t; s < n; ++s) {
            right = right * n + img[s];
        }
        m(left, right) = f.values[i];
    }
    return m;
}

int oracle_rank(const ComplexMatrix &m, double eps) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto &sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) {
        return 1;
    }
    int r = 0;
    double floor = eps == 0.0 ? 1e-12 * sv(0) : eps * sv(0);
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        r += sv(i) > floor ? 1 : 0;
    }
    return std::max(r, 1);
}

}  // namespace

TEST_CASE("two-site routing tensor") {
    math::RngStream rng(51);
    for (int d : {2, 3}) {
        auto s = testing::monitored_sub(2, d, rng);
        auto beta = BranchOutcome::uniform(2, d, rng);
        int l = static_cast<int>(rng.below(d)), r = static_cast<int>(rng.below(d));
        auto f = mpo::routing_tensor(s, beta, l, r);
        const auto &b = branch::dress(s, beta).blocks;
        REQUIRE(f.support.size() == 2u);
        CHECK(f.support[0] == Permutation::identity(2));
        Complex first = (b(1, 1) * b(0, 0))(r, l) / double(d * d);
        Complex second = -b(1, 0).trace() * b(0, 1)(r, l) / double(d * d);
        CHECK(std::abs(f.values[0] - first) < 1e-14);
        CHECK(std::abs(f.values[1] - second) < 1e-14);
        auto chi = mpo::chi_profile(f);
        REQUIRE(chi.chi.size() == 1u);
        CHECK(chi.chi[0] == 2);
        CHECK(chi.chi_max == 2);
        CHECK(mpo::theorem_bound_check(chi, d).all_within);
    }
}

TEST_CASE("entry sums and support") {
    math::RngStream rng(52);
    for (int n = 2; n <= 6; ++n) {
        auto s = testing::monitored_sub(n, 2, rng);
        auto beta = BranchOutcome::uniform(n, 2, rng);
        auto f = mpo::routing_tensor(s, beta);
        CHECK(static_cast<std::uint64_t>(f.support.size()) == math::factorial(n));
        Complex amp = branch::branch_operator_dense(s, beta).matrix(0, 0);
        CHECK(std::abs(f.sum() - amp) < 1e-10);
        auto op = mpo::routing_tensor(s, beta, 0, 0, true);
        CHECK((op.operator_sum() - branch::branch_operator_pathcycle(s, beta).matrix).cwiseAbs().maxCoeff() < 1e-10);
    }
    auto too_big = testing::ginibre_sub(9, 2, rng);
    bool capped = false;
    try {
        mpo::routing_tensor(too_big, BranchOutcome::zero(9, 2));
    } catch (const Error &e) {
        capped = e.code() == ErrorCode::Capacity;
    }
    CHECK(capped);
}

TEST_CASE("three-site cut ranks") {
    math::RngStream rng(53);
    for (int rep = 0; rep < 10; ++rep) {
        auto s = testing::monitored_sub(3, 2, rng);
        auto f = mpo::routing_tensor(s, BranchOutcome::uniform(3, 2, rng));
        ComplexMatrix m1 = matricize(f, 1);
        CHECK(m1.rows() == 3);
        CHECK(m1.cols() == 9);
        CHECK(oracle_rank(m1, 1e-3) == 3);
        auto chi = mpo::chi_profile(f);
        CHECK(chi.chi[0] == 3);
        CHECK(chi.chi[1] == 3);
        CHECK(chi.chi_max == 3);
    }
}

TEST_CASE("blockwise ranks equal dense ranks") {
    math::RngStream rng(54);
    for (int n = 2; n <= 6; ++n) {
        for (bool opb : {false, true}) {
            auto s = testing::monitored_sub(n, 2, rng);
            auto f = mpo::routing_tensor(s, BranchOutcome::uniform(n, 2, rng), 0, 0, opb);
            for (double eps : {1e-1, 1e-3, 0.0}) {
                auto fast = mpo::chi_profile(f, eps);
                auto dense = mpo::chi_profile_dense(f, eps);
                CHECK(fast.chi == dense.chi);
                if (!opb) {
                    for (int t = 1; t < n; ++t) {
                        INFO("n=" << n << " t=" << t << " eps=" << eps);
                        CHECK(fast.chi[t - 1] == oracle_rank(matricize(f, t), eps));
                    }
                }
            }
        }
    }
}

TEST_CASE("thresholding is monotone and bounded") {
    math::RngStream rng(55);
    const std::vector<double> eps_list{1e-1, 1e-2, 1e-3, 1e-6, 0.0};
    for (int rep = 0; rep < 20; ++rep) {
        int n = 3 + rep % 3;
        auto s = testing::monitored_sub(n, 2, rng);
        auto f = mpo::routing_tensor(s, BranchOutcome::uniform(n, 2, rng), 0, 0);
        std::vector<int> prev(n - 1, 0);
        for (double eps : eps_list) {
            auto chi = mpo::chi_profile(f, eps);
            for (int t = 1; t < n; ++t) {
                CHECK(chi.chi[t - 1] >= prev[t - 1]);
                CHECK(chi.chi[t - 1] >= 1);
                CHECK(chi.chi[t - 1] <= std::min(kernel::ipow(n, t), kernel::ipow(n, n - t)));
                prev[t - 1] = chi.chi[t - 1];
            }
        }
        auto exact = mpo::chi_profile(f, 0.0);
        // Sector bound on generic instances below n = 6.
        CHECK(mpo::theorem_bound_check(exact, 2).all_within);
        auto one = mpo::chi_profile(f, 1.0);
        for (int c : one.chi) {
            CHECK(c == 1);
        }
    }
    auto f = mpo::routing_tensor(testing::monitored_sub(3, 2, rng), BranchOutcome::zero(3, 2));
    bool bad = false;
    try {
        mpo::chi_profile(f, -1.0);
    } catch (const Error &e) {
        bad = e.code() == ErrorCode::InvalidTolerance;
    }
    CHECK(bad);
}

TEST_CASE("bound report arithmetic") {
    mpo::ChiProfile p;
    p.chi = {3, 30, 3};
    p.chi_max = 30;
    auto rep = mpo::theorem_bound_check(p, 2);
    CHECK(rep.bound == std::vector<long>{16, 24, 16});
    CHECK(rep.within == std::vector<bool>{true, false, true});
    CHECK_FALSE(rep.all_within);
    CHECK(rep.ratio[1] == doctest::Approx(5.0));
}

TEST_CASE("rank witness") {
    for (int d : {2, 3}) {
        for (int n = 1; n <= 6; ++n) {
            for (int t = 0; t <= n; ++t) {
                auto w = mpo::rank_witness(n, t, d);
                INFO("n=" << n << " t=" << t << " d=" << d);
                long size = static_cast<long>(math::binomial(n, t));
                CHECK(static_cast<long>(w.subsets.size()) == size);
                CHECK(w.matrix.rows() == size);
                CHECK(w.diagonal);
                CHECK(w.max_off_diagonal < 1e-12);
                CHECK(w.rank == size);
                CHECK(w.min_diagonal > 0.0);
                for (long i = 0; i < size; ++i) {
                    int c = w.diagonal_exponents[i];
                    CHECK(c >= 1);
                    double want = std::pow(double(d), c - n - 1);
                    CHECK(std::abs(std::abs(w.matrix(i, i)) - want) < 1e-12 * want);
                }
            }
        }
    }
    auto w = mpo::rank_witness(4, 2, 2);
    CHECK(w.rank == 6);
    CHECK(mpo::rank_witness(5, 2, 2).rank == 10);
    CHECK(mpo::rank_witness(6, 3, 2).rank == 20);
    bool capped = false;
    try {
        mpo::rank_witness(10, 5, 2);
    } catch (const Error &e) {
        capped = e.code() == ErrorCode::Capacity;
    }
    CHECK(capped);
}
