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

#include <algorithm>
#include <cmath>

#include "mathcore/error.hpp"
#include "statdiag/statdiag.hpp"
#include "test_support.hpp"

using namespace ncflo;
using branch::BranchOutcome;
using math::Complex;
using math::ComplexMatrix;

namespace {

double nc_oracle(const math::BlockGrid &g) {
    std::vector<ComplexMatrix> blocks;
    for (int t = 0; t < g.n(); ++t) {
        for (int k = 0; k < g.n(); ++k) {
            blocks.push_back(g(t, k));
        }
    }
    double total = 0.0;
    long count = 0;
    for (size_t i = 0; i < blocks.size(); ++i) {
        for (size_t j = i + 1; j < blocks.size(); ++j) {
            const auto &a = blocks[i];
            const auto &b = blocks[j];
            total += (a * b - b * a).norm() / (a.norm() * b.norm());
            ++count;
        }
    }
    return total / count;
}

std::vector<double> exponential_weights(long n, math::RngStream &rng) {
    std::vector<double> p(n);
    double total = 0.0;
    for (double &v : p) {
        v = rng.exponential();
        total += v;
    }
    for (double &v : p) {
        v /= total;
    }
    return p;
}

template <typename F>
bool throws_code(F &&f, ErrorCode code) {
    try {
        f();
    } catch (const Error &e) {
        return e.code() == code;
    }
    return false;
}

}  // namespace

TEST_CASE("commutator score on commuting families") {
    branch::DressedBlocks same{math::BlockGrid(3, 2)};
    for (int t = 0; t < 3; ++t) {
        for (int k = 0; k < 3; ++k) {
            same.blocks(t, k) = Complex(0.7, -0.2) * ComplexMatrix::Identity(2, 2);
        }
    }
    auto score = stat::nc_score(same);
    CHECK(score.value == 0.0);
    CHECK(score.pairs == 36);
    CHECK(score.skipped == 0);

    math::RngStream rng(61);
    for (int n = 2; n <= 6; ++n) {
        auto ctl = branch::commuting_control_instance(n, 2, rng);
        CHECK(stat::nc_score(branch::dress(ctl.sub, ctl.beta)).value == 0.0);
    }

    branch::DressedBlocks zeros{math::BlockGrid(2, 2)};
    zeros.blocks(0, 0) = ComplexMatrix::Identity(2, 2);
    CHECK(throws_code([&] { stat::nc_score(zeros); }, ErrorCode::Degenerate));
    zeros.blocks(1, 1) = ComplexMatrix::Identity(2, 2);
    auto guarded = stat::nc_score(zeros);
    CHECK(guarded.pairs == 1);
    CHECK(guarded.skipped == 5);
}

TEST_CASE("commutator score on generic instances") {
    math::RngStream rng(62);
    for (int n = 2; n <= 5; ++n) {
        for (int d : {2, 3}) {
            auto s = testing::monitored_sub(n, d, rng);
            auto dressed = branch::dress(s, BranchOutcome::uniform(n, d, rng));
            auto score = stat::nc_score(dressed);
            CHECK(score.value >= 0.0);
            CHECK(score.value <= 2.0);
            CHECK(std::abs(score.value - nc_oracle(dressed.blocks)) < 1e-13);
        }
    }
}

TEST_CASE("ginibre blocks reproduce the stored reference") {
    math::RngStream rng(63);
    for (int d : {2, 3}) {
        auto ref = stat::stored_ginibre_reference(d);
        CHECK(ref.mean > 0.0);
        CHECK(ref.mean < 2.0);
        CHECK(ref.pairs == stat::kGinibreReferencePairs);
        // Independent 2x2 grids, 6 pairs each, about 10^4 pairs in total.
        std::vector<double> means;
        for (int rep = 0; rep < 1700; ++rep) {
            auto s = testing::ginibre_sub(2, d, rng);
            means.push_back(stat::nc_score(branch::DressedBlocks{s.blocks}).value);
        }
        double m = stat::mean(means);
        double var = 0.0;
        for (double v : means) {
            var += (v - m) * (v - m);
        }
        double se = std::sqrt(var / (means.size() - 1) / means.size());
        INFO("d=" << d << " mean=" << m << " ref=" << ref.mean << " se=" << se);
        CHECK(std::abs(m - ref.mean) < 3.0 * std::hypot(se, ref.stderr_));
    }
    CHECK(stat::stored_ginibre_reference(1).mean == 0.0);
    CHECK(throws_code([] { stat::stored_ginibre_reference(4); }, ErrorCode::InvalidDimension));
}

TEST_CASE("ginibre reference estimator") {
    math::RngStream rng(64);
    CHECK(stat::ginibre_reference(1, 1000, rng).mean == 0.0);
    auto a = stat::ginibre_reference(2, 20000, rng);
    auto b = stat::ginibre_reference(2, 40000, rng);
    CHECK(std::abs(a.mean - b.mean) < 2.0 * std::hypot(a.stderr_, b.stderr_));
    auto c = stat::ginibre_reference(3, 20000, rng);
    CHECK(a.mean > 0.0);
    CHECK(c.mean < 2.0);
    CHECK(std::abs(a.mean - c.mean) > 5.0 * std::hypot(a.stderr_, c.stderr_));
    auto stored = stat::stored_ginibre_reference(2);
    CHECK(std::abs(b.mean - stored.mean) < 3.0 * std::hypot(b.stderr_, stored.stderr_));
    CHECK(throws_code([&] { stat::ginibre_reference(2, 10, rng); }, ErrorCode::InvalidConfig));
}

TEST_CASE("second moment identities") {
    for (long n : {4L, 64L, 4096L}) {
        std::vector<double> uniform(n, 1.0 / n);
        auto u = stat::second_moment(uniform);
        CHECK(u.gamma == doctest::Approx(1.0 / n).epsilon(1e-12));
        CHECK(u.haar_ratio == doctest::Approx((n + 1.0) / (2.0 * n)).epsilon(1e-12));
        CHECK(u.outcomes == n);
        std::vector<double> point(n, 0.0);
        point[n / 2] = 1.0;
        auto pm = stat::second_moment(point);
        CHECK(pm.gamma == 1.0);
        CHECK(pm.haar_ratio == doctest::Approx((n + 1.0) / 2.0));
    }
    math::RngStream rng(65);
    double ratio = 0.0;
    const int reps = 20;
    for (int rep = 0; rep < reps; ++rep) {
        ratio += stat::second_moment(exponential_weights(4096, rng)).haar_ratio;
    }
    CHECK(std::abs(ratio / reps - 1.0) < 0.05);
    CHECK(throws_code([] { stat::second_moment({0.5, 0.4}); }, ErrorCode::Normalization));
}

TEST_CASE("porter-thomas statistics") {
    math::RngStream rng(66);
    int good = 0;
    double frac = 0.0;
    const int reps = 20;
    for (int rep = 0; rep < reps; ++rep) {
        auto p = exponential_weights(4096, rng);
        auto st = stat::porter_thomas_stats(p);
        good += st.ks_distance < 0.03 ? 1 : 0;
        frac += st.anticoncentration;
        CHECK(std::abs(st.mean_x - 1.0) < 1e-12);
        long total = st.underflow + st.overflow;
        for (long c : st.histogram) {
            total += c;
        }
        CHECK(total == 4096);
        CHECK(st.bin_edges.size() == static_cast<size_t>(stat::kHistogramBins + 1));
        CHECK(st.bin_edges.front() == doctest::Approx(1e-4));
        CHECK(st.bin_edges.back() == doctest::Approx(1e2));
    }
    CHECK(good >= 18);
    CHECK(std::abs(frac / reps - std::exp(-1.0)) < 0.01);

    std::vector<double> point(4096, 0.0);
    point[7] = 1.0;
    auto pm = stat::porter_thomas_stats(point);
    CHECK(pm.anticoncentration == doctest::Approx(1.0 / 4096));
    CHECK(pm.ks_distance > 0.99);
    CHECK(pm.underflow == 4095);
    CHECK(pm.overflow == 1);
}

TEST_CASE("ks distance against a hand computation") {
    // Sorted sample {0.5, 1, 2}: sup |F_n - F| over the steps.
    std::vector<double> x{2.0, 0.5, 1.0};
    double want = 0.0;
    std::vector<double> sorted{0.5, 1.0, 2.0};
    for (int i = 0; i < 3; ++i) {
        double f = 1.0 - std::exp(-sorted[i]);
        want = std::max({want, std::abs((i + 1) / 3.0 - f), std::abs(i / 3.0 - f)});
    }
    CHECK(stat::ks_distance_exponential(x) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("quantiles") {
    CHECK(stat::median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(stat::median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK(stat::quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.25) == 2.0);
    CHECK(stat::mean({1.0, 2.0, 6.0}) == 3.0);
    CHECK(throws_code([] { stat::median({}); }, ErrorCode::InvalidConfig));
}
