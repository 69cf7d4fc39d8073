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

#include "statdiag/statdiag.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mathcore/error.hpp"

namespace ncflo::stat {

namespace {

double normalized_commutator(const math::ComplexMatrix &a, const math::ComplexMatrix &b, double na, double nb) {
    return (a * b - b * a).norm() / (na * nb);
}

}  // namespace

NcScore nc_score(const branch::DressedBlocks &blocks) {
    const int n = blocks.blocks.n();
    std::vector<const math::ComplexMatrix *> list;
    std::vector<double> norms;
    for (int t = 0; t < n; ++t) {
        for (int k = 0; k < n; ++k) {
            list.push_back(&blocks.blocks(t, k));
            norms.push_back(blocks.blocks(t, k).norm());
        }
    }
    NcScore score;
    double total = 0.0;
    for (size_t i = 0; i < list.size(); ++i) {
        for (size_t j = i + 1; j < list.size(); ++j) {
            if (norms[i] < kZeroNormGuard || norms[j] < kZeroNormGuard) {
                ++score.skipped;
                continue;
            }
            total += normalized_commutator(*list[i], *list[j], norms[i], norms[j]);
            ++score.pairs;
        }
    }
    require(score.pairs > 0, ErrorCode::Degenerate, "nc_score: fewer than two blocks with nonzero norm");
    score.value = total / static_cast<double>(score.pairs);
    return score;
}

MeanEstimate ginibre_reference(int d, long pairs, math::RngStream &rng) {
    require(d >= 1, ErrorCode::InvalidDimension, "ginibre_reference: d must be >= 1");
    require(pairs >= 1000, ErrorCode::InvalidConfig, "ginibre_reference: need at least 1000 pairs");
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long i = 0; i < pairs; ++i) {
        math::ComplexMatrix a = math::ginibre(d, rng);
        math::ComplexMatrix b = math::ginibre(d, rng);
        double v = normalized_commutator(a, b, a.norm(), b.norm());
        sum += v;
        sum_sq += v * v;
    }
    MeanEstimate est;
    est.samples = pairs;
    est.mean = sum / static_cast<double>(pairs);
    double var = std::max(0.0, sum_sq / static_cast<double>(pairs) - est.mean * est.mean);
    est.stderr_ = std::sqrt(var / static_cast<double>(pairs - 1));
    return est;
}

StoredReference stored_ginibre_reference(int d) {
    // ginibre_reference(d, kGinibreReferencePairs, RngStream(mix_seed(kGinibreReferenceSeed, d))).
    switch (d) {
        case 1:
            return {0.0, 0.0, kGinibreReferencePairs, kGinibreReferenceSeed};
        case 2:
            return {0.8315172371, 2.430e-04, kGinibreReferencePairs, kGinibreReferenceSeed};
        case 3:
            return {0.7585451848, 1.318e-04, kGinibreReferencePairs, kGinibreReferenceSeed};
        default:
            fail(ErrorCode::InvalidDimension, "stored_ginibre_reference: no stored value for d = " + std::to_string(d));
    }
}

SecondMoment second_moment(const std::vector<double> &p) {
    require(!p.empty(), ErrorCode::InvalidConfig, "second_moment: empty distribution");
    double total = 0.0;
    double gamma = 0.0;
    for (double v : p) {
        require(v >= 0.0 && std::isfinite(v), ErrorCode::Normalization, "second_moment: negative or non-finite weight");
        total += v;
        gamma += v * v;
    }
    require(std::abs(total - 1.0) <= 1e-10, ErrorCode::Normalization,
            "second_moment: probabilities sum to " + std::to_string(total));
    SecondMoment m;
    m.outcomes = static_cast<long>(p.size());
    m.gamma = gamma;
    m.haar_ratio = (static_cast<double>(m.outcomes) + 1.0) * gamma / 2.0;
    return m;
}

double ks_distance_exponential(std::vector<double> x) {
    require(!x.empty(), ErrorCode::InvalidConfig, "ks_distance_exponential: empty sample");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double dmax = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double cdf = 1.0 - std::exp(-std::max(x[i], 0.0));
        dmax = std::max(dmax, std::max(static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n));
    }
    return dmax;
}

EnsembleStats porter_thomas_stats(const std::vector<double> &p) {
    SecondMoment sm = second_moment(p);
    EnsembleStats s;
    s.gamma = sm.gamma;
    s.haar_ratio = sm.haar_ratio;
    const double big_n = static_cast<double>(p.size());
    std::vector<double> x(p.size());
    long above = 0;
    for (size_t i = 0; i < p.size(); ++i) {
        x[i] = big_n * p[i];
        above += x[i] >= 1.0 ? 1 : 0;
    }
    s.mean_x = mean(x);
    s.anticoncentration = static_cast<double>(above) / big_n;
    s.ks_distance = ks_distance_exponential(x);

    const double lo = std::log10(kHistogramLow);
    const double hi = std::log10(kHistogramHigh);
    for (int b = 0; b <= kHistogramBins; ++b) {
        s.bin_edges.push_back(std::pow(10.0, lo + (hi - lo) * b / kHistogramBins));
    }
    s.histogram.assign(kHistogramBins, 0);
    for (double v : x) {
        if (v < kHistogramLow) {
            ++s.underflow;
        } else if (v >= kHistogramHigh) {
            ++s.overflow;
        } else {
            int b = static_cast<int>((std::log10(v) - lo) / (hi - lo) * kHistogramBins);
            b = std::clamp(b, 0, kHistogramBins - 1);
            // Edge rounding: move to the bin whose edges actually bracket v.
            while (b > 0 && v < s.bin_edges[b]) {
                --b;
            }
            while (b < kHistogramBins - 1 && v >= s.bin_edges[b + 1]) {
                ++b;
            }
            ++s.histogram[b];
        }
    }
    return s;
}

double quantile(std::vector<double> values, double q) {
    require(!values.empty(), ErrorCode::InvalidConfig, "quantile: empty sample");
    require(q >= 0.0 && q <= 1.0, ErrorCode::InvalidConfig, "quantile: q must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    double pos = q * static_cast<double>(values.size() - 1);
    size_t lo = static_cast<size_t>(std::floor(pos));
    size_t hi = std::min(lo + 1, values.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) {
    return quantile(std::move(values), 0.5);
}

double mean(const std::vector<double> &values) {
    require(!values.empty(), ErrorCode::InvalidConfig, "mean: empty sample");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace ncflo::stat
