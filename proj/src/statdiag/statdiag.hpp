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

#ifndef NCFLO_STATDIAG_STATDIAG_HPP
#define NCFLO_STATDIAG_STATDIAG_HPP

#include <vector>

#include "brancheval/brancheval.hpp"

namespace ncflo::stat {

inline constexpr double kZeroNormGuard = 1e-14;
inline constexpr int kHistogramBins = 50;
inline constexpr double kHistogramLow = 1e-4;
inline constexpr double kHistogramHigh = 1e2;

struct NcScore {
    double value = 0.0;
    long pairs = 0;    ///< pairs entering the mean
    long skipped = 0;  ///< pairs with a block norm below the guard
};

/// Mean of ||[A,B]||_F / (||A||_F ||B||_F) over unordered pairs of distinct
/// dressed blocks.
NcScore nc_score(const branch::DressedBlocks &blocks);

struct MeanEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    long samples = 0;
};

/// Monte Carlo mean of the normalized commutator over independent Ginibre pairs.
MeanEstimate ginibre_reference(int d, long pairs, math::RngStream &rng);

struct StoredReference {
    double mean;
    double stderr_;
    long pairs;
    unsigned long long seed;
};

/// Frozen Ginibre reference means (10^6 pairs each) for d = 2, 3. Other d
/// throw InvalidDimension; d = 1 returns 0.
StoredReference stored_ginibre_reference(int d);

inline constexpr unsigned long long kGinibreReferenceSeed = 20240611ULL;
inline constexpr long kGinibreReferencePairs = 1000000;

struct SecondMoment {
    double gamma = 0.0;
    double haar_ratio = 0.0;
    long outcomes = 0;
};

/// Gamma = sum p^2 and (N + 1) Gamma / 2 with N = p.size().
SecondMoment second_moment(const std::vector<double> &p);

struct EnsembleStats {
    double gamma = 0.0;
    double haar_ratio = 0.0;
    double ks_distance = 0.0;
    double anticoncentration = 0.0;  ///< fraction of outcomes with x >= 1
    double mean_x = 0.0;
    std::vector<double> bin_edges;   ///< kHistogramBins + 1 log-spaced edges
    std::vector<long> histogram;     ///< counts of x per bin
    long underflow = 0;              ///< x below the first edge (includes x = 0)
    long overflow = 0;               ///< x at or above the last edge
};

/// x = N p against the Porter-Thomas law 1 - e^-x.
EnsembleStats porter_thomas_stats(const std::vector<double> &p);

/// Kolmogorov-Smirnov distance between the empirical CDF of x and 1 - e^-x.
double ks_distance_exponential(std::vector<double> x);

double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);
double mean(const std::vector<double> &values);

}  // namespace ncflo::stat

#endif
