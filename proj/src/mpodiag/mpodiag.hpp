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

#ifndef NCFLO_MPODIAG_MPODIAG_HPP
#define NCFLO_MPODIAG_MPODIAG_HPP

#include <vector>

#include "brancheval/brancheval.hpp"

namespace ncflo::mpo {

using math::Complex;
using math::ComplexMatrix;
using math::Permutation;

inline constexpr int kRoutingMaxN = 8;
inline constexpr long kWitnessCap = 256;

/// Routing-history tensor F(k_1..k_n), supported on permutations:
/// F(sigma) = sgn(sigma) <r|T_sigma|l>. In operator-boundary mode the wire legs
/// stay open and each permutation carries all d^2 entries (r, l), flattened
/// as r*d + l, which join the left index of every matricization.
struct RoutingTensor {
    int n = 0;
    int d = 0;
    bool operator_boundary = false;
    int boundary_l = 0;
    int boundary_r = 0;
    std::vector<Permutation> support;  ///< lexicographic order
    std::vector<Complex> values;       ///< support.size() * width() entries

    int width() const {
        return operator_boundary ? d * d : 1;
    }
    /// Sum of all entries (scalar mode), i.e. the branch amplitude.
    Complex sum() const;
    /// Sum of all entries at wire labels (r, l) (operator mode: entry of T).
    ComplexMatrix operator_sum() const;
};

RoutingTensor routing_tensor(const flo::PostSelectedSub &s, const branch::BranchOutcome &beta, int boundary_l = 0,
                             int boundary_r = 0, bool operator_boundary = false);

/// Dense n^t (x) width by n^(n-t) matricization at cut t; left index
/// (k_1..k_t) with k_1 most significant, then the wire index.
ComplexMatrix dense_matricization(const RoutingTensor &f, int t);

struct ChiProfile {
    std::vector<int> chi;  ///< chi[t-1] for cuts t = 1..n-1
    int chi_max = 1;
    double eps = 1e-3;
    math::RankMode mode = math::RankMode::Relative;
};

/// Cut ranks. The matricization at cut t is block diagonal over the set of
/// labels used by the first t steps (one t! x (n-t)! block per t-subset), so
/// the singular values are collected block by block; the result equals the
/// rank of dense_matricization. Each chi_t is at least 1.
ChiProfile chi_profile(const RoutingTensor &f, double eps = 1e-3, math::RankMode mode = math::RankMode::Relative);

/// Same ranks from the dense matricization (reference route, small n).
ChiProfile chi_profile_dense(const RoutingTensor &f, double eps = 1e-3, math::RankMode mode = math::RankMode::Relative);

struct WitnessMatrix {
    int n = 0;
    int t = 0;
    int d = 0;
    std::vector<std::vector<int>> subsets;  ///< 0-based t-subsets, lexicographic
    ComplexMatrix matrix;
    int rank = 0;
    double max_off_diagonal = 0.0;
    double min_diagonal = 0.0;
    bool diagonal = false;
    std::vector<int> diagonal_exponents;  ///< c with |M_II| = d^c / d^(n+1), -1 if not of that form
};

/// Prefix assignment I on rows s < t and suffix assignment, complement of J,
/// on rows s >= t; each row has a single identity block. M_{I,J} is the trace
/// of the path-cycle evaluation at beta = 0 under that assignment.
WitnessMatrix rank_witness(int n, int t, int d, long cap = kWitnessCap);

struct BoundReport {
    std::vector<long> bound;     ///< C(n,t) d^2
    std::vector<double> ratio;   ///< chi_t / C(n,t)
    std::vector<bool> within;
    bool all_within = true;
};

BoundReport theorem_bound_check(const ChiProfile &profile, int d);

}  // namespace ncflo::mpo

#endif
