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

#ifndef NCFLO_TESTS_TEST_SUPPORT_HPP
#define NCFLO_TESTS_TEST_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "brancheval/brancheval.hpp"
#include "flomodel/flomodel.hpp"
#include "mathcore/linalg.hpp"
#include "mathcore/permutation.hpp"

namespace ncflo::testing {

using math::Complex;
using math::ComplexMatrix;

/// Post-selected sub-matrix of a fresh Haar instance.
inline flo::PostSelectedSub monitored_sub(int n, int d, math::RngStream &rng, double kappa = 0.5) {
    flo::DiluteConfig cfg = flo::DiluteConfig::make(n, d, kappa);
    flo::PropagatorBlocks v = flo::make_instance(cfg, rng);
    return flo::post_select(v, cfg, rng).sub;
}

/// Blocks with i.i.d. Ginibre entries (not a post-selected sub-matrix).
inline flo::PostSelectedSub ginibre_sub(int n, int d, math::RngStream &rng) {
    flo::PostSelectedSub s{math::BlockGrid(n, d)};
    for (int t = 0; t < n; ++t) {
        for (int k = 0; k < n; ++k) {
            s.blocks(t, k) = math::ginibre(d, rng);
        }
    }
    return s;
}

inline Complex brute_permanent(const ComplexMatrix &w) {
    const int n = static_cast<int>(w.rows());
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) {
        p[i] = i;
    }
    Complex total(0.0, 0.0);
    do {
        Complex prod(1.0, 0.0);
        for (int t = 0; t < n; ++t) {
            prod *= w(t, p[t]);
        }
        total += prod;
    } while (std::next_permutation(p.begin(), p.end()));
    return total;
}

/// Kronecker product of a list of matrices, first factor most significant.
inline ComplexMatrix kron_all(const std::vector<ComplexMatrix> &factors) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (const ComplexMatrix &f : factors) {
        ComplexMatrix next(out.rows() * f.rows(), out.cols() * f.cols());
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            for (Eigen::Index j = 0; j < out.cols(); ++j) {
                next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = out(i, j) * f;
            }
        }
        out = next;
    }
    return out;
}

}  // namespace ncflo::testing

#endif
