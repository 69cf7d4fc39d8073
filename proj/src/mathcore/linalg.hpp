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

#ifndef NCFLO_MATHCORE_LINALG_HPP
#define NCFLO_MATHCORE_LINALG_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "mathcore/rng.hpp"

namespace ncflo::math {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class RankMode { Relative, Absolute };

/// Haar-distributed unitary of size dim: complex Ginibre draw, Householder QR,
/// then the phases of diag(R) are moved into Q so the result is uniform.
ComplexMatrix haar_unitary(int dim, RngStream &rng);

/// dim x dim matrix of i.i.d. standard complex normal entries.
ComplexMatrix ginibre(int dim, RngStream &rng);

/// Singular values in descending order.
std::vector<double> singular_values(const ComplexMatrix &m);

/// Number of singular values above the threshold. Relative mode thresholds at
/// eps * sigma_max, absolute mode at eps. In either mode the threshold never
/// drops below the numerical rank floor max(rows, cols) * DBL_EPSILON * sigma_max,
/// so eps = 0 yields the numerical (exact) rank.
int eps_rank(const ComplexMatrix &m, double eps, RankMode mode = RankMode::Relative);
int eps_rank_from_singular_values(const std::vector<double> &sv, double eps, RankMode mode,
                                  double sigma_max, long max_dim);

bool all_finite(const ComplexMatrix &m);

/// ||U^H U - I||_F.
double unitarity_defect(const ComplexMatrix &u);

}  // namespace ncflo::math

#endif
