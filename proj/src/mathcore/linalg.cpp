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

#include "mathcore/linalg.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>

#include "mathcore/error.hpp"

namespace ncflo::math {

ComplexMatrix ginibre(int dim, RngStream &rng) {
    require(dim >= 1, ErrorCode::InvalidDimension, "ginibre: dimension must be >= 1, got " + std::to_string(dim));
    ComplexMatrix g(dim, dim);
    // Column-major fill order is part of the reproducibility contract.
    for (int c = 0; c < dim; ++c) {
        for (int r = 0; r < dim; ++r) {
            g(r, c) = rng.complex_normal();
        }
    }
    return g;
}

ComplexMatrix haar_unitary(int dim, RngStream &rng) {
    require(dim >= 1, ErrorCode::InvalidDimension, "haar_unitary: dimension must be >= 1, got " + std::to_string(dim));
    ComplexMatrix g = ginibre(dim, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix &packed = qr.matrixQR();
    for (int j = 0; j < dim; ++j) {
        Complex rjj = packed(j, j);
        double mod = std::abs(rjj);
        Complex phase = mod > 0.0 ? rjj / mod : Complex(1.0, 0.0);
        q.col(j) *= phase;
    }
    return q;
}

std::vector<double> singular_values(const ComplexMatrix &m) {
    require(m.size() > 0, ErrorCode::InvalidDimension, "singular_values: empty matrix");
    Eigen::VectorXd sv;
    if (std::min(m.rows(), m.cols()) <= 16) {
        sv = Eigen::JacobiSVD<ComplexMatrix>(m).singularValues();
    } else {
        sv = Eigen::BDCSVD<ComplexMatrix>(m).singularValues();
    }
    std::vector<double> out(sv.data(), sv.data() + sv.size());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

int eps_rank_from_singular_values(const std::vector<double> &sv, double eps, RankMode mode, double sigma_max,
                                  long max_dim) {
    require(eps >= 0.0 && std::isfinite(eps), ErrorCode::InvalidTolerance,
            "eps_rank: tolerance must be finite and >= 0");
    if (sigma_max <= 0.0) {
        return 0;
    }
    double floor = static_cast<double>(max_dim) * DBL_EPSILON * sigma_max;
    double threshold = mode == RankMode::Relative ? eps * sigma_max : eps;
    threshold = std::max(threshold, floor);
    int count = 0;
    for (double s : sv) {
        if (s > threshold) {
            ++count;
        }
    }
    return count;
}

int eps_rank(const ComplexMatrix &m, double eps, RankMode mode) {
    require(eps >= 0.0 && std::isfinite(eps), ErrorCode::InvalidTolerance,
            "eps_rank: tolerance must be finite and >= 0");
    auto sv = singular_values(m);
    double smax = sv.empty() ? 0.0 : sv.front();
    return eps_rank_from_singular_values(sv, eps, mode, smax, std::max(m.rows(), m.cols()));
}

bool all_finite(const ComplexMatrix &m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag())) {
            return false;
        }
    }
    return true;
}

double unitarity_defect(const ComplexMatrix &u) {
    return (u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols())).norm();
}

}  // namespace ncflo::math
