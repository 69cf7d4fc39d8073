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

#ifndef NCFLO_MATHCORE_BLOCK_GRID_HPP
#define NCFLO_MATHCORE_BLOCK_GRID_HPP

#include <string>
#include <vector>

#include "mathcore/error.hpp"
#include "mathcore/linalg.hpp"

namespace ncflo::math {

/// n x n grid of d x d complex blocks, indexed (row t, column k), 0-based.
class BlockGrid {
   public:
    BlockGrid() = default;
    BlockGrid(int n, int d) : n_(n), d_(d), blocks_(static_cast<size_t>(n) * n, ComplexMatrix::Zero(d, d)) {
        require(n >= 1 && d >= 1, ErrorCode::InvalidDimension, "BlockGrid: n and d must be >= 1");
    }

    int n() const {
        return n_;
    }
    int d() const {
        return d_;
    }

    const ComplexMatrix &operator()(int t, int k) const {
        return blocks_[static_cast<size_t>(t) * n_ + k];
    }
    ComplexMatrix &operator()(int t, int k) {
        return blocks_[static_cast<size_t>(t) * n_ + k];
    }

    void set(int t, int k, const ComplexMatrix &block) {
        require(block.rows() == d_ && block.cols() == d_, ErrorCode::DimensionMismatch,
                "BlockGrid::set: block must be " + std::to_string(d_) + "x" + std::to_string(d_));
        (*this)(t, k) = block;
    }

    /// Entry (nu, alpha) of block (t, k).
    Complex entry(int t, int k, int nu, int alpha) const {
        return (*this)(t, k)(nu, alpha);
    }

   private:
    int n_ = 0;
    int d_ = 0;
    std::vector<ComplexMatrix> blocks_;
};

}  // namespace ncflo::math

#endif
