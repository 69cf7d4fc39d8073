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

#include "mathcore/permutation.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mathcore/error.hpp"

namespace ncflo::math {

std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) {
        f *= static_cast<std::uint64_t>(i);
    }
    return f;
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) {
        c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return c;
}

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
    const int n = size();
    std::vector<char> seen(n, 0);
    for (int v : images_) {
        require(v >= 0 && v < n && !seen[v], ErrorCode::InvalidConfig, "Permutation: images are not a bijection");
        seen[v] = 1;
    }
    std::fill(seen.begin(), seen.end(), 0);
    for (int start = 0; start < n; ++start) {
        if (seen[start]) {
            continue;
        }
        std::vector<int> cycle;
        for (int i = start; !seen[i]; i = images_[i]) {
            seen[i] = 1;
            cycle.push_back(i);
        }
        cycles_.push_back(std::move(cycle));
    }
    sign_ = ((n - cycle_count()) % 2 == 0) ? 1 : -1;
}

Permutation Permutation::identity(int n) {
    std::vector<int> images(n);
    std::iota(images.begin(), images.end(), 0);
    return Permutation(std::move(images));
}

Permutation Permutation::from_one_based(std::span<const int> images) {
    std::vector<int> zero_based(images.begin(), images.end());
    for (int &v : zero_based) {
        --v;
    }
    return Permutation(std::move(zero_based));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(images_.size());
    for (int i = 0; i < size(); ++i) {
        inv[images_[i]] = i;
    }
    return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation &other) const {
    require(size() == other.size(), ErrorCode::DimensionMismatch, "Permutation::compose: size mismatch");
    std::vector<int> out(images_.size());
    for (int i = 0; i < size(); ++i) {
        out[i] = images_[other.images_[i]];
    }
    return Permutation(std::move(out));
}

PermutationRange::PermutationRange(int n, int cap) : n_(n) {
    require(n >= 1, ErrorCode::InvalidDimension, "permutations: n must be >= 1");
    require(n <= cap, ErrorCode::Capacity,
            "permutations: n = " + std::to_string(n) + " exceeds the factorial cap " + std::to_string(cap));
}

PermutationRange::iterator::iterator(int n) : images_(n), done_(false) {
    std::iota(images_.begin(), images_.end(), 0);
    current_ = Permutation(images_);
}

PermutationRange::iterator &PermutationRange::iterator::operator++() {
    if (std::next_permutation(images_.begin(), images_.end())) {
        current_ = Permutation(images_);
    } else {
        done_ = true;
    }
    return *this;
}

PermutationRange permutations(int n, int cap) {
    return PermutationRange(n, cap);
}

}  // namespace ncflo::math
