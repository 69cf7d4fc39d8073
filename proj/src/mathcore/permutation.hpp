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

#ifndef NCFLO_MATHCORE_PERMUTATION_HPP
#define NCFLO_MATHCORE_PERMUTATION_HPP

#include <cstdint>
#include <iterator>
#include <span>
#include <vector>

namespace ncflo::math {

inline constexpr int kDefaultFactorialCap = 9;

std::uint64_t factorial(int n);
std::uint64_t binomial(int n, int k);

/// A bijection on {0..n-1}. Images are 0-based; printed forms elsewhere use the
/// 1-based one-line notation (sigma(1), ..., sigma(n)).
class Permutation {
   public:
    explicit Permutation(std::vector<int> images);
    static Permutation identity(int n);
    /// From 1-based one-line notation, e.g. {2, 1, 3}.
    static Permutation from_one_based(std::span<const int> images);

    int size() const {
        return static_cast<int>(images_.size());
    }
    int operator()(int i) const {
        return images_[i];
    }
    const std::vector<int> &images() const {
        return images_;
    }
    int sign() const {
        return sign_;
    }
    /// Cycles in order of their smallest element, each starting at it.
    const std::vector<std::vector<int>> &cycles() const {
        return cycles_;
    }
    int cycle_count() const {
        return static_cast<int>(cycles_.size());
    }

    Permutation inverse() const;
    /// (this o other)(i) = this(other(i)).
    Permutation compose(const Permutation &other) const;

    bool operator==(const Permutation &other) const {
        return images_ == other.images_;
    }

   private:
    std::vector<int> images_;
    int sign_ = 1;
    std::vector<std::vector<int>> cycles_;
};

/// All n! permutations of {0..n-1} in lexicographic order. Throws a capacity
/// error when n exceeds the cap.
class PermutationRange {
   public:
    explicit PermutationRange(int n, int cap = kDefaultFactorialCap);

    class iterator {
       public:
        using iterator_category = std::input_iterator_tag;
        using value_type = Permutation;
        using difference_type = std::ptrdiff_t;
        using pointer = const Permutation *;
        using reference = const Permutation &;

        iterator() = default;
        explicit iterator(int n);
        reference operator*() const {
            return current_;
        }
        pointer operator->() const {
            return &current_;
        }
        iterator &operator++();
        bool operator==(const iterator &other) const {
            return done_ == other.done_;
        }

       private:
        std::vector<int> images_;
        Permutation current_{std::vector<int>{}};
        bool done_ = true;
    };

    iterator begin() const {
        return iterator(n_);
    }
    iterator end() const {
        return iterator();
    }

   private:
    int n_;
};

/// Convenience wrapper around PermutationRange (the bracketed call form).
PermutationRange permutations(int n, int cap = kDefaultFactorialCap);

}  // namespace ncflo::math

#endif
