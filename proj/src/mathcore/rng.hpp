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

#ifndef NCFLO_MATHCORE_RNG_HPP
#define NCFLO_MATHCORE_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace ncflo::math {

/// Stable 64-bit mixing of (master, index) into a child seed (splitmix64
/// finalizer applied twice). Used for every derived stream in the library.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

/// Seeded, single-owner random stream. Never share one between threads; derive
/// children with split() instead.
class RngStream {
   public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {
    }

    std::uint64_t seed() const {
        return seed_;
    }

    RngStream split(std::uint64_t child) const {
        return RngStream(mix_seed(seed_, child));
    }

    /// Uniform on [0, 1).
    double uniform() {
        return std::generate_canonical<double, 53>(engine_);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    double normal() {
        return normal_(engine_);
    }

    /// Standard complex normal: E|z|^2 = 1, real and imaginary parts each of
    /// variance 1/2.
    std::complex<double> complex_normal() {
        constexpr double kHalfSqrt = 0.70710678118654752440;
        double re = normal_(engine_);
        double im = normal_(engine_);
        return {kHalfSqrt * re, kHalfSqrt * im};
    }

    /// Exp(1) variate.
    double exponential() {
        return std::exponential_distribution<double>(1.0)(engine_);
    }

    std::mt19937_64 &engine() {
        return engine_;
    }

   private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ncflo::math

#endif
