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

#ifndef NCFLO_KERNELCORE_KERNELCORE_HPP
#define NCFLO_KERNELCORE_KERNELCORE_HPP

#include <span>
#include <utility>
#include <vector>

#include "flomodel/flomodel.hpp"
#include "mathcore/permutation.hpp"

namespace ncflo::kernel {

using math::Complex;
using math::ComplexMatrix;
using math::Permutation;

inline constexpr long kDefaultKernelDenseLimit = 8192;

/// Tensor-slot convention for (C^d)^(x)n: slot t = 0 is the most significant
/// digit of the flat basis index.
long basis_index(std::span<const int> digits, int d);
std::vector<int> basis_digits(long index, int n, int d);
long ipow(long base, int exp);

/// det_(x)(S) as a dense d^n x d^n matrix.
struct KernelMatrix {
    int n = 0;
    int d = 0;
    ComplexMatrix matrix;
};

/// <nu|det_(x)(S)|alpha> = sum_sigma sgn(sigma) prod_t (S_{t,sigma(t)})_{nu_t, alpha_sigma(t)}.
/// Evaluated as a signed sum over injective column assignments, accumulated
/// row by row over subsets of used columns (2^n n terms instead of n! n).
Complex kernel_entry(const math::BlockGrid &s, std::span<const int> nu, std::span<const int> alpha);

/// Full kernel. Capacity error above d^n > dense_limit or n > factorial cap.
KernelMatrix build_kernel(const flo::PostSelectedSub &s, long dense_limit = kDefaultKernelDenseLimit,
                          int factorial_cap = math::kDefaultFactorialCap);

/// Columns of the kernel whose last input digit alpha_n equals `last_label`,
/// as a d^n x d^(n-1) matrix; column index encodes (alpha_1 .. alpha_{n-1}).
ComplexMatrix kernel_slice_last_input(const math::BlockGrid &s, int last_label);

/// P_sigma |v_1 (x) ... (x) v_n> = |v_{sigma^-1(1)} (x) ... (x) v_{sigma^-1(n)}>.
std::vector<int> apply_permutation_operator(const Permutation &sigma, std::span<const int> digits);
ComplexMatrix permutation_operator(const Permutation &sigma, int d);

/// A fermionic mode (block, internal label).
struct Mode {
    int block;
    int label;
};

/// Amplitude <out| U(V) |in> with both mode lists read as ordered products of
/// creation operators: det of the canonically ordered minor of V times the
/// parities of the two sorting permutations. Repeated modes throw
/// PauliExclusion.
Complex slater_amplitude(const flo::PropagatorBlocks &v, std::span<const Mode> inputs, std::span<const Mode> outputs);

/// Wiring graph of one permutation term under the fixed fusion order: step t
/// (0-based) is the edge A_t -> A_{sigma(t)+1}. Vertices are 0..n.
struct PathCycle {
    Permutation sigma;
    std::vector<int> path_vertices;  ///< 0, ..., n in traversal order
    std::vector<int> path_steps;     ///< steps along the path in traversal order
    std::vector<std::vector<int>> cycle_steps;     ///< each cycle in traversal order
    std::vector<std::vector<int>> cycle_vertices;  ///< starting at the smallest vertex

    Permutation reconstruct() const;
};

PathCycle path_cycle_decompose(const Permutation &sigma);

}  // namespace ncflo::kernel

#endif
