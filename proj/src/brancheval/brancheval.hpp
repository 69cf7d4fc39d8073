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

#ifndef NCFLO_BRANCHEVAL_BRANCHEVAL_HPP
#define NCFLO_BRANCHEVAL_BRANCHEVAL_HPP

#include <utility>
#include <vector>

#include "flomodel/flomodel.hpp"
#include "kernelcore/kernelcore.hpp"

namespace ncflo::branch {

using math::BlockGrid;
using math::Complex;
using math::ComplexMatrix;

/// Fusion outcomes beta_t = (a_t, b_t) in Z_d^2, t = 0..n-1. The flat index
/// packs a_t*d + b_t as base-d^2 digits with t = 0 most significant.
class BranchOutcome {
   public:
    BranchOutcome(int d, std::vector<std::pair<int, int>> labels);
    static BranchOutcome zero(int n, int d);
    static BranchOutcome from_index(long index, int n, int d);
    static BranchOutcome uniform(int n, int d, math::RngStream &rng);
    /// beta_t = (0, b_t) with b_t uniform.
    static BranchOutcome z_only(int n, int d, math::RngStream &rng);

    int n() const {
        return static_cast<int>(labels_.size());
    }
    int d() const {
        return d_;
    }
    int a(int t) const {
        return labels_[t].first;
    }
    int b(int t) const {
        return labels_[t].second;
    }
    const std::vector<std::pair<int, int>> &labels() const {
        return labels_;
    }
    long index() const;

   private:
    int d_;
    std::vector<std::pair<int, int>> labels_;
};

/// S~_{t,k} = S_{t,k}^T D_{beta_t}.
struct DressedBlocks {
    BlockGrid blocks;
};

DressedBlocks dress(const flo::PostSelectedSub &s, const BranchOutcome &beta);
/// Inverse of dress: right-multiply by D^dagger, then transpose.
flo::PostSelectedSub undress(const DressedBlocks &dressed, const BranchOutcome &beta);

enum class Route { PathCycle, DenseContraction };

struct BranchOperator {
    ComplexMatrix matrix;
    Route route;
};

/// One permutation term without its sign:
/// d^-n (prod_C Tr Pi_C) Pi_Path, the path product taken in traversal order
/// with the first edge rightmost.
ComplexMatrix pathcycle_term(const BlockGrid &dressed, const kernel::PathCycle &pc);

/// sum_sigma sgn(sigma) pathcycle_term(sigma) over an arbitrary dressed grid.
ComplexMatrix evaluate_pathcycle(const BlockGrid &dressed, int factorial_cap = math::kDefaultFactorialCap);

BranchOperator branch_operator_pathcycle(const flo::PostSelectedSub &s, const BranchOutcome &beta,
                                         int factorial_cap = math::kDefaultFactorialCap);

/// Physical route: det_(x)(S) with its input legs Bell-paired to A_1..A_n,
/// A_0 carrying the open input leg, Bell bras on (A_{t-1}, Q_t), open output
/// on A_n. The raw byproduct of each fusion is D_gamma^T; the bra label gamma
/// is chosen through weyl_transpose_relabel so that D_gamma^T = phase D_beta_t,
/// and the phase is divided out, giving the same labels as the path-cycle
/// route.
BranchOperator branch_operator_dense(const flo::PostSelectedSub &s, const BranchOutcome &beta,
                                     long dense_limit = kernel::kDefaultKernelDenseLimit);

/// Same contraction on a precomputed kernel.
ComplexMatrix contract_kernel(const kernel::KernelMatrix &k, const BranchOutcome &beta);

inline constexpr long kDefaultTableCap = 1L << 27;

struct AmplitudeTable {
    int n = 0;
    int d = 0;
    int boundary_l = 0;
    int boundary_r = 0;
    std::vector<Complex> amplitudes;  ///< indexed by BranchOutcome::index()
    double normalization = 0.0;       ///< sum |A|^2
};

/// All d^(2n) amplitudes <r|T_beta(S)|l> from one kernel slice: the state is
/// built once and each fusion pair is rotated into the (relabeled) Bell basis
/// with the d^2 x d^2 map (x, y) -> d^-1/2 (D_beta)_{y,x}, x on the
/// auxiliary leg and y on the kernel output leg.
AmplitudeTable amplitude_table(const flo::PostSelectedSub &s, int boundary_l = 0, int boundary_r = 0,
                               long table_cap = kDefaultTableCap);

/// Per-outcome path-cycle evaluation of the same table (reference route).
AmplitudeTable amplitude_table_pathcycle(const flo::PostSelectedSub &s, int boundary_l = 0, int boundary_r = 0);

/// Amplitudes restricted to Z-only outcomes (a_t = 0 for all t), re-indexed
/// by b_t as base-d digits, t = 0 most significant.
AmplitudeTable restrict_z_only(const AmplitudeTable &table);

/// p(beta) = |A(beta)|^2 / sum |A|^2.
std::vector<double> conditional_distribution(const AmplitudeTable &table);

/// Draw an index from an explicit probability vector.
long sample_index(const std::vector<double> &p, math::RngStream &rng);

struct CommutingControl {
    flo::PostSelectedSub sub;
    BranchOutcome beta;
    ComplexMatrix scalars;  ///< a_{t,k}; S_{t,k} = a_{t,k} 1_d
};

/// S_{t,k} = a_{t,k} 1_d with (a_{t,k}) a post-selected scalar sub-matrix of a
/// Haar U(m) (the d = 1 pipeline), and Z-only byproducts with uniform b_t.
CommutingControl commuting_control_instance(int n, int d, math::RngStream &rng, double kappa = 0.5);

flo::PostSelectedSub scalar_blocks(const ComplexMatrix &scalars, int d);

/// Ferm_k(W) = sum_pi sgn(pi) k^#cyc(pi) prod_t W_{t,pi(t)}.
Complex fermionant(const ComplexMatrix &w, Complex k, int factorial_cap = math::kDefaultFactorialCap);

/// Z_d = Tr(T_beta(S)) / d.
Complex cyclic_closure(const flo::PostSelectedSub &s, const BranchOutcome &beta,
                       int factorial_cap = math::kDefaultFactorialCap);

/// The fixed n-cycle pi_0(t) = t-1 (t >= 2), pi_0(1) = n, in 0-based form.
math::Permutation fixed_n_cycle(int n);

/// W_{t,k} = a_{pi_0^-1(t),k}.
ComplexMatrix shifted_matrix(const ComplexMatrix &scalars);

/// sgn(pi_0) Ferm_d(W) / d^(n+1), the closed form of the cyclic closure on
/// scalar-block instances with beta = 0.
Complex cyclic_closure_fermionant_form(const ComplexMatrix &scalars, int d,
                                       int factorial_cap = math::kDefaultFactorialCap);

}  // namespace ncflo::branch

#endif
