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

#include "brancheval/brancheval.hpp"

#include <cmath>
#include <string>

#include "mathcore/error.hpp"
#include "mathcore/weyl.hpp"

namespace ncflo::branch {

using kernel::ipow;

BranchOutcome::BranchOutcome(int d, std::vector<std::pair<int, int>> labels) : d_(d), labels_(std::move(labels)) {
    require(d >= 2, ErrorCode::InvalidDimension, "BranchOutcome: d must be >= 2");
    require(!labels_.empty(), ErrorCode::InvalidDimension, "BranchOutcome: need n >= 1 labels");
    for (auto &[a, b] : labels_) {
        a = math::mod(a, d);
        b = math::mod(b, d);
    }
}

BranchOutcome BranchOutcome::zero(int n, int d) {
    return BranchOutcome(d, std::vector<std::pair<int, int>>(n, {0, 0}));
}

BranchOutcome BranchOutcome::from_index(long index, int n, int d) {
    require(index >= 0 && index < ipow(static_cast<long>(d) * d, n), ErrorCode::InvalidConfig,
            "BranchOutcome::from_index: index out of range");
    std::vector<std::pair<int, int>> labels(n);
    const long dd = static_cast<long>(d) * d;
    for (int t = n - 1; t >= 0; --t) {
        int digit = static_cast<int>(index % dd);
        index /= dd;
        labels[t] = {digit / d, digit % d};
    }
    return BranchOutcome(d, std::move(labels));
}

BranchOutcome BranchOutcome::uniform(int n, int d, math::RngStream &rng) {
    std::vector<std::pair<int, int>> labels(n);
    for (auto &l : labels) {
        l.first = static_cast<int>(rng.below(d));
        l.second = static_cast<int>(rng.below(d));
    }
    return BranchOutcome(d, std::move(labels));
}

BranchOutcome BranchOutcome::z_only(int n, int d, math::RngStream &rng) {
    std::vector<std::pair<int, int>> labels(n);
    for (auto &l : labels) {
        l.first = 0;
        l.second = static_cast<int>(rng.below(d));
    }
    return BranchOutcome(d, std::move(labels));
}

long BranchOutcome::index() const {
    long idx = 0;
    for (const auto &[a, b] : labels_) {
        idx = idx * d_ * d_ + a * d_ + b;
    }
    return idx;
}

namespace {

void check_match(const flo::PostSelectedSub &s, const BranchOutcome &beta) {
    require(s.n() == beta.n() && s.d() == beta.d(), ErrorCode::DimensionMismatch,
            "branch outcome has (n, d) = (" + std::to_string(beta.n()) + ", " + std::to_string(beta.d()) +
                ") but the sub-matrix has (" + std::to_string(s.n()) + ", " + std::to_string(s.d()) + ")");
}

}  // namespace

DressedBlocks dress(const flo::PostSelectedSub &s, const BranchOutcome &beta) {
    check_match(s, beta);
    const int n = s.n();
    const int d = s.d();
    DressedBlocks out{BlockGrid(n, d)};
    for (int t = 0; t < n; ++t) {
        ComplexMatrix dt = math::weyl(d, beta.a(t), beta.b(t)).matrix;
        for (int k = 0; k < n; ++k) {
            out.blocks(t, k) = s.blocks(t, k).transpose() * dt;
        }
    }
    return out;
}

flo::PostSelectedSub undress(const DressedBlocks &dressed, const BranchOutcome &beta) {
    const int n = dressed.blocks.n();
    const int d = dressed.blocks.d();
    require(n == beta.n() && d == beta.d(), ErrorCode::DimensionMismatch, "undress: shape mismatch");
    flo::PostSelectedSub out{BlockGrid(n, d)};
    for (int t = 0; t < n; ++t) {
        ComplexMatrix dt = math::weyl(d, beta.a(t), beta.b(t)).matrix;
        for (int k = 0; k < n; ++k) {
            out.blocks(t, k) = (dressed.blocks(t, k) * dt.adjoint()).transpose();
        }
    }
    return out;
}

ComplexMatrix pathcycle_term(const BlockGrid &dressed, const kernel::PathCycle &pc) {
    const int n = dressed.n();
    const int d = dressed.d();
    const auto &sigma = pc.sigma;
    Complex scalar = std::pow(static_cast<double>(d), -n);
    for (const auto &cycle : pc.cycle_steps) {
        ComplexMatrix prod = dressed(cycle.front(), sigma(cycle.front()));
        for (size_t i = 1; i < cycle.size(); ++i) {
            prod = dressed(cycle[i], sigma(cycle[i])) * prod;
        }
        scalar *= prod.trace();
    }
    ComplexMatrix path = dressed(pc.path_steps.front(), sigma(pc.path_steps.front()));
    for (size_t i = 1; i < pc.path_steps.size(); ++i) {
        path = dressed(pc.path_steps[i], sigma(pc.path_steps[i])) * path;
    }
    return scalar * path;
}

ComplexMatrix evaluate_pathcycle(const BlockGrid &dressed, int factorial_cap) {
    const int n = dressed.n();
    const int d = dressed.d();
    std::vector<char> zero(static_cast<size_t>(n) * n, 0);
    for (int t = 0; t < n; ++t) {
        for (int k = 0; k < n; ++k) {
            zero[static_cast<size_t>(t) * n + k] = dressed(t, k).isZero(0.0) ? 1 : 0;
        }
    }
    ComplexMatrix total = ComplexMatrix::Zero(d, d);
    for (const math::Permutation &sigma : math::permutations(n, factorial_cap)) {
        bool skip = false;
        for (int t = 0; t < n && !skip; ++t) {
            skip = zero[static_cast<size_t>(t) * n + sigma(t)] != 0;
        }
        if (skip) {
            continue;
        }
        ComplexMatrix term = pathcycle_term(dressed, kernel::path_cycle_decompose(sigma));
        if (sigma.sign() > 0) {
            total += term;
        } else {
            total -= term;
        }
    }
    return total;
}

BranchOperator branch_operator_pathcycle(const flo::PostSelectedSub &s, const BranchOutcome &beta,
                                         int factorial_cap) {
    DressedBlocks dressed = dress(s, beta);
    return {evaluate_pathcycle(dressed.blocks, factorial_cap), Route::PathCycle};
}

namespace {

/// Coefficient c[x*d + y] of the fusion bra on (aux leg x, kernel output y)
/// carrying label beta_t after the transpose relabel: (D_beta)_{y,x} / sqrt(d).
std::vector<Complex> fusion_coefficients(int d, int a, int b) {
    math::TransposeRelabel rel = math::weyl_transpose_relabel(d, -a, b);
    require(rel.a == math::mod(a, d) && rel.b == math::mod(b, d), ErrorCode::Numerical,
            "fusion_coefficients: transpose relabel did not return the requested label");
    math::ComplexVector bra = math::bell_state(d, -a, b);
    std::vector<Complex> c(static_cast<size_t>(d) * d);
    for (int i = 0; i < d * d; ++i) {
        c[i] = std::conj(bra(i)) / rel.phase;
    }
    return c;
}

}  // namespace

ComplexMatrix contract_kernel(const kernel::KernelMatrix &k, const BranchOutcome &beta) {
    const int n = k.n;
    const int d = k.d;
    require(beta.n() == n && beta.d() == d, ErrorCode::DimensionMismatch, "contract_kernel: shape mismatch");
    std::vector<std::vector<Complex>> coef(n);
    for (int t = 0; t < n; ++t) {
        coef[t] = fusion_coefficients(d, beta.a(t), beta.b(t));
    }
    const long dim = ipow(d, n);
    const double norm = std::pow(static_cast<double>(d), -0.5 * n);
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    std::vector<int> nu(n);
    for (long col = 0; col < dim; ++col) {
        auto alpha = kernel::basis_digits(col, n, d);
        const int r = alpha[n - 1];
        for (int l = 0; l < d; ++l) {
            Complex acc(0.0, 0.0);
            for (long row = 0; row < dim; ++row) {
                Complex kv = k.matrix(row, col);
                if (kv == Complex(0.0, 0.0)) {
                    continue;
                }
                long rem = row;
                for (int t = n - 1; t >= 0; --t) {
                    nu[t] = static_cast<int>(rem % d);
                    rem /= d;
                }
                Complex w = kv;
                for (int t = 0; t < n; ++t) {
                    int x = t == 0 ? l : alpha[t - 1];
                    w *= coef[t][static_cast<size_t>(x) * d + nu[t]];
                }
                acc += w;
            }
            out(r, l) += norm * acc;
        }
    }
    return out;
}

BranchOperator branch_operator_dense(const flo::PostSelectedSub &s, const BranchOutcome &beta, long dense_limit) {
    check_match(s, beta);
    kernel::KernelMatrix k = kernel::build_kernel(s, dense_limit);
    return {contract_kernel(k, beta), Route::DenseContraction};
}

AmplitudeTable amplitude_table(const flo::PostSelectedSub &s, int boundary_l, int boundary_r, long table_cap) {
    const int n = s.n();
    const int d = s.d();
    require(boundary_l >= 0 && boundary_l < d && boundary_r >= 0 && boundary_r < d, ErrorCode::InvalidConfig,
            "amplitude_table: boundary labels must lie in [0, d)");
    require(n <= 12, ErrorCode::Capacity, "amplitude_table: n exceeds 12");
    const long dd = static_cast<long>(d) * d;
    const long size = ipow(dd, n);
    require(size <= table_cap, ErrorCode::Capacity,
            "amplitude_table: d^(2n) = " + std::to_string(size) + " exceeds the table cap " + std::to_string(table_cap));

    // State over fusion pairs p_t = x_t * d + nu_t, t = 0 most significant,
    // where x_0 is the open input and x_t (t >= 1) the partner of input leg t-1.
    ComplexMatrix slice = kernel::kernel_slice_last_input(s.blocks, boundary_r);
    const double norm = std::pow(static_cast<double>(d), -0.5 * n);
    std::vector<Complex> state(static_cast<size_t>(size), Complex(0.0, 0.0));
    const long nu_dim = ipow(d, n);
    const long head_dim = ipow(d, n - 1);
    std::vector<int> x(n);
    for (long head = 0; head < head_dim; ++head) {
        auto tail = kernel::basis_digits(head, n - 1, d);
        x[0] = boundary_l;
        for (int t = 1; t < n; ++t) {
            x[t] = tail[t - 1];
        }
        for (long row = 0; row < nu_dim; ++row) {
            auto nu = kernel::basis_digits(row, n, d);
            long idx = 0;
            for (int t = 0; t < n; ++t) {
                idx = idx * dd + x[t] * d + nu[t];
            }
            state[idx] = norm * slice(row, head);
        }
    }

    // Per-pair rotation: out[beta] = sum_p c_beta[p] in[p].
    std::vector<std::vector<Complex>> rot(static_cast<size_t>(dd));
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            rot[static_cast<size_t>(a) * d + b] = fusion_coefficients(d, a, b);
        }
    }
    std::vector<Complex> buffer(static_cast<size_t>(size));
    std::vector<Complex> in(static_cast<size_t>(dd));
    for (int t = 0; t < n; ++t) {
        const long stride = ipow(dd, n - 1 - t);
        const long outer = size / (stride * dd);
        for (long o = 0; o < outer; ++o) {
            for (long i = 0; i < stride; ++i) {
                const long base = o * stride * dd + i;
                for (long p = 0; p < dd; ++p) {
                    in[p] = state[base + p * stride];
                }
                for (long q = 0; q < dd; ++q) {
                    Complex acc(0.0, 0.0);
                    const auto &c = rot[q];
                    for (long p = 0; p < dd; ++p) {
                        acc += c[p] * in[p];
                    }
                    buffer[base + q * stride] = acc;
                }
            }
        }
        state.swap(buffer);
    }

    AmplitudeTable table{n, d, boundary_l, boundary_r, std::move(state), 0.0};
    for (const Complex &amp : table.amplitudes) {
        table.normalization += std::norm(amp);
    }
    return table;
}

AmplitudeTable amplitude_table_pathcycle(const flo::PostSelectedSub &s, int boundary_l, int boundary_r) {
    const int n = s.n();
    const int d = s.d();
    const long size = ipow(static_cast<long>(d) * d, n);
    AmplitudeTable table{n, d, boundary_l, boundary_r, std::vector<Complex>(static_cast<size_t>(size)), 0.0};
    for (long idx = 0; idx < size; ++idx) {
        BranchOutcome beta = BranchOutcome::from_index(idx, n, d);
        ComplexMatrix t = branch_operator_pathcycle(s, beta).matrix;
        table.amplitudes[idx] = t(boundary_r, boundary_l);
        table.normalization += std::norm(table.amplitudes[idx]);
    }
    return table;
}

AmplitudeTable restrict_z_only(const AmplitudeTable &table) {
    const int n = table.n;
    const int d = table.d;
    const long size = ipow(d, n);
    AmplitudeTable out{n, d, table.boundary_l, table.boundary_r, std::vector<Complex>(static_cast<size_t>(size)), 0.0};
    for (long j = 0; j < size; ++j) {
        auto b = kernel::basis_digits(j, n, d);
        long full = 0;
        for (int t = 0; t < n; ++t) {
            full = full * d * d + b[t];
        }
        out.amplitudes[j] = table.amplitudes[full];
        out.normalization += std::norm(out.amplitudes[j]);
    }
    return out;
}

std::vector<double> conditional_distribution(const AmplitudeTable &table) {
    require(table.normalization > 0.0 && std::isfinite(table.normalization), ErrorCode::Degenerate,
            "conditional_distribution: every branch amplitude vanishes for this boundary");
    std::vector<double> p(table.amplitudes.size());
    for (size_t i = 0; i < p.size(); ++i) {
        p[i] = std::norm(table.amplitudes[i]) / table.normalization;
    }
    return p;
}

long sample_index(const std::vector<double> &p, math::RngStream &rng) {
    require(!p.empty(), ErrorCode::InvalidConfig, "sample_index: empty distribution");
    double u = rng.uniform();
    double acc = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) {
            return static_cast<long>(i);
        }
    }
    // Rounding left u above the final partial sum: return the last non-zero entry.
    for (size_t i = p.size(); i-- > 0;) {
        if (p[i] > 0.0) {
            return static_cast<long>(i);
        }
    }
    return static_cast<long>(p.size()) - 1;
}

flo::PostSelectedSub scalar_blocks(const ComplexMatrix &scalars, int d) {
    require(scalars.rows() == scalars.cols() && scalars.rows() >= 1, ErrorCode::DimensionMismatch,
            "scalar_blocks: need a square scalar matrix");
    const int n = static_cast<int>(scalars.rows());
    flo::PostSelectedSub out{BlockGrid(n, d)};
    for (int t = 0; t < n; ++t) {
        for (int k = 0; k < n; ++k) {
            out.blocks(t, k) = scalars(t, k) * ComplexMatrix::Identity(d, d);
        }
    }
    return out;
}

CommutingControl commuting_control_instance(int n, int d, math::RngStream &rng, double kappa) {
    require(d >= 2, ErrorCode::InvalidDimension, "commuting_control_instance: d must be >= 2");
    ComplexMatrix a = flo::scalar_post_selected(n, kappa, rng);
    BranchOutcome beta = BranchOutcome::z_only(n, d, rng);
    return {scalar_blocks(a, d), beta, a};
}

Complex fermionant(const ComplexMatrix &w, Complex k, int factorial_cap) {
    require(w.rows() == w.cols() && w.rows() >= 1, ErrorCode::DimensionMismatch, "fermionant: need a square matrix");
    const int n = static_cast<int>(w.rows());
    std::vector<Complex> kpow(static_cast<size_t>(n) + 1, Complex(1.0, 0.0));
    for (int c = 1; c <= n; ++c) {
        kpow[c] = kpow[c - 1] * k;
    }
    Complex total(0.0, 0.0);
    for (const math::Permutation &pi : math::permutations(n, factorial_cap)) {
        Complex prod = kpow[pi.cycle_count()];
        for (int t = 0; t < n; ++t) {
            prod *= w(t, pi(t));
        }
        total += pi.sign() > 0 ? prod : -prod;
    }
    return total;
}

Complex cyclic_closure(const flo::PostSelectedSub &s, const BranchOutcome &beta, int factorial_cap) {
    ComplexMatrix t = branch_operator_pathcycle(s, beta, factorial_cap).matrix;
    return t.trace() / static_cast<double>(s.d());
}

math::Permutation fixed_n_cycle(int n) {
    require(n >= 1, ErrorCode::InvalidDimension, "fixed_n_cycle: n must be >= 1");
    std::vector<int> images(n);
    for (int t = 0; t < n; ++t) {
        images[t] = t == 0 ? n - 1 : t - 1;
    }
    return math::Permutation(std::move(images));
}

ComplexMatrix shifted_matrix(const ComplexMatrix &scalars) {
    const int n = static_cast<int>(scalars.rows());
    math::Permutation inv = fixed_n_cycle(n).inverse();
    ComplexMatrix w(n, n);
    for (int t = 0; t < n; ++t) {
        w.row(t) = scalars.row(inv(t));
    }
    return w;
}

Complex cyclic_closure_fermionant_form(const ComplexMatrix &scalars, int d, int factorial_cap) {
    const int n = static_cast<int>(scalars.rows());
    Complex f = fermionant(shifted_matrix(scalars), Complex(d, 0.0), factorial_cap);
    double sign = fixed_n_cycle(n).sign();
    return sign * f / std::pow(static_cast<double>(d), n + 1);
}

}  // namespace ncflo::branch
