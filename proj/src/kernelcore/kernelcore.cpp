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

#include "kernelcore/kernelcore.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "mathcore/error.hpp"

namespace ncflo::kernel {

long ipow(long base, int exp) {
    long r = 1;
    for (int i = 0; i < exp; ++i) {
        r *= base;
    }
    return r;
}

long basis_index(std::span<const int> digits, int d) {
    long idx = 0;
    for (int v : digits) {
        idx = idx * d + v;
    }
    return idx;
}

std::vector<int> basis_digits(long index, int n, int d) {
    std::vector<int> digits(n);
    for (int t = n - 1; t >= 0; --t) {
        digits[t] = static_cast<int>(index % d);
        index /= d;
    }
    return digits;
}

namespace {

/// Signed sum over bijections rows -> columns of prod_t m(t, col), with the
/// sign of the bijection. m is supplied as a dense n x n scratch matrix.
Complex signed_assignment_sum(const ComplexMatrix &m, std::vector<Complex> &scratch) {
    const int n = static_cast<int>(m.rows());
    const unsigned full = (1u << n) - 1u;
    scratch.assign(static_cast<size_t>(full) + 1, Complex(0.0, 0.0));
    scratch[0] = 1.0;
    // Masks are processed in increasing order so every predecessor (a subset)
    // is final before it is extended.
    for (unsigned mask = 0; mask < full; ++mask) {
        Complex base = scratch[mask];
        if (base == Complex(0.0, 0.0)) {
            continue;
        }
        int row = std::popcount(mask);
        for (int k = 0; k < n; ++k) {
            unsigned bit = 1u << k;
            if (mask & bit) {
                continue;
            }
            // Inversions added by placing column k after the used columns larger than k.
            int larger = std::popcount(mask >> (k + 1));
            Complex term = base * m(row, k);
            scratch[mask | bit] += (larger % 2 == 0) ? term : -term;
        }
    }
    return scratch[full];
}

void check_kernel_capacity(int n, int d, long dense_limit, int factorial_cap) {
    require(n >= 1, ErrorCode::InvalidDimension, "build_kernel: n must be >= 1");
    require(n <= factorial_cap, ErrorCode::Capacity,
            "build_kernel: n = " + std::to_string(n) + " exceeds the factorial cap " + std::to_string(factorial_cap));
    require(ipow(d, n) <= dense_limit, ErrorCode::Capacity,
            "build_kernel: d^n = " + std::to_string(ipow(d, n)) + " exceeds the dense limit " +
                std::to_string(dense_limit));
}

}  // namespace

Complex kernel_entry(const math::BlockGrid &s, std::span<const int> nu, std::span<const int> alpha) {
    const int n = s.n();
    require(static_cast<int>(nu.size()) == n && static_cast<int>(alpha.size()) == n, ErrorCode::DimensionMismatch,
            "kernel_entry: index tuples must have length n");
    ComplexMatrix m(n, n);
    for (int t = 0; t < n; ++t) {
        for (int k = 0; k < n; ++k) {
            m(t, k) = s.entry(t, k, nu[t], alpha[k]);
        }
    }
    std::vector<Complex> scratch;
    return signed_assignment_sum(m, scratch);
}

KernelMatrix build_kernel(const flo::PostSelectedSub &sub, long dense_limit, int factorial_cap) {
    const math::BlockGrid &s = sub.blocks;
    const int n = s.n();
    const int d = s.d();
    check_kernel_capacity(n, d, dense_limit, factorial_cap);
    const long dim = ipow(d, n);
    KernelMatrix km{n, d, ComplexMatrix::Zero(dim, dim)};
    ComplexMatrix m(n, n);
    std::vector<Complex> scratch;
    for (long col = 0; col < dim; ++col) {
        auto alpha = basis_digits(col, n, d);
        for (long row = 0; row < dim; ++row) {
            auto nu = basis_digits(row, n, d);
            for (int t = 0; t < n; ++t) {
                for (int k = 0; k < n; ++k) {
                    m(t, k) = s.entry(t, k, nu[t], alpha[k]);
                }
            }
            km.matrix(row, col) = signed_assignment_sum(m, scratch);
        }
    }
    return km;
}

ComplexMatrix kernel_slice_last_input(const math::BlockGrid &s, int last_label) {
    const int n = s.n();
    const int d = s.d();
    require(last_label >= 0 && last_label < d, ErrorCode::InvalidConfig, "kernel_slice_last_input: label out of range");
    require(n <= 20, ErrorCode::Capacity, "kernel_slice_last_input: n too large");
    const long rows = ipow(d, n);
    const long cols = ipow(d, n - 1);
    ComplexMatrix out(rows, cols);
    ComplexMatrix m(n, n);
    std::vector<Complex> scratch;
    std::vector<int> alpha(n);
    for (long col = 0; col < cols; ++col) {
        auto head = basis_digits(col, n - 1, d);
        std::copy(head.begin(), head.end(), alpha.begin());
        alpha[n - 1] = last_label;
        for (long row = 0; row < rows; ++row) {
            auto nu = basis_digits(row, n, d);
            for (int t = 0; t < n; ++t) {
                for (int k = 0; k < n; ++k) {
                    m(t, k) = s.entry(t, k, nu[t], alpha[k]);
                }
            }
            out(row, col) = signed_assignment_sum(m, scratch);
        }
    }
    return out;
}

std::vector<int> apply_permutation_operator(const Permutation &sigma, std::span<const int> digits) {
    const int n = sigma.size();
    require(static_cast<int>(digits.size()) == n, ErrorCode::DimensionMismatch,
            "apply_permutation_operator: tuple length must equal n");
    Permutation inv = sigma.inverse();
    std::vector<int> out(n);
    for (int i = 0; i < n; ++i) {
        out[i] = digits[inv(i)];
    }
    return out;
}

ComplexMatrix permutation_operator(const Permutation &sigma, int d) {
    const int n = sigma.size();
    const long dim = ipow(d, n);
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    for (long col = 0; col < dim; ++col) {
        auto in = basis_digits(col, n, d);
        auto out = apply_permutation_operator(sigma, in);
        p(basis_index(out, d), col) = 1.0;
    }
    return p;
}

Complex slater_amplitude(const flo::PropagatorBlocks &v, std::span<const Mode> inputs, std::span<const Mode> outputs) {
    require(inputs.size() == outputs.size() && !inputs.empty(), ErrorCode::DimensionMismatch,
            "slater_amplitude: need equally many (>= 1) input and output modes");
    const int d = v.d();
    auto flatten = [&](std::span<const Mode> modes, const char *which) {
        std::vector<int> flat;
        for (const Mode &md : modes) {
            require(md.block >= 0 && md.block < v.m() && md.label >= 0 && md.label < d, ErrorCode::InvalidConfig,
                    std::string("slater_amplitude: ") + which + " mode out of range");
            flat.push_back(md.block * d + md.label);
        }
        return flat;
    };
    // Parity of the sort, by counting inversions; repeated modes are caught here.
    auto sort_with_parity = [](std::vector<int> &flat, const char *which) {
        int inversions = 0;
        for (size_t i = 0; i < flat.size(); ++i) {
            for (size_t j = i + 1; j < flat.size(); ++j) {
                require(flat[i] != flat[j], ErrorCode::PauliExclusion,
                        std::string("slater_amplitude: repeated ") + which + " mode");
                inversions += flat[i] > flat[j] ? 1 : 0;
            }
        }
        std::sort(flat.begin(), flat.end());
        return inversions % 2 == 0 ? 1 : -1;
    };
    auto in = flatten(inputs, "input");
    auto out = flatten(outputs, "output");
    int sign = sort_with_parity(in, "input") * sort_with_parity(out, "output");
    const int n = static_cast<int>(in.size());
    ComplexMatrix minor(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            minor(r, c) = v.matrix()(out[r], in[c]);
        }
    }
    Complex det = n == 1 ? minor(0, 0) : minor.partialPivLu().determinant();
    return static_cast<double>(sign) * det;
}

PathCycle path_cycle_decompose(const Permutation &sigma) {
    const int n = sigma.size();
    PathCycle pc{sigma, {}, {}, {}, {}};
    std::vector<char> visited(static_cast<size_t>(n) + 1, 0);
    int vertex = 0;
    pc.path_vertices.push_back(0);
    visited[0] = 1;
    while (vertex != n) {
        int step = vertex;
        pc.path_steps.push_back(step);
        vertex = sigma(step) + 1;
        pc.path_vertices.push_back(vertex);
        visited[vertex] = 1;
    }
    for (int start = 1; start < n; ++start) {
        if (visited[start]) {
            continue;
        }
        std::vector<int> steps;
        std::vector<int> verts;
        int v = start;
        do {
            visited[v] = 1;
            verts.push_back(v);
            steps.push_back(v);
            v = sigma(v) + 1;
        } while (v != start);
        pc.cycle_steps.push_back(std::move(steps));
        pc.cycle_vertices.push_back(std::move(verts));
    }
    return pc;
}

Permutation PathCycle::reconstruct() const {
    const int n = static_cast<int>(path_vertices.size()) - 1 +
                  std::accumulate(cycle_steps.begin(), cycle_steps.end(), 0,
                                  [](int acc, const std::vector<int> &c) { return acc + static_cast<int>(c.size()); });
    std::vector<int> images(n, -1);
    for (size_t i = 0; i < path_steps.size(); ++i) {
        images[path_steps[i]] = path_vertices[i + 1] - 1;
    }
    for (size_t c = 0; c < cycle_steps.size(); ++c) {
        const auto &steps = cycle_steps[c];
        const auto &verts = cycle_vertices[c];
        for (size_t i = 0; i < steps.size(); ++i) {
            int next = verts[(i + 1) % verts.size()];
            images[steps[i]] = next - 1;
        }
    }
    return Permutation(std::move(images));
}

}  // namespace ncflo::kernel
