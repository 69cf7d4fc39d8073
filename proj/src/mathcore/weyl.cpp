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

#include "mathcore/weyl.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mathcore/error.hpp"

namespace ncflo::math {

Complex root_of_unity(int d, long k) {
    int r = mod(k, d);
    if (r == 0) {
        return {1.0, 0.0};
    }
    if (2 * r == d) {
        return {-1.0, 0.0};
    }
    return std::polar(1.0, 2.0 * std::numbers::pi * r / d);
}

WeylOp weyl(int d, long a, long b) {
    require(d >= 2, ErrorCode::InvalidDimension, "weyl: local dimension must be >= 2, got " + std::to_string(d));
    WeylOp op;
    op.d = d;
    op.a = mod(a, d);
    op.b = mod(b, d);
    // (X^a Z^b)|k> = zeta^(bk) |k + a>.
    op.matrix = ComplexMatrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        op.matrix((k + op.a) % d, k) = root_of_unity(d, static_cast<long>(op.b) * k);
    }
    return op;
}

TransposeRelabel weyl_transpose_relabel(int d, long a, long b) {
    require(d >= 2, ErrorCode::InvalidDimension, "weyl_transpose_relabel: local dimension must be >= 2");
    int ar = mod(a, d);
    int br = mod(b, d);
    return {root_of_unity(d, -static_cast<long>(ar) * br), mod(-ar, d), br};
}

ComplexVector bell_state(int d, long a, long b) {
    const ComplexMatrix &dm = weyl(d, a, b).matrix;
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    ComplexVector v(d * d);
    for (int x = 0; x < d; ++x) {
        for (int y = 0; y < d; ++y) {
            v(x * d + y) = std::conj(dm(x, y)) * norm;
        }
    }
    return v;
}

ComplexVector teleport_contract_direct(const ComplexVector &psi, const ComplexMatrix &xi, long a, long b) {
    const int d = static_cast<int>(psi.size());
    require(xi.rows() == d && xi.cols() == d, ErrorCode::DimensionMismatch,
            "teleport_update: xi must be d x d with d = len(psi)");
    ComplexVector bell = bell_state(d, a, b);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    // Three-party state psi_1 (x) (xi (x) 1)|Phi+>_23, index (r, u, k).
    std::vector<Complex> state(static_cast<size_t>(d) * d * d);
    for (int r = 0; r < d; ++r) {
        for (int u = 0; u < d; ++u) {
            for (int k = 0; k < d; ++k) {
                state[(r * d + u) * d + k] = psi(r) * xi(u, k) * norm;
            }
        }
    }
    ComplexVector out = ComplexVector::Zero(d);
    for (int r = 0; r < d; ++r) {
        for (int u = 0; u < d; ++u) {
            Complex bra = std::conj(bell(r * d + u));
            for (int k = 0; k < d; ++k) {
                out(k) += bra * state[(r * d + u) * d + k];
            }
        }
    }
    return out;
}

ComplexVector teleport_update(const ComplexVector &psi, const ComplexMatrix &xi, long a, long b) {
    const int d = static_cast<int>(psi.size());
    require(d >= 2, ErrorCode::InvalidDimension, "teleport_update: local dimension must be >= 2");
    require(xi.rows() == d && xi.cols() == d, ErrorCode::DimensionMismatch,
            "teleport_update: xi must be d x d with d = len(psi)");
    const ComplexMatrix &dm = weyl(d, a, b).matrix;
    ComplexVector out = (xi.transpose() * (dm.transpose() * psi)) / static_cast<double>(d);
    ComplexVector direct = teleport_contract_direct(psi, xi, a, b);
    double scale = std::max(1.0, psi.norm() * xi.norm());
    require((out - direct).norm() <= 1e-12 * scale, ErrorCode::Numerical,
            "teleport_update: closed form disagrees with the three-party contraction");
    return out;
}

ComplexMatrix cnot_q_to_f() {
    ComplexMatrix c = ComplexMatrix::Zero(4, 4);
    // |q, f> -> |q, f xor q>
    for (int q = 0; q < 2; ++q) {
        for (int f = 0; f < 2; ++f) {
            c(2 * q + (f ^ q), 2 * q + f) = 1.0;
        }
    }
    return c;
}

ComplexMatrix x_on_q() {
    ComplexMatrix x = ComplexMatrix::Zero(4, 4);
    for (int q = 0; q < 2; ++q) {
        for (int f = 0; f < 2; ++f) {
            x(2 * (1 - q) + f, 2 * q + f) = 1.0;
        }
    }
    return x;
}

GadgetReport encode_decode_check_d2(const ComplexVector &payload) {
    require(payload.size() == 2, ErrorCode::DimensionMismatch, "encode_decode_check_d2: payload must be a 2-vector");
    require(std::abs(payload.norm() - 1.0) <= 1e-12, ErrorCode::Normalization,
            "encode_decode_check_d2: payload must be normalized");
    const Complex c0 = payload(0);
    const Complex c1 = payload(1);
    const ComplexMatrix encoder = x_on_q() * cnot_q_to_f();
    const ComplexMatrix decoder = cnot_q_to_f();

    GadgetReport rep;
    ComplexVector input = ComplexVector::Zero(4);
    input(0) = c0;  // |0, 0>
    input(2) = c1;  // |1, 0>
    rep.encoded = encoder * input;

    rep.codeword = ComplexVector::Zero(4);
    rep.codeword(2) = c0;  // |1, 0>
    rep.codeword(1) = c1;  // |0, 1>
    rep.decoded = decoder * rep.codeword;

    rep.flag_one_probability = std::norm(rep.decoded(1)) + std::norm(rep.decoded(3));
    rep.decoded_payload = ComplexVector(2);
    rep.decoded_payload << rep.decoded(1), rep.decoded(3);

    ComplexVector expected_decoded = ComplexVector::Zero(4);
    expected_decoded(3) = c0;  // c0 |1>_Q |1>_f
    expected_decoded(1) = c1;  // c1 |0>_Q |1>_f

    ComplexVector collision = ComplexVector::Zero(4);
    collision(3) = 1.0;
    ComplexVector collision_out = decoder * collision;
    rep.collision_flag = std::norm(collision_out(0)) + std::norm(collision_out(2)) > 0.5 ? 0 : 1;

    rep.encode_ok = (rep.encoded - rep.codeword).norm() == 0.0;
    rep.decode_ok = (rep.decoded - expected_decoded).norm() == 0.0;
    rep.collision_ok = rep.collision_flag == 0;
    return rep;
}

}  // namespace ncflo::math
