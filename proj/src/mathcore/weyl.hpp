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

#ifndef NCFLO_MATHCORE_WEYL_HPP
#define NCFLO_MATHCORE_WEYL_HPP

#include "mathcore/linalg.hpp"

namespace ncflo::math {

/// zeta^k with zeta = exp(2 pi i / d); k is reduced mod d first so repeated
/// powers are bitwise identical.
Complex root_of_unity(int d, long k);

inline int mod(long value, int d) {
    long r = value % d;
    return static_cast<int>(r < 0 ? r + d : r);
}

/// Generalized Pauli/Weyl operator D_(a,b) = X^a Z^b with X|k> = |k+1 mod d>
/// and Z|k> = zeta^k |k>.
struct WeylOp {
    int d = 2;
    int a = 0;
    int b = 0;
    ComplexMatrix matrix;
};

WeylOp weyl(int d, long a, long b);

/// D_(a,b)^T = phase * D_(a',b') with a' = -a, b' = b, phase = zeta^(-ab).
struct TransposeRelabel {
    Complex phase;
    int a;
    int b;
};
TransposeRelabel weyl_transpose_relabel(int d, long a, long b);

/// |Phi_(a,b)> = (1 (x) D_(a,b)^dagger)|Phi_d^+> on C^d (x) C^d, index x*d + y.
ComplexVector bell_state(int d, long a, long b);

/// Raw three-party Bell-projection update d^-1 xi^T D_beta^T psi. The result is
/// checked against a brute-force contraction of <Phi_beta|_12 with
/// psi_1 (x) (xi (x) 1)|Phi_d^+>_23; a mismatch above 1e-12 throws.
ComplexVector teleport_update(const ComplexVector &psi, const ComplexMatrix &xi, long a, long b);

/// The brute-force side of teleport_update on its own.
ComplexVector teleport_contract_direct(const ComplexVector &psi, const ComplexMatrix &xi, long a, long b);

/// d = 2 one-hot encode/decode gadget on the qubit pair (Q, f), basis index
/// 2*q + f. Encoder X_Q CNOT_{Q->f}; decoder CNOT_{Q->f}.
struct GadgetReport {
    ComplexVector encoded;       ///< E (payload (x) |0>)
    ComplexVector codeword;      ///< c0|1,0> + c1|0,1>
    ComplexVector decoded;       ///< D codeword
    double flag_one_probability;  ///< weight of decoded on f = 1
    ComplexVector decoded_payload;  ///< Q-amplitudes of decoded on f = 1
    int collision_flag;  ///< f after D |1,1>
    bool encode_ok;
    bool decode_ok;
    bool collision_ok;
};
ComplexMatrix cnot_q_to_f();
ComplexMatrix x_on_q();
GadgetReport encode_decode_check_d2(const ComplexVector &payload);

}  // namespace ncflo::math

#endif
