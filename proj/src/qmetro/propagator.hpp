#pragma once

// Real representation of the generator in the two-qubit Pauli product basis
// P_mu = sigma_a (x) sigma_b, mu = 4 a + b, with sigma_0 = I. A Hermitian
// operator X has real coordinates r_mu = Tr(X P_mu) and X = 1/4 sum r_mu P_mu,
// so the generator becomes a real 16x16 matrix. The probe Bloch vector of
// Tr_A(X) sits at coordinates 4, 8 and 12.

#include "qmetro/dynamics.hpp"

namespace qmetro {

Mat4 pauli_product(int mu);

RealVec16 pauli_coordinates(const Mat4& x);
Mat4 from_pauli_coordinates(const RealVec16& r);

/// R[mu, nu] = 1/4 Tr(P_mu L(P_nu)). Throws InvariantViolation if L does not
/// preserve Hermiticity (imaginary part above 1e-12).
RealMat16 pauli_generator(const Liouvillian& l);

inline BlochVector probe_bloch(const RealVec16& r) { return {r(4), r(8), r(12)}; }
inline BlochVector ancilla_bloch(const RealVec16& r) { return {r(1), r(2), r(3)}; }

}  // namespace qmetro
