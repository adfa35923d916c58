#include "qmetro/propagator.hpp"

#include <array>
#include <sstream>

namespace qmetro {
namespace {

const std::array<Mat2, 4>& single_paulis() {
  static const std::array<Mat2, 4> p = {pauli::identity(), pauli::x(), pauli::y(),
                                        pauli::z()};
  return p;
}

const std::array<Mat4, 16>& products() {
  static const std::array<Mat4, 16> table = [] {
    std::array<Mat4, 16> t;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) t[4 * a + b] = kron(single_paulis()[a], single_paulis()[b]);
    return t;
  }();
  return table;
}

}  // namespace

Mat4 pauli_product(int mu) {
  if (mu < 0 || mu > 15) fail(ErrorCode::InvalidArgument, "Pauli index out of range");
  return products()[mu];
}

RealVec16 pauli_coordinates(const Mat4& x) {
  RealVec16 r;
  // Tr(X P) = sum_ij X_ij P_ji
  for (int mu = 0; mu < 16; ++mu)
    r(mu) = (x.cwiseProduct(products()[mu].transpose())).sum().real();
  return r;
}

Mat4 from_pauli_coordinates(const RealVec16& r) {
  Mat4 x = Mat4::Zero();
  for (int mu = 0; mu < 16; ++mu) x += r(mu) * products()[mu];
  return 0.25 * x;
}

RealMat16 pauli_generator(const Liouvillian& l) {
  RealMat16 out;
  double max_imag = 0.0;
  for (int nu = 0; nu < 16; ++nu) {
    const Mat4 image = l.apply(products()[nu]);
    for (int mu = 0; mu < 16; ++mu) {
      const cplx v = 0.25 * (image.cwiseProduct(products()[mu].transpose())).sum();
      out(mu, nu) = v.real();
      max_imag = std::max(max_imag, std::abs(v.imag()));
    }
  }
  if (max_imag > 1e-12) {
    std::ostringstream os;
    os << "generator does not preserve Hermiticity: imaginary residue " << max_imag;
    fail(ErrorCode::InvariantViolation, os.str());
  }
  return out;
}

}  // namespace qmetro
