#pragma once

// Dense linear algebra and qubit-state primitives for the probe/ancilla pair.
//
// Conventions used throughout the library:
//   * single-qubit basis order is (|e>, |g>), so sigma_z = diag(+1, -1) and
//     sigma_- = |g><e|;
//   * two-qubit states are ordered probe (x) ancilla, index = 2 * probe + ancilla.

#include <complex>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "qmetro/error.hpp"

namespace qmetro {

using cplx = std::complex<double>;

using ComplexMatrix = Eigen::MatrixXcd;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

/// Bounds-checked element access. Out-of-range indices throw InvalidArgument.
cplx& at(ComplexMatrix& m, Eigen::Index row, Eigen::Index col);
const cplx& at(const ComplexMatrix& m, Eigen::Index row, Eigen::Index col);

namespace pauli {
Mat2 identity();
Mat2 x();
Mat2 y();
Mat2 z();
Mat2 lower();  // sigma_- = |g><e|
Mat2 raise();  // sigma_+ = |e><g|
}  // namespace pauli

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
Mat4 kron(const Mat2& a, const Mat2& b);

/// Largest elementwise |m - m^dagger|.
double hermiticity_drift(const ComplexMatrix& m);

/// Tolerances applied when a raw matrix is promoted to a DensityMatrix.
struct StateTolerance {
  double hermiticity = 1e-10;
  double trace = 1e-10;
  double min_eigenvalue = -1e-10;
};

/// Hermitian, unit-trace, positive semidefinite matrix of dimension 2 or 4.
///
/// Construction validates all three invariants and symmetrizes the stored
/// matrix as (m + m^dagger) / 2. A rejected matrix produces an
/// InvariantViolation error naming the failing invariant and its residual.
class DensityMatrix {
 public:
  explicit DensityMatrix(const ComplexMatrix& m, const StateTolerance& tol = {});

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  const cplx& operator()(Eigen::Index r, Eigen::Index c) const { return at(m_, r, c); }

  double purity() const;

 private:
  ComplexMatrix m_;
};

/// Eigen-decomposition of a (numerically) Hermitian matrix. Drift above
/// 1e-10 is rejected rather than symmetrized away.
Eigen::SelfAdjointEigenSolver<ComplexMatrix> hermitian_eigen(
    const ComplexMatrix& m, bool with_vectors = true,
    double drift_tolerance = 1e-10);

enum class Factor { Probe, Ancilla };

/// Raw partial trace of a 4x4 operator, no state validation. `traced`
/// names the factor that is removed.
Mat2 partial_trace(const Mat4& m, Factor traced);

/// Reduced probe state Tr_A(rho_s).
DensityMatrix partial_trace_ancilla(const DensityMatrix& rho_s);
/// Reduced ancilla state Tr_P(rho_s).
DensityMatrix partial_trace_probe(const DensityMatrix& rho_s);

/// D = 1/2 sum |eig(a - b)|.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
  double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
};

/// r_k = Tr(rho sigma_k) for any Hermitian 2x2 matrix (used for derivatives).
BlochVector bloch_components(const Mat2& m);

BlochVector bloch_from_density(const DensityMatrix& rho);
DensityMatrix density_from_bloch(const BlochVector& r);

/// Common single-qubit states in the (|e>, |g>) basis.
namespace states {
Mat2 excited();
Mat2 ground();
Mat2 plus();
Mat2 minus();
}  // namespace states

std::string describe(const ComplexMatrix& m);

}  // namespace qmetro
