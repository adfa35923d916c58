#include "qmetro/core.hpp"

#include <cmath>
#include <sstream>

namespace qmetro {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::InvariantViolation: return "invariant violation";
    case ErrorCode::DegenerateNullspace: return "degenerate nullspace";
    case ErrorCode::DegenerateMeasurement: return "degenerate measurement";
    case ErrorCode::Numerical: return "numerical failure";
    case ErrorCode::Config: return "configuration error";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Internal: return "internal error";
  }
  return "unknown error";
}

namespace {

void check_index(const ComplexMatrix& m, Eigen::Index row, Eigen::Index col) {
  if (row < 0 || col < 0 || row >= m.rows() || col >= m.cols()) {
    std::ostringstream os;
    os << "matrix index (" << row << ", " << col << ") out of range for "
       << m.rows() << "x" << m.cols() << " matrix";
    fail(ErrorCode::InvalidArgument, os.str());
  }
}

}  // namespace

cplx& at(ComplexMatrix& m, Eigen::Index row, Eigen::Index col) {
  check_index(m, row, col);
  return m(row, col);
}

const cplx& at(const ComplexMatrix& m, Eigen::Index row, Eigen::Index col) {
  check_index(m, row, col);
  return m(row, col);
}

namespace pauli {

Mat2 identity() { return Mat2::Identity(); }

Mat2 x() {
  Mat2 m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Mat2 y() {
  Mat2 m;
  m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
  return m;
}

Mat2 z() {
  Mat2 m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Mat2 lower() {
  Mat2 m = Mat2::Zero();
  m(1, 0) = 1.0;
  return m;
}

Mat2 raise() {
  Mat2 m = Mat2::Zero();
  m(0, 1) = 1.0;
  return m;
}

}  // namespace pauli

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.size() == 0 || b.size() == 0)
    fail(ErrorCode::InvalidArgument, "kron: empty operand");
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

double hermiticity_drift(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::SelfAdjointEigenSolver<ComplexMatrix> hermitian_eigen(
    const ComplexMatrix& m, bool with_vectors, double drift_tolerance) {
  const double drift = hermiticity_drift(m);
  if (!(drift <= drift_tolerance)) {
    std::ostringstream os;
    os << "matrix is not Hermitian: max |A - A^dagger| = " << drift
       << " exceeds " << drift_tolerance;
    fail(ErrorCode::InvariantViolation, os.str());
  }
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(
      sym, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
}

DensityMatrix::DensityMatrix(const ComplexMatrix& m, const StateTolerance& tol) {
  if (m.rows() != m.cols() || (m.rows() != 2 && m.rows() != 4)) {
    std::ostringstream os;
    os << "density matrix must be 2x2 or 4x4, got " << m.rows() << "x" << m.cols();
    fail(ErrorCode::InvariantViolation, os.str());
  }
  if (!m.allFinite())
    fail(ErrorCode::InvariantViolation, "density matrix has non-finite entries");

  const double drift = hermiticity_drift(m);
  if (drift > tol.hermiticity) {
    std::ostringstream os;
    os << "density matrix invariant 'hermitian' violated: max deviation " << drift;
    fail(ErrorCode::InvariantViolation, os.str());
  }
  m_ = 0.5 * (m + m.adjoint());

  const double trace_err = std::abs(m_.trace() - cplx(1.0));
  if (trace_err > tol.trace) {
    std::ostringstream os;
    os << "density matrix invariant 'unit trace' violated: |tr - 1| = " << trace_err;
    fail(ErrorCode::InvariantViolation, os.str());
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin < tol.min_eigenvalue) {
    std::ostringstream os;
    os << "density matrix invariant 'positive semidefinite' violated: min eigenvalue "
       << lmin;
    fail(ErrorCode::InvariantViolation, os.str());
  }
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

Mat2 partial_trace(const Mat4& m, Factor traced) {
  Mat2 out = Mat2::Zero();
  if (traced == Factor::Ancilla) {
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        out(p, q) = m(2 * p, 2 * q) + m(2 * p + 1, 2 * q + 1);
  } else {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) out(a, b) = m(a, b) + m(2 + a, 2 + b);
  }
  return out;
}

namespace {

DensityMatrix reduce(const DensityMatrix& rho_s, Factor traced) {
  if (rho_s.dim() != 4)
    fail(ErrorCode::InvalidArgument, "partial trace needs a 4x4 two-qubit state");
  const Mat4 m = rho_s.matrix();
  return DensityMatrix(partial_trace(m, traced));
}

}  // namespace

DensityMatrix partial_trace_ancilla(const DensityMatrix& rho_s) {
  return reduce(rho_s, Factor::Ancilla);
}

DensityMatrix partial_trace_probe(const DensityMatrix& rho_s) {
  return reduce(rho_s, Factor::Probe);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << "trace_distance: dimension mismatch " << a.dim() << " vs " << b.dim();
    fail(ErrorCode::InvalidArgument, os.str());
  }
  const ComplexMatrix diff = a.matrix() - b.matrix();
  auto es = hermitian_eigen(diff, false);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

BlochVector bloch_components(const Mat2& m) {
  // Tr(m sigma_x) = m01 + m10, Tr(m sigma_y) = i (m01 - m10), Tr(m sigma_z) = m00 - m11
  return {(m(0, 1) + m(1, 0)).real(), (cplx(0.0, 1.0) * (m(0, 1) - m(1, 0))).real(),
          (m(0, 0) - m(1, 1)).real()};
}

BlochVector bloch_from_density(const DensityMatrix& rho) {
  if (rho.dim() != 2)
    fail(ErrorCode::InvalidArgument, "Bloch vector needs a single-qubit state");
  const Mat2 m = rho.matrix();
  return bloch_components(m);
}

DensityMatrix density_from_bloch(const BlochVector& r) {
  const double n = r.norm();
  if (!(n <= 1.0 + 1e-10)) {
    std::ostringstream os;
    os << "Bloch vector is unphysical: |r| = " << n;
    fail(ErrorCode::InvalidArgument, os.str());
  }
  const Mat2 m =
      0.5 * (pauli::identity() + r.x * pauli::x() + r.y * pauli::y() + r.z * pauli::z());
  return DensityMatrix(m);
}

namespace states {

Mat2 excited() {
  Mat2 m = Mat2::Zero();
  m(0, 0) = 1.0;
  return m;
}

Mat2 ground() {
  Mat2 m = Mat2::Zero();
  m(1, 1) = 1.0;
  return m;
}

Mat2 plus() { return 0.5 * (pauli::identity() + pauli::x()); }
Mat2 minus() { return 0.5 * (pauli::identity() - pauli::x()); }

}  // namespace states

std::string describe(const ComplexMatrix& m) {
  std::ostringstream os;
  os.precision(6);
  os << m;
  return os.str();
}

}  // namespace qmetro
