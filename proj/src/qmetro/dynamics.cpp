#include "qmetro/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace qmetro {

Vec16 vectorize(const Mat4& rho) { return Eigen::Map<const Vec16>(rho.data()); }

Mat4 unvectorize(const Vec16& v) { return Eigen::Map<const Mat4>(v.data()); }

Mat16 kron(const Mat4& a, const Mat4& b) {
  Mat16 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  return out;
}

Mat16 commutator_superoperator(const Mat4& h) {
  const Mat4 id = Mat4::Identity();
  // vec(H X) = (I (x) H) vec X,  vec(X H) = (H^T (x) I) vec X
  return cplx(0.0, -1.0) * (kron(id, h) - kron(h.transpose().eval(), id));
}

Mat16 dissipator_superoperator(const Mat4& a) {
  const Mat4 id = Mat4::Identity();
  const Mat4 ada = a.adjoint() * a;
  return kron(a.conjugate().eval(), a) - 0.5 * kron(id, ada) -
         0.5 * kron(ada.transpose().eval(), id);
}

namespace {

void check_buildable(const SystemParams& p) {
  const bool finite = std::isfinite(p.omega_p) && std::isfinite(p.omega_a) &&
                      std::isfinite(p.g) && std::isfinite(p.gamma) &&
                      std::isfinite(p.temperature);
  if (!finite) fail(ErrorCode::InvalidArgument, "Liouvillian: non-finite parameter");
  if (p.g < 0.0 || p.gamma < 0.0) {
    std::ostringstream os;
    os << "Liouvillian: couplings must be non-negative (g = " << p.g
       << ", gamma = " << p.gamma << ")";
    fail(ErrorCode::InvalidArgument, os.str());
  }
}

}  // namespace

Liouvillian Liouvillian::build(const SystemParams& p) {
  check_buildable(p);
  Mat16 m = commutator_superoperator(total_hamiltonian(p));
  if (p.gamma > 0.0) {
    const DecayRates rates = decay_rates(p);
    const Mat4 down = kron(pauli::identity(), pauli::lower());
    const Mat4 up = kron(pauli::identity(), pauli::raise());
    m += rates.down * dissipator_superoperator(down);
    if (rates.up > 0.0) m += rates.up * dissipator_superoperator(up);
  }

  Liouvillian l(m, p);
  const double residual = l.trace_residual();
  if (!(residual < 1e-10)) {
    std::ostringstream os;
    os << "Liouvillian is not trace preserving: residual " << residual;
    fail(ErrorCode::InvariantViolation, os.str());
  }

  Eigen::ComplexEigenSolver<Mat16> es(m, false);
  const auto& ev = es.eigenvalues();
  const double smallest = ev.cwiseAbs().minCoeff();
  const double max_real = ev.real().maxCoeff();
  if (!(smallest < 1e-8)) {
    std::ostringstream os;
    os << "Liouvillian has no stationary state: smallest |lambda| = " << smallest;
    fail(ErrorCode::InvariantViolation, os.str());
  }
  if (!(max_real <= 1e-10)) {
    std::ostringstream os;
    os << "Liouvillian has a growing mode: max Re(lambda) = " << max_real;
    fail(ErrorCode::InvariantViolation, os.str());
  }
  return l;
}

double Liouvillian::trace_residual() const {
  Eigen::Matrix<cplx, 1, 16> row = Eigen::Matrix<cplx, 1, 16>::Zero();
  for (int i = 0; i < 4; ++i) row(i + 4 * i) = 1.0;
  return (row * m_).cwiseAbs().maxCoeff();
}

TimeGrid linear_grid(double horizon, std::size_t points) {
  if (!(horizon > 0.0) || points < 2)
    fail(ErrorCode::InvalidArgument, "linear_grid: need horizon > 0 and points >= 2");
  TimeGrid t(points);
  const double h = horizon / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) t[k] = h * static_cast<double>(k);
  t.back() = horizon;
  return t;
}

TimeGrid log_grid(double horizon, std::size_t points, double t_min) {
  if (!(horizon > t_min) || !(t_min > 0.0) || points < 3)
    fail(ErrorCode::InvalidArgument,
         "log_grid: need horizon > t_min > 0 and points >= 3");
  TimeGrid t(points);
  t[0] = 0.0;
  const double a = std::log10(t_min);
  const double b = std::log10(horizon);
  const std::size_t n = points - 1;
  for (std::size_t k = 0; k < n; ++k)
    t[k + 1] = std::pow(10.0, a + (b - a) * static_cast<double>(k) /
                                      static_cast<double>(n - 1));
  t.back() = horizon;
  return t;
}

TimeGrid default_grid(double horizon) {
  return horizon > 1e3 ? log_grid(horizon, 2000) : linear_grid(horizon, 2000);
}

void validate_grid(const TimeGrid& times) {
  if (times.empty()) fail(ErrorCode::InvalidArgument, "time grid is empty");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k]) || times[k] < 0.0) {
      std::ostringstream os;
      os << "time grid entry " << k << " = " << times[k] << " is not a finite time >= 0";
      fail(ErrorCode::InvalidArgument, os.str());
    }
    if (k > 0 && !(times[k] > times[k - 1])) {
      std::ostringstream os;
      os << "time grid is not strictly increasing at index " << k << " (" << times[k - 1]
         << " -> " << times[k] << ")";
      fail(ErrorCode::InvalidArgument, os.str());
    }
  }
}

namespace {

// Steps a vectorized operator across the grid, reusing exp(L dt) while the
// step size is unchanged.
template <typename Visit>
void step_through(const Liouvillian& l, Vec16 v, const TimeGrid& times,
                  std::size_t& propagators, Visit&& visit) {
  validate_grid(times);
  double t_prev = 0.0;
  double dt_cached = -1.0;
  Mat16 step;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double dt = times[k] - t_prev;
    if (dt > 0.0) {
      if (!(std::abs(dt - dt_cached) <= 1e-12 * dt)) {
        step = expm((l.matrix() * dt).eval());
        dt_cached = dt;
        ++propagators;
      }
      v = step * v;
      if (!v.allFinite()) {
        std::ostringstream os;
        os << "propagation produced non-finite entries at t = " << times[k];
        fail(ErrorCode::Numerical, os.str());
      }
    }
    t_prev = times[k];
    visit(k, v);
  }
}

}  // namespace

Trajectory evolve(const Liouvillian& l, const DensityMatrix& rho0, const TimeGrid& times,
                  const EvolveOptions& opts) {
  if (rho0.dim() != 4) fail(ErrorCode::InvalidArgument, "evolve needs a 4x4 initial state");
  Trajectory traj;
  traj.times = times;
  traj.states.reserve(times.size());
  const Mat4 r0 = rho0.matrix();
  step_through(l, vectorize(r0), times, traj.stats.propagators,
               [&](std::size_t k, Vec16& v) {
                 Mat4 rho = unvectorize(v);
                 const double drift = std::abs(rho.trace() - cplx(1.0));
                 traj.stats.max_trace_drift = std::max(traj.stats.max_trace_drift, drift);
                 if (drift > opts.trace_tolerance) {
                   std::ostringstream os;
                   os << "trace drift " << drift << " at t = " << times[k];
                   fail(ErrorCode::Numerical, os.str());
                 }
                 if (drift > opts.renormalize_above) {
                   rho /= rho.trace();
                   v = vectorize(rho);
                   ++traj.stats.renormalizations;
                 }
                 const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
                 traj.stats.max_hermiticity_drift =
                     std::max(traj.stats.max_hermiticity_drift, herm);
                 if (herm > opts.hermiticity_tolerance) {
                   std::ostringstream os;
                   os << "hermiticity drift " << herm << " at t = " << times[k];
                   fail(ErrorCode::Numerical, os.str());
                 }
                 if (opts.check_positivity) {
                   const Mat4 sym = 0.5 * (rho + rho.adjoint());
                   Eigen::SelfAdjointEigenSolver<Mat4> es(sym, Eigen::EigenvaluesOnly);
                   const double lmin = es.eigenvalues().minCoeff();
                   traj.stats.min_eigenvalue = std::min(traj.stats.min_eigenvalue, lmin);
                   if (lmin < -opts.positivity_tolerance) {
                     std::ostringstream os;
                     os << "positivity drift: eigenvalue " << lmin << " at t = " << times[k];
                     fail(ErrorCode::Numerical, os.str());
                   }
                 }
                 traj.states.push_back(rho);
               });
  return traj;
}

std::vector<Mat4> propagate(const Liouvillian& l, const Mat4& x0, const TimeGrid& times) {
  std::vector<Mat4> out;
  out.reserve(times.size());
  std::size_t count = 0;
  step_through(l, vectorize(x0), times, count,
               [&](std::size_t, Vec16& v) { out.push_back(unvectorize(v)); });
  return out;
}

SteadyState steady_state(const Liouvillian& l, double gap_tolerance) {
  Eigen::ComplexEigenSolver<Mat16> es(l.matrix(), false);
  const auto& ev = es.eigenvalues();
  std::array<int, 16> order;
  for (int i = 0; i < 16; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::abs(ev(a)) < std::abs(ev(b)); });
  const double smallest = std::abs(ev(order[0]));
  const double second = std::abs(ev(order[1]));
  if (!(second > gap_tolerance)) {
    std::ostringstream os;
    os << "stationary state is not unique: two eigenvalues near zero, |lambda_0| = "
       << smallest << ", |lambda_1| = " << second;
    fail(ErrorCode::DegenerateNullspace, os.str());
  }

  // unique kernel: solve [L; vec(I)^T] x = [0; 1], which is more accurate than
  // the eigenvector itself
  ComplexMatrix a = ComplexMatrix::Zero(17, 16);
  a.topRows(16) = l.matrix();
  for (int i = 0; i < 4; ++i) a(16, i + 4 * i) = 1.0;
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(17);
  b(16) = 1.0;
  const Eigen::ColPivHouseholderQR<ComplexMatrix> qr(a);
  Vec16 x = qr.solve(b);
  // two rounds of refinement with the residual accumulated in long double
  using lcplx = std::complex<long double>;
  for (int round = 0; round < 2; ++round) {
    Eigen::VectorXcd r(17);
    for (int i = 0; i < 17; ++i) {
      lcplx acc = i == 16 ? lcplx(1.0L) : lcplx(0.0L);
      for (int j = 0; j < 16; ++j) acc -= lcplx(a(i, j)) * lcplx(x(j));
      r(i) = cplx(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }
    x += Vec16(qr.solve(r));
  }
  Mat4 rho = unvectorize(x);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const cplx tr = rho.trace();
  if (std::abs(tr) < 1e-12)
    fail(ErrorCode::Numerical, "null vector of L has vanishing trace");
  rho /= tr;

  const double residual = (l.matrix() * vectorize(rho)).cwiseAbs().maxCoeff();
  if (!(residual < 1e-10)) {
    std::ostringstream os;
    os << "steady state residual " << residual << " exceeds 1e-10";
    fail(ErrorCode::Numerical, os.str());
  }
  return {DensityMatrix(rho), residual, second};
}

std::vector<DensityMatrix> reduce_probe(const Trajectory& traj) {
  std::vector<DensityMatrix> out;
  out.reserve(traj.states.size());
  const StateTolerance tol{1e-8, 1e-8, -1e-8};
  for (const Mat4& rho : traj.states)
    out.emplace_back(partial_trace(rho, Factor::Ancilla), tol);
  return out;
}

DensityMatrix product_state(const Mat2& probe, const Mat2& ancilla) {
  return DensityMatrix(kron(probe, ancilla));
}

}  // namespace qmetro
