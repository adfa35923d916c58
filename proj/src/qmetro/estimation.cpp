#include "qmetro/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/QR>

namespace qmetro {

std::string_view to_string(EstimationTarget t) {
  switch (t) {
    case EstimationTarget::Temperature: return "temperature";
    case EstimationTarget::AncillaFrequency: return "omega_a";
    case EstimationTarget::BathCoupling: return "gamma";
  }
  return "?";
}

std::optional<EstimationTarget> parse_target(std::string_view name) {
  if (name == "temperature" || name == "T") return EstimationTarget::Temperature;
  if (name == "omega_a" || name == "omega_A") return EstimationTarget::AncillaFrequency;
  if (name == "gamma") return EstimationTarget::BathCoupling;
  return std::nullopt;
}

double target_value(const SystemParams& p, EstimationTarget t) {
  switch (t) {
    case EstimationTarget::Temperature: return p.temperature;
    case EstimationTarget::AncillaFrequency: return p.omega_a;
    case EstimationTarget::BathCoupling: return p.gamma;
  }
  fail(ErrorCode::Internal, "unknown estimation target");
}

SystemParams with_target(SystemParams p, EstimationTarget t, double value) {
  switch (t) {
    case EstimationTarget::Temperature: p.temperature = value; break;
    case EstimationTarget::AncillaFrequency: p.omega_a = value; break;
    case EstimationTarget::BathCoupling: p.gamma = value; break;
  }
  return p;
}

std::string_view to_string(Subsystem s) {
  switch (s) {
    case Subsystem::Probe: return "probe";
    case Subsystem::Ancilla: return "ancilla";
    case Subsystem::Full: return "full";
  }
  return "?";
}

std::optional<Subsystem> parse_subsystem(std::string_view name) {
  if (name == "probe" || name == "P") return Subsystem::Probe;
  if (name == "ancilla" || name == "A") return Subsystem::Ancilla;
  if (name == "full" || name == "S" || name == "system") return Subsystem::Full;
  return std::nullopt;
}

std::string_view to_string(SteadyDerivativeMethod m) {
  switch (m) {
    case SteadyDerivativeMethod::FiniteDifference: return "finite-difference";
    case SteadyDerivativeMethod::LinearResponse: return "linear-response";
    case SteadyDerivativeMethod::Automatic: return "automatic";
  }
  return "?";
}

namespace {

constexpr double kPureGap = 1e-10;

// renormalized trajectories leave O(1e-12 / h) trace noise in the quotient
Mat4 traceless_hermitian(const Mat4& d) {
  Mat4 out = 0.5 * (d + d.adjoint());
  out -= Mat4::Identity() * (out.trace() / 4.0);
  return out;
}

double fd_step(double theta, const DerivativeOptions& opts) {
  if (!(opts.relative_step > 0.0) || !(opts.step_floor > 0.0))
    fail(ErrorCode::InvalidArgument, "derivative step settings must be positive");
  return opts.relative_step * std::max(std::abs(theta), opts.step_floor);
}

void check_perturbable(const SystemParams& p, EstimationTarget target, double h) {
  const double theta = target_value(p, target);
  if (!std::isfinite(theta)) fail(ErrorCode::InvalidArgument, "target parameter is not finite");
  if (theta - h <= 0.0) {
    std::ostringstream os;
    os << to_string(target) << " = " << theta
       << " is too close to 0 for a two-sided difference with step " << h;
    fail(ErrorCode::InvalidArgument, os.str());
  }
}

double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

double relative_discrepancy(const Mat4& d_h, const Mat4& d_half, double floor) {
  return max_abs(d_h - d_half) / std::max(max_abs(d_half), floor);
}

void report_richardson(const char* where, double t, double disc, const Mat4& d_h,
                       const Mat4& d_half) {
  std::ostringstream os;
  os << where << ": Richardson discrepancy " << disc << " at t = " << t
     << "\nstep h estimate:\n"
     << describe(d_h) << "\nstep h/2 estimate:\n"
     << describe(d_half);
  fail(ErrorCode::Numerical, os.str());
}

void merge_stats(TrajectoryStats& into, const TrajectoryStats& s) {
  into.max_trace_drift = std::max(into.max_trace_drift, s.max_trace_drift);
  into.max_hermiticity_drift = std::max(into.max_hermiticity_drift, s.max_hermiticity_drift);
  into.min_eigenvalue = std::min(into.min_eigenvalue, s.min_eigenvalue);
  into.renormalizations += s.renormalizations;
  into.propagators += s.propagators;
}

Trajectory run(const SystemParams& p, const DensityMatrix& rho0, const TimeGrid& times) {
  return evolve(Liouvillian::build(p), rho0, times);
}

}  // namespace

StateDerivative state_derivative(const SystemParams& p, EstimationTarget target,
                                 const DensityMatrix& rho0, const TimeGrid& times,
                                 const DerivativeOptions& opts) {
  validate_grid(times);
  const double theta = target_value(p, target);
  const double h = fd_step(theta, opts);
  check_perturbable(p, target, h);

  StateDerivative out;
  out.times = times;
  out.step = h;

  Trajectory centre = run(p, rho0, times);
  const Trajectory plus = run(with_target(p, target, theta + h), rho0, times);
  const Trajectory minus = run(with_target(p, target, theta - h), rho0, times);
  const Trajectory plus2 = run(with_target(p, target, theta + 0.5 * h), rho0, times);
  const Trajectory minus2 = run(with_target(p, target, theta - 0.5 * h), rho0, times);
  out.stats = centre.stats;
  for (const Trajectory* t : {&plus, &minus, &plus2, &minus2}) merge_stats(out.stats, t->stats);

  const std::size_t n = times.size();
  out.rho = std::move(centre.states);
  out.drho.resize(n);
  out.discrepancy.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Mat4 d_h = traceless_hermitian((plus.states[k] - minus.states[k]) / (2.0 * h));
    const Mat4 d_half = traceless_hermitian((plus2.states[k] - minus2.states[k]) / h);
    const double disc = relative_discrepancy(d_h, d_half, opts.noise_floor);
    out.drho[k] = d_h;
    out.discrepancy[k] = disc;
    out.max_discrepancy = std::max(out.max_discrepancy, disc);
    if (!(disc <= opts.richardson_tolerance)) {
      if (opts.strict) report_richardson("state derivative", times[k], disc, d_h, d_half);
      ++out.richardson_failures;
    }
  }
  return out;
}

double qfi_bloch(const DensityMatrix& rho, const Mat2& drho) {
  if (rho.dim() != 2) fail(ErrorCode::InvalidArgument, "qfi_bloch needs a qubit state");
  if (!drho.allFinite()) fail(ErrorCode::InvalidArgument, "qfi_bloch: derivative is not finite");
  const double scale = std::max(1.0, drho.cwiseAbs().maxCoeff());
  if (std::abs(drho.trace()) > 1e-8 * scale || hermiticity_drift(drho) > 1e-8 * scale) {
    std::ostringstream os;
    os << "qfi_bloch: derivative must be traceless and Hermitian (trace " << drho.trace()
       << ", drift " << hermiticity_drift(drho) << ")";
    fail(ErrorCode::InvalidArgument, os.str());
  }
  const BlochVector r = bloch_from_density(rho);
  const BlochVector dr = bloch_components(drho);
  const double first = dr.dot(dr);
  const double gap = 1.0 - r.dot(r);
  const double proj = r.dot(dr);
  if (gap < kPureGap) {
    // numerically pure: only the tangential part of dr is resolved
    if (std::abs(proj) < 1e-6) return std::max(0.0, first - proj * proj / r.dot(r));
    std::ostringstream os;
    os << "qfi_bloch: pure state (1 - |r|^2 = " << gap
       << ") with a radial derivative r.dr = " << proj;
    fail(ErrorCode::InvariantViolation, os.str());
  }
  return first + proj * proj / gap;
}

SldQfi qfi_sld(const DensityMatrix& rho, const ComplexMatrix& drho, double eps) {
  if (drho.rows() != rho.dim() || drho.cols() != rho.dim())
    fail(ErrorCode::InvalidArgument, "qfi_sld: derivative has the wrong shape");
  if (!drho.allFinite()) fail(ErrorCode::InvalidArgument, "qfi_sld: derivative is not finite");
  const auto es = hermitian_eigen(rho.matrix());
  const ComplexMatrix& v = es.eigenvectors();
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const ComplexMatrix m = v.adjoint() * drho * v;

  SldQfi out;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    for (Eigen::Index j = 0; j < lambda.size(); ++j) {
      const double w = std::norm(m(i, j));
      const double s = lambda(i) + lambda(j);
      if (s > eps)
        out.value += 2.0 * w / s;
      else
        out.excluded_weight += w;
    }
  }
  out.rank_warning = out.excluded_weight > 1e-6;
  return out;
}

double classical_fi(const DensityMatrix& rho, const Mat2& drho, Observable obs) {
  if (rho.dim() != 2) fail(ErrorCode::InvalidArgument, "classical_fi needs a qubit state");
  const BlochVector r = bloch_from_density(rho);
  const BlochVector dr = bloch_components(drho);
  const double mean = obs == Observable::SigmaX ? r.x : r.z;
  const double dmean = obs == Observable::SigmaX ? dr.x : dr.z;
  const double var = 1.0 - mean * mean;
  if (var < kPureGap) {
    if (std::abs(dmean) <= 1e-6) return 0.0;
    std::ostringstream os;
    os << "classical_fi: " << (obs == Observable::SigmaX ? "sigma_x" : "sigma_z")
       << " has variance " << var << " while d<X>/dtheta = " << dmean;
    fail(ErrorCode::DegenerateMeasurement, os.str());
  }
  return dmean * dmean / var;
}

DensityMatrix default_initial_state() {
  return product_state(states::ground(), states::excited());
}

namespace {

const StateTolerance kReducedTolerance{1e-8, 1e-8, -1e-8};

double clamp_qfi(double v, double t, std::size_t& clamped) {
  if (v >= 0.0) return v;
  if (v >= -1e-10) {
    ++clamped;
    return 0.0;
  }
  std::ostringstream os;
  os << "QFI is negative (" << v << ") at t = " << t;
  fail(ErrorCode::Numerical, os.str());
}

}  // namespace

FisherCurve qfi_from_derivative(const StateDerivative& d, Subsystem subsystem,
                                std::size_t cross_check_stride) {
  FisherCurve c;
  c.times = d.times;
  c.subsystem = subsystem;
  c.max_discrepancy = d.max_discrepancy;
  c.richardson_failures = d.richardson_failures;
  c.stats = d.stats;
  c.values.resize(d.times.size());

  for (std::size_t k = 0; k < d.times.size(); ++k) {
    double v = 0.0;
    if (subsystem == Subsystem::Full) {
      const SldQfi s = qfi_sld(DensityMatrix(d.rho[k], kReducedTolerance), d.drho[k]);
      if (s.rank_warning) ++c.rank_warnings;
      v = s.value;
    } else {
      const Factor traced = subsystem == Subsystem::Probe ? Factor::Ancilla : Factor::Probe;
      const DensityMatrix rho(partial_trace(d.rho[k], traced), kReducedTolerance);
      const Mat2 drho = partial_trace(d.drho[k], traced);
      v = qfi_bloch(rho, drho);
      if (cross_check_stride > 0 && k % cross_check_stride == 0) {
        const SldQfi s = qfi_sld(rho, drho);
        if (s.rank_warning) ++c.rank_warnings;
        const double diff = std::abs(v - s.value);
        const double rel = diff / std::max({std::abs(v), std::abs(s.value), 1e-300});
        ++c.cross_checks;
        // on the pure boundary agreement is only asked up to (r.dr)^2
        double floor = 1e-14;
        const BlochVector r = bloch_from_density(rho);
        if (1.0 - r.dot(r) < kPureGap) {
          const double proj = r.dot(bloch_components(drho));
          floor += proj * proj;
          ++c.boundary_samples;
        }
        if (diff > 1e-8 * std::max(std::abs(v), std::abs(s.value)) && diff > floor) {
          ++c.cross_check_failures;
          c.cross_check_max_rel = std::max(c.cross_check_max_rel, rel);
        } else if (diff > floor) {
          c.cross_check_max_rel = std::max(c.cross_check_max_rel, rel);
        }
      }
    }
    c.values[k] = clamp_qfi(v, d.times[k], c.clamped);
  }
  return c;
}

FisherCurve qfi_curve(const SystemParams& p, EstimationTarget target,
                      const DensityMatrix& rho0, const TimeGrid& times, Subsystem subsystem,
                      const DerivativeOptions& opts) {
  const StateDerivative d = state_derivative(p, target, rho0, times, opts);
  FisherCurve c = qfi_from_derivative(d, subsystem);
  c.target = target;
  c.interaction = p.interaction;
  return c;
}

FisherComparison fisher_comparison(const SystemParams& p, EstimationTarget target,
                                   const DensityMatrix& rho0, const TimeGrid& times,
                                   const DerivativeOptions& opts) {
  const StateDerivative d = state_derivative(p, target, rho0, times, opts);
  FisherComparison out;
  out.times = times;
  out.max_discrepancy = d.max_discrepancy;
  out.richardson_failures = d.richardson_failures;
  std::size_t clamped = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const DensityMatrix rho(partial_trace(d.rho[k], Factor::Ancilla), kReducedTolerance);
    const Mat2 drho = partial_trace(d.drho[k], Factor::Ancilla);
    out.qfi.push_back(clamp_qfi(qfi_bloch(rho, drho), times[k], clamped));
    out.fi_sigma_z.push_back(classical_fi(rho, drho, Observable::SigmaZ));
    out.fi_sigma_x.push_back(classical_fi(rho, drho, Observable::SigmaX));
  }
  return out;
}

Mat16 liouvillian_derivative(const SystemParams& p, EstimationTarget target) {
  const Mat16 d_down =
      dissipator_superoperator(kron(pauli::identity(), pauli::lower()));
  const Mat16 d_up = dissipator_superoperator(kron(pauli::identity(), pauli::raise()));
  switch (target) {
    case EstimationTarget::Temperature: {
      const double dn = thermal_occupation_dT(p.omega_a, p.temperature);
      return p.gamma * dn * (d_down + d_up);
    }
    case EstimationTarget::AncillaFrequency: {
      const double dn = thermal_occupation_domega(p.omega_a, p.temperature);
      const Mat4 dh = kron(pauli::identity(), Mat2(0.5 * pauli::z()));
      return commutator_superoperator(dh) + p.gamma * dn * (d_down + d_up);
    }
    case EstimationTarget::BathCoupling: {
      const double n = thermal_occupation(p.omega_a, p.temperature).n_th;
      return (n + 1.0) * d_down + n * d_up;
    }
  }
  fail(ErrorCode::Internal, "unknown estimation target");
}

namespace {

Mat4 steady_matrix(const SystemParams& p) {
  const Mat4 m = steady_state(Liouvillian::build(p)).rho.matrix();
  return m;
}

SteadyDerivative steady_fd(const SystemParams& p, EstimationTarget target,
                           const DerivativeOptions& opts) {
  const double theta = target_value(p, target);
  const double h = fd_step(theta, opts);
  check_perturbable(p, target, h);
  SteadyDerivative out;
  out.method = SteadyDerivativeMethod::FiniteDifference;
  out.rho = steady_matrix(p);
  const Mat4 plus = steady_matrix(with_target(p, target, theta + h));
  const Mat4 minus = steady_matrix(with_target(p, target, theta - h));
  const Mat4 plus2 = steady_matrix(with_target(p, target, theta + 0.5 * h));
  const Mat4 minus2 = steady_matrix(with_target(p, target, theta - 0.5 * h));
  out.drho = traceless_hermitian((plus - minus) / (2.0 * h));
  const Mat4 d_half = traceless_hermitian((plus2 - minus2) / h);
  out.discrepancy = relative_discrepancy(out.drho, d_half, opts.noise_floor);
  out.resolved = max_abs(plus - minus) >= 1e-8;
  if (opts.strict && !(out.discrepancy <= opts.richardson_tolerance))
    report_richardson("steady-state derivative", INFINITY, out.discrepancy, out.drho, d_half);
  return out;
}

SteadyDerivative steady_linear_response(const SystemParams& p, EstimationTarget target) {
  const Liouvillian l = Liouvillian::build(p);
  SteadyDerivative out;
  out.method = SteadyDerivativeMethod::LinearResponse;
  out.rho = steady_state(l).rho.matrix();

  // [L; vec(I)^T] x = [-(dL) vec(rho); 0]
  ComplexMatrix a = ComplexMatrix::Zero(17, 16);
  a.topRows(16) = l.matrix();
  for (int i = 0; i < 4; ++i) a(16, i + 4 * i) = 1.0;
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(17);
  b.head(16) = -(liouvillian_derivative(p, target) * vectorize(out.rho));

  const Eigen::ColPivHouseholderQR<ComplexMatrix> qr(a);
  const Eigen::VectorXcd x = qr.solve(b);
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  const double residual = (a * x - b).cwiseAbs().maxCoeff() / scale;
  if (!(residual < 1e-8)) {
    std::ostringstream os;
    os << "linear-response solve has relative residual " << residual;
    fail(ErrorCode::Numerical, os.str());
  }
  const Vec16 v = x;
  const Mat4 d = unvectorize(v);
  out.drho = 0.5 * (d + d.adjoint());
  return out;
}

}  // namespace

SteadyDerivative steady_state_derivative(const SystemParams& p, EstimationTarget target,
                                         SteadyDerivativeMethod method,
                                         const DerivativeOptions& opts) {
  switch (method) {
    case SteadyDerivativeMethod::FiniteDifference: return steady_fd(p, target, opts);
    case SteadyDerivativeMethod::LinearResponse: return steady_linear_response(p, target);
    case SteadyDerivativeMethod::Automatic: {
      DerivativeOptions lenient = opts;
      lenient.strict = false;
      SteadyDerivative fd = steady_fd(p, target, lenient);
      if (fd.resolved && fd.discrepancy <= opts.richardson_tolerance) return fd;
      return steady_linear_response(p, target);
    }
  }
  fail(ErrorCode::Internal, "unknown derivative method");
}

}  // namespace qmetro
