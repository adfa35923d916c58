#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "qmetro/dynamics.hpp"

namespace qmetro {

enum class EstimationTarget { Temperature, AncillaFrequency, BathCoupling };

std::string_view to_string(EstimationTarget t);
std::optional<EstimationTarget> parse_target(std::string_view name);

double target_value(const SystemParams& p, EstimationTarget t);
SystemParams with_target(SystemParams p, EstimationTarget t, double value);

enum class Subsystem { Probe, Ancilla, Full };

std::string_view to_string(Subsystem s);
std::optional<Subsystem> parse_subsystem(std::string_view name);

/// Central differences with step h = relative_step * max(|theta|, step_floor),
/// validated against a second evaluation at h / 2.
struct DerivativeOptions {
  double relative_step = 1e-5;
  double step_floor = 1e-2;
  // Relative discrepancy |D_h - D_{h/2}| / max(|D_{h/2}|, noise_floor),
  // max-norm over matrix entries.
  double richardson_tolerance = 1e-5;
  double noise_floor = 1e-3;
  bool strict = false;  // throw on the first failed check instead of counting
};

struct StateDerivative {
  TimeGrid times;
  std::vector<Mat4> rho;   // unperturbed trajectory
  std::vector<Mat4> drho;  // d rho / d theta at step h
  std::vector<double> discrepancy;
  double step = 0.0;
  double max_discrepancy = 0.0;
  std::size_t richardson_failures = 0;
  TrajectoryStats stats;
};

/// d rho_S(t) / d theta along the grid from two-sided perturbed evolutions.
StateDerivative state_derivative(const SystemParams& p, EstimationTarget target,
                                 const DensityMatrix& rho0, const TimeGrid& times,
                                 const DerivativeOptions& opts = {});

/// Bloch-vector QFI of a qubit family: |dr|^2 + (r . dr)^2 / (1 - |r|^2).
/// Below 1 - |r|^2 = 1e-10 the state counts as pure and the radial term,
/// which is then rounding noise, is dropped.
double qfi_bloch(const DensityMatrix& rho, const Mat2& drho);

struct SldQfi {
  double value = 0.0;
  double excluded_weight = 0.0;  // sum |<i|drho|j>|^2 over lambda_i + lambda_j <= eps
  bool rank_warning = false;     // excluded_weight > 1e-6
};

/// Spectral SLD formula 2 sum |<i|drho|j>|^2 / (lambda_i + lambda_j).
SldQfi qfi_sld(const DensityMatrix& rho, const ComplexMatrix& drho, double eps = 1e-10);

enum class Observable { SigmaX, SigmaZ };

/// (d<X>)^2 / Var(X) for a probe Pauli. Zero-variance states with a
/// non-vanishing derivative throw DegenerateMeasurement.
double classical_fi(const DensityMatrix& rho, const Mat2& drho, Observable obs);

struct FisherCurve {
  TimeGrid times;
  std::vector<double> values;
  EstimationTarget target = EstimationTarget::Temperature;
  InteractionKind interaction = InteractionKind::XX;
  Subsystem subsystem = Subsystem::Probe;

  std::size_t clamped = 0;            // values in [-1e-10, 0) set to 0
  std::size_t cross_checks = 0;       // Bloch vs SLD comparisons made
  std::size_t cross_check_failures = 0;
  std::size_t boundary_samples = 0;   // checks made on numerically pure states
  double cross_check_max_rel = 0.0;
  std::size_t rank_warnings = 0;
  double max_discrepancy = 0.0;
  std::size_t richardson_failures = 0;
  TrajectoryStats stats;
};

/// Initial state used for all QFI runs unless overridden: probe |g>, ancilla |e>.
DensityMatrix default_initial_state();

/// QFI along a precomputed derivative. For the probe, Bloch formula with an SLD
/// cross-check on every `cross_check_stride`-th sample.
FisherCurve qfi_from_derivative(const StateDerivative& d, Subsystem subsystem,
                                std::size_t cross_check_stride = 100);

FisherCurve qfi_curve(const SystemParams& p, EstimationTarget target,
                      const DensityMatrix& rho0, const TimeGrid& times,
                      Subsystem subsystem = Subsystem::Probe,
                      const DerivativeOptions& opts = {});

struct FisherComparison {
  TimeGrid times;
  std::vector<double> qfi;
  std::vector<double> fi_sigma_z;
  std::vector<double> fi_sigma_x;
  double max_discrepancy = 0.0;
  std::size_t richardson_failures = 0;
};

/// Probe QFI against classical FI of sigma_z^P and sigma_x^P measurements.
FisherComparison fisher_comparison(const SystemParams& p, EstimationTarget target,
                                   const DensityMatrix& rho0, const TimeGrid& times,
                                   const DerivativeOptions& opts = {});

/// dL/dtheta as a superoperator, from the analytic derivatives of the rates
/// (and of the ancilla Hamiltonian for omega_a).
Mat16 liouvillian_derivative(const SystemParams& p, EstimationTarget target);

enum class SteadyDerivativeMethod { FiniteDifference, LinearResponse, Automatic };

std::string_view to_string(SteadyDerivativeMethod m);

struct SteadyDerivative {
  Mat4 rho;
  Mat4 drho;
  SteadyDerivativeMethod method = SteadyDerivativeMethod::FiniteDifference;
  double discrepancy = 0.0;  // Richardson check, finite differences only
  // Finite differences only: max |rho(theta + h) - rho(theta - h)| is far
  // enough above rounding (1e-8) for the quotient to carry information.
  bool resolved = true;
};

/// d rho_ss / d theta. FiniteDifference perturbs the nullspace solution;
/// LinearResponse solves L drho = -(dL) rho with Tr drho = 0. Automatic uses
/// finite differences when they are resolved and pass the Richardson check,
/// and linear response otherwise.
SteadyDerivative steady_state_derivative(const SystemParams& p, EstimationTarget target,
                                         SteadyDerivativeMethod method,
                                         const DerivativeOptions& opts = {});

}  // namespace qmetro
