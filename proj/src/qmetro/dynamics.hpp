#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qmetro/core.hpp"
#include "qmetro/expm.hpp"
#include "qmetro/model.hpp"

namespace qmetro {

/// Column-stacking vectorization: vec(rho)[i + 4 j] = rho(i, j).
Vec16 vectorize(const Mat4& rho);
Mat4 unvectorize(const Vec16& v);

Mat16 kron(const Mat4& a, const Mat4& b);

/// Superoperator of X -> -i [H, X] in the column-stacking convention.
Mat16 commutator_superoperator(const Mat4& h);
/// Superoperator of X -> A X A^dagger - 1/2 {A^dagger A, X}.
Mat16 dissipator_superoperator(const Mat4& a);

/// Lindblad generator  -i[H, .] + gamma_- D[sigma_-^A] + gamma_+ D[sigma_+^A]
/// acting on column-stacked two-qubit states.
class Liouvillian {
 public:
  /// Builds and checks the generator. Requires finite parameters with g, gamma
  /// >= 0 (and omega_a, T > 0 whenever gamma > 0). Throws InvariantViolation
  /// when the trace residual or spectrum checks fail.
  static Liouvillian build(const SystemParams& p);

  const Mat16& matrix() const { return m_; }
  const SystemParams& params() const { return params_; }

  Vec16 apply(const Vec16& v) const { return m_ * v; }
  Mat4 apply(const Mat4& rho) const { return unvectorize(m_ * vectorize(rho)); }

  /// max_j |sum_i L(ii, j)|: vec(I) must be a left null vector.
  double trace_residual() const;

 private:
  Liouvillian(Mat16 m, SystemParams p) : m_(std::move(m)), params_(p) {}

  Mat16 m_;
  SystemParams params_;
};

using TimeGrid = std::vector<double>;

/// n points evenly spaced on [0, horizon].
TimeGrid linear_grid(double horizon, std::size_t points);
/// 0 followed by n - 1 log-spaced points on [t_min, horizon].
TimeGrid log_grid(double horizon, std::size_t points, double t_min = 0.1);
/// 2000 log-spaced points when horizon > 1e3, else 2000 linear points.
TimeGrid default_grid(double horizon);

/// Throws InvalidArgument unless times are finite, >= 0 and strictly increasing.
void validate_grid(const TimeGrid& times);

struct TrajectoryStats {
  double max_trace_drift = 0.0;     // before renormalization
  double max_hermiticity_drift = 0.0;
  double min_eigenvalue = 1.0;      // most negative eigenvalue seen
  std::size_t renormalizations = 0;
  std::size_t propagators = 0;      // distinct exp(L dt) evaluations
};

struct Trajectory {
  TimeGrid times;
  std::vector<Mat4> states;
  TrajectoryStats stats;
};

struct EvolveOptions {
  double renormalize_above = 1e-12;
  double trace_tolerance = 1e-8;
  double hermiticity_tolerance = 1e-8;
  double positivity_tolerance = 1e-8;
  bool check_positivity = true;
};

/// rho(t_k) = exp(L t_k) rho0 on the given grid, stepping with cached exact
/// propagators exp(L dt). Throws Numerical (naming the time) when a state
/// leaves the tolerances in `opts`.
Trajectory evolve(const Liouvillian& l, const DensityMatrix& rho0, const TimeGrid& times,
                  const EvolveOptions& opts = {});

/// Propagates an arbitrary operator (no state checks); used for derivatives
/// and state differences.
std::vector<Mat4> propagate(const Liouvillian& l, const Mat4& x0, const TimeGrid& times);

struct SteadyState {
  DensityMatrix rho;
  double residual = 0.0;   // max |L vec(rho)|
  double spectral_gap = 0.0;  // second smallest |lambda|
};

/// Kernel element of L with unit trace. Throws DegenerateNullspace when the
/// second smallest |lambda| is below `gap_tolerance`.
SteadyState steady_state(const Liouvillian& l, double gap_tolerance = 1e-6);

/// Pointwise Tr_A over a trajectory.
std::vector<DensityMatrix> reduce_probe(const Trajectory& traj);

/// rho_P (x) rho_A.
DensityMatrix product_state(const Mat2& probe, const Mat2& ancilla);

}  // namespace qmetro
