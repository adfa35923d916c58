#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qmetro/dynamics.hpp"

namespace qmetro {

struct RefinementWarning {
  double t_begin = 0.0;
  double t_end = 0.0;
  double increment = 0.0;
};

struct BackflowCurve {
  TimeGrid times;
  std::vector<double> distance;      // trace distance of the probe pair
  std::vector<double> n_cumulative;  // running sum of positive increments
  std::vector<RefinementWarning> warnings;  // cells with an increment > 0.1

  // Filled by the adaptive driver.
  bool saturated = false;
  double fine_step = 0.0;
  double fine_horizon = 0.0;
  double tail_bound = 0.0;  // certified bound on growth of N after fine_horizon
  BlochVector pair_axis{1.0, 0.0, 0.0};

  double saturation() const { return n_cumulative.empty() ? 0.0 : n_cumulative.back(); }
};

/// Trace distance of the probe states from |+><+| (x) rho_a0 and |-><-| (x) rho_a0,
/// and N(t) as the sum of positive grid increments. Both trajectories are full
/// evolutions with state checks.
BackflowCurve backflow(const SystemParams& p, const DensityMatrix& rho_a0,
                       const TimeGrid& times);

struct SaturationOptions {
  double step = 0.1;          // fine linear cell width
  double tail_relative = 1e-3;  // stop once remaining growth <= tail_relative * N
  double tail_absolute = 1e-12;
  double max_horizon = 1e8;
  std::size_t check_every = 2000;  // steps between tail-bound evaluations
  double extend_factor = 10.0;     // log-spaced continuation up to this multiple
  std::size_t extend_points = 200;
  std::size_t output_points = 4000;
  bool maximize_pair = false;   // grid search over antipodal pure probe pairs
  std::size_t pair_polar = 7;
  std::size_t pair_azimuth = 12;
};

/// N(t) run until the certified tail bound says it has saturated, then
/// continued on a log grid to extend_factor times that horizon. Propagates
/// only the (linear) difference of the two states in the real Pauli basis.
BackflowCurve saturated_backflow(const SystemParams& p, const DensityMatrix& rho_a0,
                                 const SaturationOptions& opts = {});

}  // namespace qmetro
