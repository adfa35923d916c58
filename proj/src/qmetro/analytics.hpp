#pragma once

#include <vector>

#include "qmetro/dynamics.hpp"

namespace qmetro {

/// Steady-state probe quantities for the XX interaction in closed form.
///
/// With x = omega_a / T:
///   Omega  = 4 (omega_a^2 + omega_p^2)
///   chi    = ((gamma^2 + 8 g^2 + Omega) cosh x + gamma^2 - 8 g^2 - Omega)^2
///   xi     = (3 gamma^2 + 8 g^2 + Omega) cosh x
///   Lambda = 2 omega_a (3 gamma^2 - 8 g^2 + xi - Omega)
///            + 2 T sinh x ((gamma^2 + 8 g^2 + 4 omega_p^2 - 4 omega_a^2) cosh x
///                          + gamma^2 - 8 g^2 + 4 omega_a^2 - 4 omega_p^2)
/// and f = 4 A^2 / (1 - 4 delta_p^2) for each A.
struct SteadyStateClosedForm {
  double delta_p = 0.0;
  double f_T = 0.0;
  double f_wA = 0.0;
  double f_gamma = 0.0;

  double omega_cap = 0.0;
  double chi = 0.0;
  double xi = 0.0;
  double lambda_cap = 0.0;
  double a_T = 0.0;
  double a_wA = 0.0;
  double a_gamma = 0.0;

  // For x > 350 the hyperbolic terms are carried in scaled form:
  // chi, xi and lambda_cap then hold chi e^{-2x}, xi e^{-x} and Lambda e^{-2x}.
  bool scaled = false;
};

/// Closed-form steady state. Only the XX interaction has one; other kinds are
/// rejected (XZ relaxes to a maximally mixed probe with vanishing QFIs).
SteadyStateClosedForm closed_form(const SystemParams& p);

/// Same quantities forced through one branch of the hyperbolic evaluation,
/// for checking continuity at the crossover.
SteadyStateClosedForm closed_form_direct(const SystemParams& p);
SteadyStateClosedForm closed_form_scaled(const SystemParams& p);

/// Sum of |rho_ij| over i != j, in the basis the matrix is given in.
double coherence_l1(const DensityMatrix& rho);

/// l1-coherence of the probe along an evolution.
std::vector<double> probe_coherence(const SystemParams& p, const DensityMatrix& rho0,
                                    const TimeGrid& times);

}  // namespace qmetro
