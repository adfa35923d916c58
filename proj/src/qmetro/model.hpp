#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "qmetro/core.hpp"

namespace qmetro {

enum class InteractionKind { XX, XXplusZX, ZX, XZ };

std::string_view to_string(InteractionKind kind);
std::optional<InteractionKind> parse_interaction(std::string_view name);

/// Physical parameters of the probe/ancilla/bath model, in units with
/// hbar = k_B = 1 and frequencies expressed in units of the probe frequency.
struct SystemParams {
  double omega_p = 1.0;
  double omega_a = 0.99;
  double g = 0.08;
  double gamma = 0.05;
  double temperature = 0.3;
  InteractionKind interaction = InteractionKind::XX;

  /// Strict physical invariants: omega_p, omega_a, gamma, temperature > 0 and
  /// g >= 0. Throws InvalidArgument naming the offending field.
  void validate() const;
};

/// Probe/ancilla coupling term for the selected interaction family.
Mat4 interaction_hamiltonian(const SystemParams& p);

/// (omega_p / 2) sigma_z^P + (omega_a / 2) sigma_z^A + H_int.
Mat4 total_hamiltonian(const SystemParams& p);

struct ThermalOccupation {
  double n_th = 0.0;
  bool underflow = false;  // omega/T beyond exp range; n_th set to its limit 0
};

/// Bose-Einstein occupation 1 / (exp(omega/T) - 1).
ThermalOccupation thermal_occupation(double omega_a, double temperature);

/// dn/dT and dn/domega of the Bose-Einstein occupation.
double thermal_occupation_dT(double omega_a, double temperature);
double thermal_occupation_domega(double omega_a, double temperature);

struct DecayRates {
  double down = 0.0;  // gamma_- = (n_th + 1) gamma
  double up = 0.0;    // gamma_+ = n_th gamma
};

DecayRates decay_rates(const SystemParams& p);

}  // namespace qmetro
