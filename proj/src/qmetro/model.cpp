#include "qmetro/model.hpp"

#include <cmath>
#include <sstream>

namespace qmetro {

std::string_view to_string(InteractionKind kind) {
  switch (kind) {
    case InteractionKind::XX: return "XX";
    case InteractionKind::XXplusZX: return "XXplusZX";
    case InteractionKind::ZX: return "ZX";
    case InteractionKind::XZ: return "XZ";
  }
  return "?";
}

std::optional<InteractionKind> parse_interaction(std::string_view name) {
  if (name == "XX") return InteractionKind::XX;
  if (name == "XXplusZX" || name == "XX+ZX") return InteractionKind::XXplusZX;
  if (name == "ZX") return InteractionKind::ZX;
  if (name == "XZ") return InteractionKind::XZ;
  return std::nullopt;
}

void SystemParams::validate() const {
  auto require = [](bool ok, const char* field, double value, const char* rule) {
    if (!ok) {
      std::ostringstream os;
      os << "SystemParams." << field << " = " << value << " violates " << rule;
      fail(ErrorCode::InvalidArgument, os.str());
    }
  };
  require(std::isfinite(omega_p) && omega_p > 0.0, "omega_p", omega_p, "omega_p > 0");
  require(std::isfinite(omega_a) && omega_a > 0.0, "omega_a", omega_a, "omega_a > 0");
  require(std::isfinite(g) && g >= 0.0, "g", g, "g >= 0");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma", gamma, "gamma > 0");
  require(std::isfinite(temperature) && temperature > 0.0, "temperature", temperature,
          "temperature > 0");
}

Mat4 interaction_hamiltonian(const SystemParams& p) {
  using namespace pauli;
  switch (p.interaction) {
    case InteractionKind::XX: return p.g * kron(x(), x());
    case InteractionKind::XXplusZX: return p.g * (kron(x(), x()) + kron(z(), x()));
    case InteractionKind::ZX: return p.g * kron(z(), x());
    case InteractionKind::XZ: return p.g * kron(x(), z());
  }
  fail(ErrorCode::Internal, "unhandled interaction kind");
}

Mat4 total_hamiltonian(const SystemParams& p) {
  using namespace pauli;
  return 0.5 * p.omega_p * kron(z(), identity()) +
         0.5 * p.omega_a * kron(identity(), z()) + interaction_hamiltonian(p);
}

namespace {

constexpr double kExpLimit = 700.0;

double ratio(double omega_a, double temperature) {
  if (!(omega_a > 0.0) || !(temperature > 0.0)) {
    std::ostringstream os;
    os << "thermal occupation needs omega_a > 0 and T > 0 (got " << omega_a << ", "
       << temperature << ")";
    fail(ErrorCode::InvalidArgument, os.str());
  }
  return omega_a / temperature;
}

// n (n + 1) = e^{-x} / (1 - e^{-x})^2, finite for all x > 0
double occupation_variance(double x) {
  const double em = std::exp(-x);
  const double denom = -std::expm1(-x);
  return em / (denom * denom);
}

}  // namespace

ThermalOccupation thermal_occupation(double omega_a, double temperature) {
  const double x = ratio(omega_a, temperature);
  if (x > kExpLimit) return {0.0, true};
  return {1.0 / std::expm1(x), false};
}

double thermal_occupation_dT(double omega_a, double temperature) {
  const double x = ratio(omega_a, temperature);
  return occupation_variance(x) * x / temperature;
}

double thermal_occupation_domega(double omega_a, double temperature) {
  const double x = ratio(omega_a, temperature);
  return -occupation_variance(x) / temperature;
}

DecayRates decay_rates(const SystemParams& p) {
  const double n = thermal_occupation(p.omega_a, p.temperature).n_th;
  DecayRates r;
  r.up = n * p.gamma;
  r.down = r.up + p.gamma;
  return r;
}

}  // namespace qmetro
