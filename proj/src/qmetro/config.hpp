#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qmetro/estimation.hpp"
#include "qmetro/nonmarkov.hpp"

namespace qmetro {

enum class Experiment { Evolve, Qfi, Nonmarkov, Steady, FiCompare, Coherence, Sweep };

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

enum class Spacing { Linear, Log };

struct GridSpec {
  double horizon = 2e4;
  std::size_t points = 2000;
  std::optional<Spacing> spacing;  // unset: log above a horizon of 1e3, else linear
  double t_min = 0.1;              // first nonzero time of a log grid

  TimeGrid build() const;
};

struct QubitSpec {
  enum class Kind { Ground, Excited, Plus, Minus, Thermal, Bloch };
  Kind kind = Kind::Ground;
  BlochVector bloch;  // Kind::Bloch only

  /// Thermal uses the ancilla Gibbs state at the params' temperature.
  Mat2 matrix(const SystemParams& p) const;
  std::string name() const;
};

struct InitialSpec {
  QubitSpec probe{QubitSpec::Kind::Ground, {}};
  QubitSpec ancilla{QubitSpec::Kind::Excited, {}};

  DensityMatrix state(const SystemParams& p) const;
};

using SweepValue = std::variant<double, InteractionKind>;

struct SweepAxis {
  std::string field;  // a SystemParams field
  std::vector<SweepValue> values;
};

void apply_sweep_value(SystemParams& p, const std::string& field, const SweepValue& v);

struct ExperimentConfig {
  SystemParams params;
  Experiment experiment = Experiment::Qfi;
  Experiment child = Experiment::Qfi;  // experiment run at each sweep point
  EstimationTarget target = EstimationTarget::Temperature;
  std::vector<Subsystem> subsystems{Subsystem::Probe};
  GridSpec grid;
  InitialSpec initial;
  std::vector<SweepAxis> sweep;  // cartesian product, first axis slowest

  bool saturate = true;  // nonmarkov: adaptive horizon instead of the grid
  SaturationOptions saturation;
  SteadyDerivativeMethod steady_method = SteadyDerivativeMethod::Automatic;
  DerivativeOptions derivative;

  std::string output;  // CSV path
  std::string echo;    // resolved configuration as JSON
};

/// Parses and validates a JSON configuration. `overrides` are `key=value`
/// strings applied to the document before validation; a bare key naming a
/// SystemParams field addresses `params.<key>`, anything else is a dotted
/// path. `experiment`, when set, replaces the document's experiment.
/// Every problem throws ErrorCode::Config naming the key (and its line when
/// it comes from the document).
ExperimentConfig parse_config(std::string_view text,
                              const std::vector<std::string>& overrides = {},
                              std::optional<std::string_view> experiment = std::nullopt);

}  // namespace qmetro
