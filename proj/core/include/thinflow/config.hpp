#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thinflow/dynamics.hpp"
#include "thinflow/initial_conditions.hpp"
#include "thinflow/integrator.hpp"

namespace thinflow {

struct NoiseConfig {
  double upsilon = 1.0;
  /// Number of default streamfunction modes when `modes` is empty.
  int mode_count = 8;
  double amplitude = 0.5;
  /// Explicit modes; override mode_count/amplitude when non-empty.
  std::vector<ModeSpec> modes;

  void validate() const;
  bool operator==(const NoiseConfig&) const = default;
};

struct RunConfig {
  GridSpec grid{};
  ModelVariant model{};
  NoiseConfig noise{};
  PhysicalConstants physics{};
  StepperConfig stepper{};
  std::uint64_t seed = 1;
  InitialConditionSpec initial{};

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

enum class AlphaRule { fixed, power };
std::string to_string(AlphaRule r);

struct SweepConfig {
  RunConfig base{};
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  AlphaRule alpha_rule = AlphaRule::fixed;
  /// alpha_sigma for the fixed rule.
  double alpha = 1.0;
  /// alpha_sigma = eps^(-gamma) for the power rule.
  double gamma = 0.0;
  int paths_per_cell = 20;
  ModelKind model_a = ModelKind::rSNS;
  ModelKind model_b = ModelKind::PE_weak;
  int workers = 1;

  void validate() const;
  double alpha_for(double eps) const;
  /// gamma as reported in outputs (0 for the fixed rule).
  double reported_gamma() const { return alpha_rule == AlphaRule::power ? gamma : 0.0; }
  bool operator==(const SweepConfig&) const = default;
};

struct ParsedConfig {
  RunConfig run;
  std::optional<SweepConfig> sweep;  // present when a [sweep] section exists
};

/// Parses the sectioned key = value format. Unknown sections or keys,
/// malformed lines and invalid values raise std::invalid_argument whose
/// message names the line and the dotted field (e.g. "model.eps").
ParsedConfig parse_config(const std::string& text);
ParsedConfig load_config(const std::string& path);

/// Canonical text; parse_config(serialize(c)) == c exactly.
std::string serialize(const RunConfig& c);
std::string serialize(const SweepConfig& c);

/// FNV-1a 64-bit hash, printed as 16 hex digits.
std::string config_hash(const std::string& text);

/// Noise model described by a run configuration (alpha from the model).
NoiseModel build_noise(const RunConfig& c);

}  // namespace thinflow
