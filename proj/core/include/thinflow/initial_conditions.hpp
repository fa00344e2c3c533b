#pragma once

#include <cstdint>
#include <string>

#include "thinflow/dynamics.hpp"

namespace thinflow {

enum class InitialKind { taylor_green_like, random_smooth, file };
std::string to_string(InitialKind k);
InitialKind initial_kind_from_string(const std::string& s);

struct InitialConditionSpec {
  InitialKind kind = InitialKind::taylor_green_like;
  /// taylor_green_like: velocity scale. random_smooth: RMS velocity.
  double amplitude = 1.0;
  double spectrum_slope = 4.0;
  /// Tracer scale (same meaning as `amplitude`).
  double theta_amplitude = 0.1;
  /// JSON file for kind = file.
  std::string path;

  void validate() const;
  bool operator==(const InitialConditionSpec&) const = default;
};

/// Builds an admissible initial state: v lies in the range of P, is
/// truncated, and theta has zero mean. File input is projected on load.
State make_initial_state(const GridSpec& g, const InitialConditionSpec& spec,
                         std::uint64_t seed);

/// Writes the physical values of a state as JSON readable by kind = file.
void write_state_json(const State& s, const std::string& path);

}  // namespace thinflow
