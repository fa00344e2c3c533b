#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "thinflow/dynamics.hpp"
#include "thinflow/norms.hpp"

namespace thinflow {

struct StepperConfig {
  double dt = 2.5e-3;
  double t_end = 0.5;
  /// Advective CFL number above which a run is declared unstable. 0 disables.
  double cfl_guard = 1.0;
  /// Blow-up surrogate: ||v||_V above this bound stops the run.
  double blowup_threshold = 1e3;
  int record_stride = 1;
  /// Record the per-step energy balance terms (costs extra transforms).
  bool record_energy = false;

  void validate() const;
  std::uint64_t step_count() const;
  bool operator==(const StepperConfig&) const = default;
};

/// Terms of the discrete energy balance for the eps-weighted energy
/// E = 1/2 ||(v, w(v))||^2_eps over one step.
struct EnergyTerms {
  double energy_before = 0.0;
  double energy_after = 0.0;
  /// ||grad u||^2_eps + 1/2 (a^K grad I_alpha u, grad I_alpha u)_eps
  double dissipation = 0.0;
  /// 1/2 ||sum_k G_k dB_k||^2_eps (pathwise quadratic variation)
  double quadratic_variation = 0.0;
  /// (u, sum_k G_k dB_k)_eps
  double martingale = 0.0;
  /// -g (theta, w)
  double buoyancy_work = 0.0;
  double dt = 0.0;
};

struct StepInfo {
  double cfl = 0.0;
};

struct RunResult {
  std::vector<double> times;
  std::vector<NormSample> samples;
  bool blew_up = false;
  double blowup_time = std::numeric_limits<double>::infinity();
  std::string blowup_reason;
  std::uint64_t steps = 0;
  State final_state;
  std::vector<EnergyTerms> energy;
};

/// One Euler-Maruyama step with an exact integrating factor for Delta_3:
///   v+ = exp(-|k|^2 dt) (v + N dt + sum_k G_k dB_k),
/// followed by P, truncation and tracer-mean removal. Throws
/// std::domain_error on non-finite values.
State step(const State& s, const ModelVariant& variant, const NoiseModel& noise,
           const PhysicalConstants& constants, std::span<const double> increments, double dt,
           EnergyTerms* energy = nullptr, StepInfo* info = nullptr);
State step(const State& s, const ModelVariant& variant, const NoiseModel& noise,
           const PhysicalConstants& constants, const BrownianDriver& driver,
           std::uint64_t step_index, double dt);

RunResult integrate(const State& initial, const ModelVariant& variant, const NoiseModel& noise,
                    const PhysicalConstants& constants, const StepperConfig& stepper,
                    const BrownianDriver& driver);

/// Observer of the increments fed to each model: (step, model 'A' or 'B', dB).
using IncrementObserver =
    std::function<void(std::uint64_t, char, std::span<const double>)>;

struct CoupledResult {
  RunResult a;
  RunResult b;
  std::vector<double> times;
  /// Norms of U = (V, W(V)) and Theta, with V = v_a - v_b, Theta = theta_a - theta_b.
  std::vector<NormSample> diff;
  bool blew_up = false;
};

/// Both models consume identical increments at every step. Allowed pairs:
/// one Navier-Stokes variant with one primitive-equation variant (either
/// order) or two Navier-Stokes variants. Both must share eps.
CoupledResult integrate_coupled(const State& initial, const ModelVariant& a,
                                const ModelVariant& b, const NoiseModel& noise,
                                const PhysicalConstants& constants, const StepperConfig& stepper,
                                const BrownianDriver& driver,
                                const IncrementObserver& observer = {});

/// ||v||_V, the quantity compared against the blow-up threshold.
double blowup_norm(const NormSample& s);

}  // namespace thinflow
