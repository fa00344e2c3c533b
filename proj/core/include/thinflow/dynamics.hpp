#pragma once

#include <optional>
#include <span>
#include <string>

#include "thinflow/field.hpp"
#include "thinflow/kernel.hpp"
#include "thinflow/noise.hpp"

namespace thinflow {

enum class ModelKind { SNS, rSNS, PE_strong, PE_weak };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

/// Switches for isolating parts of the dynamics in verification runs.
struct TermSwitches {
  /// Nonlinear self-advection (u* . grad).
  bool advection = true;
  /// Multiplicative transport noise together with its Ito correction
  /// 1/2 div(a grad .) and the Ito-Stokes drift. The additive forcing
  /// Delta sigma dW is always kept.
  bool transport_noise = true;
  bool operator==(const TermSwitches&) const = default;
};

struct ModelVariant {
  ModelKind kind = ModelKind::rSNS;
  double eps = 0.1;
  double alpha_sigma = 1.0;
  KernelK kernel{};
  /// PE_weak only: keep the additive alpha eps^2 Delta(sigma^z dW) term in
  /// the martingale pressure.
  bool additive_vertical_noise = true;
  TermSwitches terms{};

  bool is_ns() const { return kind == ModelKind::SNS || kind == ModelKind::rSNS; }
  bool is_pe() const { return !is_ns(); }
  /// Kernel actually used: SNS always filters with the identity and the
  /// strong primitive equations never filter.
  KernelK effective_kernel() const;
  void validate() const;
  bool operator==(const ModelVariant&) const = default;
};

struct PhysicalConstants {
  double rho0 = 1000.0;
  double g = 9.81;
  /// Horizontal and vertical viscosities of the scaled system.
  double mu() const { return 1.0; }
  double nu(double eps) const { return eps * eps; }
  bool operator==(const PhysicalConstants&) const = default;
};

/// Prognostic fields. w is never stored; see vertical_velocity().
struct State {
  SpectralField v;      // 2 components
  SpectralField theta;  // 1 component, zero mean
  double time = 0.0;
};

/// w(v) = int_z^1 div_H v dz'. Throws when the barotropic divergence of v
/// exceeds `tol` relative to the size of its horizontal gradient.
SpectralField vertical_velocity(const SpectralField& v, double tol = 1e-9);

/// Buoyancy fluctuation g theta.
SpectralField buoyancy(const SpectralField& theta, const PhysicalConstants& constants);

/// Baroclinic hydrostatic pressure with zero vertical mean:
///   d_z p = -g theta                                   (strong)
///   d_z p = -g theta + alpha^2 eps^2 / 2 div(a^K grad w)  (weak)
SpectralField hydrostatic_pressure(const SpectralField& theta, const SpectralField& w,
                                   const ModelVariant& variant, const NoiseModel& noise,
                                   const PhysicalConstants& constants);

struct Tendency {
  SpectralField v;      // 2 components
  SpectralField theta;  // 1 component
};

enum class ViscousTerm { include, exclude };

/// Derived fields shared by the drift and every diffusion evaluation of one
/// state: w, the advecting velocity and physical gradients.
class StateEvaluation {
 public:
  StateEvaluation(const State& s, const ModelVariant& variant, const NoiseModel& noise);

  const State& state() const { return *state_; }
  const SpectralField& w() const { return w_; }
  const PhysicalField& u_phys() const { return u_phys_; }
  const PhysicalField& grad_vx() const { return grad_vx_; }
  const PhysicalField& grad_vy() const { return grad_vy_; }
  const PhysicalField& grad_theta() const { return grad_theta_; }
  /// Empty when the variant never needs it.
  const PhysicalField& grad_w() const { return grad_w_; }

 private:
  const State* state_;
  SpectralField w_;
  PhysicalField u_phys_;
  PhysicalField grad_vx_, grad_vy_, grad_w_, grad_theta_;
};

/// Drift of (v, theta). For Navier-Stokes variants the 3-vector drift is
/// projected with P_eps (buoyancy enters through the projector); for the
/// primitive equations the horizontal drift with the hydrostatic pressure
/// gradient is projected with P.
Tendency rhs_drift(const State& s, const ModelVariant& variant, const NoiseModel& noise,
                   const PhysicalConstants& constants, ViscousTerm viscous = ViscousTerm::include);
Tendency rhs_drift(const StateEvaluation& ev, const ModelVariant& variant,
                   const NoiseModel& noise, const PhysicalConstants& constants,
                   ViscousTerm viscous = ViscousTerm::include);

/// Coefficient of d beta_k.
Tendency rhs_diffusion_mode(const State& s, const ModelVariant& variant, const NoiseModel& noise,
                            std::size_t k);

/// sum_k coeffs[k] * (coefficient of d beta_k), evaluated in one pass using
/// linearity in the noise field.
Tendency rhs_diffusion(const StateEvaluation& ev, const ModelVariant& variant,
                       const NoiseModel& noise, std::span<const double> coeffs);

}  // namespace thinflow
