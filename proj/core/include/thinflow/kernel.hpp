#pragma once

#include <string>

#include "thinflow/field.hpp"

namespace thinflow {

class NoiseModel;

/// Smoothing kernel K realised as a real, even spectral multiplier m(k)
/// with m(0) = 1 (except for the zero kernel).
struct KernelK {
  enum class Kind { raised_cosine, gaussian, identity, zero };
  Kind kind = Kind::raised_cosine;
  /// raised_cosine: m = 1 for |k| <= cutoff, 0 for |k| >= 2 cutoff.
  /// gaussian: m = exp(-(|k|/cutoff)^2 / 2).
  double cutoff = 4.0;

  void validate() const;
  /// Multiplier for the full 3D wavenumber magnitude.
  double multiplier(double kmag) const;
  bool operator==(const KernelK&) const = default;

  static KernelK identity() { return {Kind::identity, 1.0}; }
  static KernelK zero() { return {Kind::zero, 1.0}; }
};

std::string to_string(KernelK::Kind kind);
KernelK::Kind kernel_kind_from_string(const std::string& s);

/// sum over the resolved modes of m(k) (1+|k|^2)^(3/2); finite for every
/// admissible kernel on a truncated grid.
double kernel_h3_sum(const KernelK& kernel, const GridSpec& g);

/// Multiply every component by m(k).
SpectralField apply_K(const SpectralField& f, const KernelK& kernel);
/// Multiply every component by m(k)^2 (the operator C_K^* C_K).
SpectralField apply_K2(const SpectralField& f, const KernelK& kernel);
void apply_K_in_place(cplx* data, const GridSpec& g, const KernelK& kernel, int power = 1);

/// diag(1, 1, alpha) on a three-component field.
SpectralField apply_Ialpha(const SpectralField& u, double alpha);
/// diag(1, 1, K) on a three-component field.
SpectralField apply_IK(const SpectralField& u, const KernelK& kernel);

/// div( a^K grad w ) with a^K[.] = sum_k phi_k m^2 (phi_k^T .).
SpectralField apply_aK_divergence(const SpectralField& w, const NoiseModel& model,
                                  const KernelK& kernel);

/// Same operator from the physical gradient of w (3 components).
SpectralField divergence_aK_grad(const NoiseModel& model, const KernelK& kernel,
                                 const PhysicalField& grad_w);

}  // namespace thinflow
