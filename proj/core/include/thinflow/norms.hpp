#pragma once

#include <optional>
#include <string>

#include "thinflow/field.hpp"

namespace thinflow {

/// Which inner product to use. The eps-weighted kinds multiply the third
/// component of a vector field (the vertical velocity) by eps^2.
struct NormKind {
  enum class Tag { L2, Leps, V, Veps, DA, DAeps, DA32 };
  Tag tag = Tag::L2;
  std::optional<double> eps;

  static NormKind L2() { return {Tag::L2, std::nullopt}; }
  static NormKind Leps(double e) { return {Tag::Leps, e}; }
  static NormKind V() { return {Tag::V, std::nullopt}; }
  static NormKind Veps(double e) { return {Tag::Veps, e}; }
  static NormKind DA() { return {Tag::DA, std::nullopt}; }
  static NormKind DAeps(double e) { return {Tag::DAeps, e}; }
  static NormKind DA32() { return {Tag::DA32, std::nullopt}; }

  bool weighted() const { return tag == Tag::Leps || tag == Tag::Veps || tag == Tag::DAeps; }
  std::string name() const;
};

/// Real inner product integrated over the domain (volume 8 pi^2), computed
/// from Fourier coefficients.
///
///  L2    : sum_c (a_c, b_c)
///  V     : sum_c (grad a_c, grad b_c)
///  DA    : sum_c (lap a_c, lap b_c)
///  DA32  : sum_c sum_k |k|^6 a_c conj(b_c)
///  Leps, Veps, DAeps: as above with component 2 weighted by eps^2.
double inner_product(const SpectralField& a, const SpectralField& b, const NormKind& kind);
double norm_squared(const SpectralField& a, const NormKind& kind);
double norm(const SpectralField& a, const NormKind& kind);

/// Squared norms of the prognostic and derived fields sampled along a run.
/// "h1" is the gradient seminorm, "h2" the Laplacian seminorm and "h3" the
/// |k|^6 seminorm; every entry is a squared integral.
struct NormSample {
  double v_l2 = 0, v_h1 = 0, v_h2 = 0, v_h3 = 0;
  double w_l2 = 0, w_h1 = 0, w_h2 = 0;
  double theta_l2 = 0, theta_h1 = 0, theta_h2 = 0, theta_h3 = 0;

  double leps2(double eps) const { return v_l2 + eps * eps * w_l2; }
  double veps2(double eps) const { return v_h1 + eps * eps * w_h1; }
  double daeps2(double eps) const { return v_h2 + eps * eps * w_h2; }
  bool all_finite() const;
};

/// v: two-component horizontal velocity, w: its vertical velocity,
/// theta: tracer. Any of them may be empty (treated as zero).
NormSample sample_norms(const SpectralField& v, const SpectralField& w,
                        const SpectralField& theta);

}  // namespace thinflow
