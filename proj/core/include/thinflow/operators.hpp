#pragma once

#include <cstdint>

#include "thinflow/field.hpp"

namespace thinflow {

/// Visit every stored spectral mode as f(index, iz, iy, ix).
template <class F>
inline void for_each_mode(const GridSpec& g, F&& f) {
  const int nxh = g.nxh();
  std::size_t idx = 0;
  for (int iz = 0; iz < g.nz; ++iz)
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < nxh; ++ix, ++idx) f(idx, iz, iy, ix);
}

/// Spectral derivative i k_axis applied to every component. axis: 0=x, 1=y, 2=z.
SpectralField derivative(const SpectralField& f, int axis);

/// (d_x f, d_y f) of a scalar.
SpectralField gradient_H(const SpectralField& f);
/// (d_x f, d_y f, d_z f) of a scalar.
SpectralField gradient3(const SpectralField& f);
/// Scaled gradient (d_x f, d_y f, d_z f / eps^2) of a scalar.
SpectralField gradient_eps(const SpectralField& f, double eps);
/// Componentwise 3D Laplacian.
SpectralField laplacian3(const SpectralField& f);
/// d_x u_0 + d_y u_1 + d_z u_2 of a three-component field.
SpectralField divergence3(const SpectralField& u);
/// d_x v_0 + d_y v_1 of a field with at least two components.
SpectralField divergence_H(const SpectralField& v);

/// Zero every coefficient outside the dealiasing box.
void dealias_in_place(SpectralField& f);
SpectralField dealias(SpectralField f);

/// True when every coefficient outside the dealiasing box is exactly zero.
bool is_dealiased(const SpectralField& f);

/// Pseudo-spectral product of two scalar fields followed by truncation.
SpectralField dealiased_product(const SpectralField& a, const SpectralField& b);

/// Remove the k = 0 coefficient of every component.
void remove_mean_in_place(SpectralField& f);

/// Real-valued smooth random field with spectral envelope
/// (1+|k|^2)^(-slope/2), truncated to the dealiasing box. Deterministic in seed.
SpectralField random_smooth_field(const GridSpec& g, int components, std::uint64_t seed,
                                  double slope = 4.0);

/// Enforce exact Hermitian symmetry on the ix = 0 and Nyquist-x planes.
void symmetrize_in_place(SpectralField& f);

}  // namespace thinflow
