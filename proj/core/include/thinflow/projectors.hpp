#pragma once

#include "thinflow/field.hpp"

namespace thinflow {

/// Leray projector orthogonal in the eps-weighted inner product
/// (u, u')_eps = (v, v') + eps^2 (w, w'). Returns u - grad_eps q with
/// (Delta_H + eps^-2 d_zz) q = div u. The mean mode passes through unchanged.
SpectralField project_Peps(const SpectralField& u, double eps);

/// Horizontal part of P_eps applied to f + (0, 0, b / eps^2), evaluated
/// without ever forming b / eps^2. `b` may be empty (no vertical source).
SpectralField project_Peps_horizontal(const SpectralField& f, const SpectralField& b,
                                      double eps);

/// Barotropic projector: vertical average broadcast along z.
SpectralField project_A(const SpectralField& v);
/// Baroclinic projector: v - A v.
SpectralField project_R(const SpectralField& v);
/// Planar Leray projector on the first two components, applied at every
/// vertical wavenumber.
SpectralField project_leray2d(const SpectralField& v);
/// P = P2D A + R on a two-component horizontal field.
SpectralField project_P(const SpectralField& v);
void project_P_in_place(SpectralField& v);

}  // namespace thinflow
