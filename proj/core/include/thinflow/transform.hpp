#pragma once

#include "thinflow/field.hpp"

namespace thinflow {

/// Physical values -> normalised Fourier coefficients (no truncation).
SpectralField to_spectral(const PhysicalField& f);

/// Fourier coefficients -> physical values on the grid.
PhysicalField to_physical(const SpectralField& f);

/// Component-level entry points used by hot loops. Each thread owns its own
/// FFT workspace, so concurrent calls never share mutable state.
void forward_component(const GridSpec& g, const double* in, cplx* out);
void inverse_component(const GridSpec& g, const cplx* in, double* out);

}  // namespace thinflow
