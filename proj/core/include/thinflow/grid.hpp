#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

namespace thinflow {

/// Resolution of the scaled torus [0,2pi)^2 x [-1,1).
///
/// The vertical axis is periodic with period 2, so vertical wavenumbers are
/// integer multiples of pi. Spectral storage follows the real-to-complex
/// layout: [iz][iy][ix] with ix in [0, nx/2].
struct GridSpec {
  int nx = 32;
  int ny = 32;
  int nz = 16;
  double dealias_fraction = 2.0 / 3.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  int nxh() const { return nx / 2 + 1; }
  std::size_t physical_size() const { return std::size_t(nx) * ny * nz; }
  std::size_t spectral_size() const { return std::size_t(nxh()) * ny * nz; }

  std::size_t spectral_index(int iz, int iy, int ix) const {
    return (std::size_t(iz) * ny + iy) * nxh() + ix;
  }
  std::size_t physical_index(int iz, int iy, int ix) const {
    return (std::size_t(iz) * ny + iy) * nx + ix;
  }

  static int signed_mode(int i, int n) { return i <= n / 2 ? i : i - n; }

  /// Integer mode numbers (signed).
  int mx(int ix) const { return ix; }
  int my(int iy) const { return signed_mode(iy, ny); }
  int mz(int iz) const { return signed_mode(iz, nz); }

  /// Physical wavenumbers.
  double kx(int ix) const { return double(ix); }
  double ky(int iy) const { return double(my(iy)); }
  double kz(int iz) const { return std::numbers::pi * mz(iz); }

  /// Wavenumbers used for differentiation: the Nyquist mode has no
  /// well-defined real derivative and is treated as zero.
  double dkx(int ix) const { return ix == nx / 2 ? 0.0 : kx(ix); }
  double dky(int iy) const { return iy == ny / 2 ? 0.0 : ky(iy); }
  double dkz(int iz) const { return iz == nz / 2 ? 0.0 : kz(iz); }

  /// Box truncation: a mode survives when every |m_i| < fraction * n_i / 2.
  bool keep(int iz, int iy, int ix) const {
    const double f = dealias_fraction;
    return ix < f * nx / 2.0 && std::abs(my(iy)) < f * ny / 2.0 &&
           std::abs(mz(iz)) < f * nz / 2.0;
  }

  /// Weight of a half-spectrum column in sums over the full spectrum.
  double hermitian_weight(int ix) const {
    return (ix == 0 || ix == nx / 2) ? 1.0 : 2.0;
  }

  double x(int ix) const { return 2.0 * std::numbers::pi * ix / nx; }
  double y(int iy) const { return 2.0 * std::numbers::pi * iy / ny; }
  double z(int iz) const { return -1.0 + 2.0 * iz / nz; }

  /// Volume of the domain, 8 pi^2.
  static double volume() { return 8.0 * std::numbers::pi * std::numbers::pi; }

  bool operator==(const GridSpec&) const = default;

  std::string describe() const;
};

}  // namespace thinflow
