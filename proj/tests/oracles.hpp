#pragma once
// Independent reference values for the unit suites: analytic fields,
// brute-force quadrature and small helpers that avoid the library code
// under test wherever practical.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "thinflow/field.hpp"
#include "thinflow/transform.hpp"

namespace oracle {

using thinflow::GridSpec;
using thinflow::PhysicalField;
using thinflow::SpectralField;
using Fn = std::function<double(double, double, double)>;

inline constexpr double pi = std::numbers::pi;

inline GridSpec grid(int nx = 16, int ny = 16, int nz = 8) {
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  return g;
}

inline PhysicalField sample(const GridSpec& g, std::initializer_list<Fn> comps) {
  PhysicalField f(g, int(comps.size()));
  int c = 0;
  for (const auto& fn : comps) f.fill(c++, fn);
  return f;
}

inline SpectralField spectral(const GridSpec& g, std::initializer_list<Fn> comps) {
  return thinflow::to_spectral(sample(g, comps));
}

/// max |f_c(x) - fn(x)| over the grid.
inline double max_error(const PhysicalField& f, int c, const Fn& fn) {
  const GridSpec& g = f.grid();
  double m = 0.0;
  for (int iz = 0; iz < g.nz; ++iz)
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix)
        m = std::max(m, std::abs(f.at(c, iz, iy, ix) - fn(g.x(ix), g.y(iy), g.z(iz))));
  return m;
}

inline double max_error(const SpectralField& f, int c, const Fn& fn) {
  return max_error(thinflow::to_physical(f), c, fn);
}

/// Grid quadrature of sum_c f_c^2 over the domain (exact for band-limited fields).
inline double quadrature_l2(const PhysicalField& f) {
  double s = 0.0;
  for (double x : f.data()) s += x * x;
  return s * GridSpec::volume() / double(f.grid().physical_size());
}

inline double quadrature_dot(const PhysicalField& a, const PhysicalField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) s += a.data()[i] * b.data()[i];
  return s * GridSpec::volume() / double(a.grid().physical_size());
}

inline double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

inline double rel(double num, double den) { return den == 0.0 ? num : num / den; }

}  // namespace oracle
