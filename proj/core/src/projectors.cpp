#include "thinflow/projectors.hpp"

#include <stdexcept>

#include "thinflow/operators.hpp"

namespace thinflow {

SpectralField project_Peps(const SpectralField& u, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("project_Peps requires eps > 0");
  if (u.components() != 3) throw std::invalid_argument("project_Peps expects three components");
  const GridSpec& g = u.grid();
  const double e2 = eps * eps;
  SpectralField out = u;
  cplx* ox = out.comp(0);
  cplx* oy = out.comp(1);
  cplx* oz = out.comp(2);
  for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
    const double kx = g.dkx(ix), ky = g.dky(iy), kz = g.dkz(iz);
    // Multiply numerator and denominator by eps^2 to stay bounded as eps -> 0.
    const double den = e2 * (kx * kx + ky * ky) + kz * kz;
    if (den == 0.0) return;
    const cplx kdotu = kx * ox[i] + ky * oy[i] + kz * oz[i];
    const cplx s = kdotu / den;
    ox[i] -= e2 * kx * s;
    oy[i] -= e2 * ky * s;
    oz[i] -= kz * s;
  });
  return out;
}

SpectralField project_Peps_horizontal(const SpectralField& f, const SpectralField& b,
                                      double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("project_Peps requires eps > 0");
  if (f.components() != 3) throw std::invalid_argument("project_Peps expects three components");
  const GridSpec& g = f.grid();
  const double e2 = eps * eps;
  SpectralField out(g, 2);
  const cplx* fx = f.comp(0);
  const cplx* fy = f.comp(1);
  const cplx* fz = f.comp(2);
  const cplx* bb = b.empty() ? nullptr : b.comp(0);
  cplx* ox = out.comp(0);
  cplx* oy = out.comp(1);
  for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
    const double kx = g.dkx(ix), ky = g.dky(iy), kz = g.dkz(iz);
    ox[i] = fx[i];
    oy[i] = fy[i];
    const double den = e2 * (kx * kx + ky * ky) + kz * kz;
    if (den == 0.0) return;
    cplx num = e2 * (kx * fx[i] + ky * fy[i] + kz * fz[i]);
    if (bb) num += kz * bb[i];
    const cplx s = num / den;
    ox[i] -= kx * s;
    oy[i] -= ky * s;
  });
  return out;
}

SpectralField project_A(const SpectralField& v) {
  const GridSpec& g = v.grid();
  SpectralField out(g, v.components());
  const std::size_t plane = std::size_t(g.ny) * g.nxh();
  for (int c = 0; c < v.components(); ++c) {
    std::copy(v.comp(c), v.comp(c) + plane, out.comp(c));
  }
  return out;
}

SpectralField project_R(const SpectralField& v) {
  SpectralField out = v;
  const std::size_t plane = std::size_t(v.grid().ny) * v.grid().nxh();
  for (int c = 0; c < out.components(); ++c) {
    std::fill(out.comp(c), out.comp(c) + plane, cplx(0.0, 0.0));
  }
  return out;
}

namespace {
void leray2d_range(SpectralField& v, int iz_begin, int iz_end) {
  const GridSpec& g = v.grid();
  cplx* vx = v.comp(0);
  cplx* vy = v.comp(1);
  const int nxh = g.nxh();
  for (int iz = iz_begin; iz < iz_end; ++iz)
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < nxh; ++ix) {
        const std::size_t i = g.spectral_index(iz, iy, ix);
        const double kx = g.dkx(ix), ky = g.dky(iy);
        const double k2 = kx * kx + ky * ky;
        if (k2 == 0.0) continue;
        const cplx s = (kx * vx[i] + ky * vy[i]) / k2;
        vx[i] -= kx * s;
        vy[i] -= ky * s;
      }
}
}  // namespace

SpectralField project_leray2d(const SpectralField& v) {
  if (v.components() < 2) throw std::invalid_argument("project_leray2d expects >= 2 components");
  SpectralField out = v;
  leray2d_range(out, 0, v.grid().nz);
  return out;
}

void project_P_in_place(SpectralField& v) {
  if (v.components() != 2) throw std::invalid_argument("project_P expects two components");
  // Only the barotropic (k_z = 0) plane is touched; the baroclinic part passes.
  leray2d_range(v, 0, 1);
}

SpectralField project_P(const SpectralField& v) {
  SpectralField out = v;
  project_P_in_place(out);
  return out;
}

}  // namespace thinflow
