#include "thinflow/operators.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "thinflow/transform.hpp"

namespace thinflow {

namespace {

double axis_wavenumber(const GridSpec& g, int axis, int iz, int iy, int ix) {
  switch (axis) {
    case 0: return g.dkx(ix);
    case 1: return g.dky(iy);
    default: return g.dkz(iz);
  }
}

void derivative_into(const GridSpec& g, int axis, const cplx* in, cplx* out,
                     double scale = 1.0) {
  for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
    const double k = axis_wavenumber(g, axis, iz, iy, ix) * scale;
    out[i] = cplx(-k * in[i].imag(), k * in[i].real());
  });
}

}  // namespace

SpectralField derivative(const SpectralField& f, int axis) {
  if (axis < 0 || axis > 2) throw std::out_of_range("derivative axis must be 0, 1 or 2");
  SpectralField out(f.grid(), f.components());
  for (int c = 0; c < f.components(); ++c) derivative_into(f.grid(), axis, f.comp(c), out.comp(c));
  return out;
}

SpectralField gradient_H(const SpectralField& f) {
  if (f.components() != 1) throw std::invalid_argument("gradient_H expects a scalar field");
  SpectralField out(f.grid(), 2);
  derivative_into(f.grid(), 0, f.comp(0), out.comp(0));
  derivative_into(f.grid(), 1, f.comp(0), out.comp(1));
  return out;
}

SpectralField gradient3(const SpectralField& f) {
  if (f.components() != 1) throw std::invalid_argument("gradient3 expects a scalar field");
  SpectralField out(f.grid(), 3);
  for (int a = 0; a < 3; ++a) derivative_into(f.grid(), a, f.comp(0), out.comp(a));
  return out;
}

SpectralField gradient_eps(const SpectralField& f, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("gradient_eps requires eps > 0");
  if (f.components() != 1) throw std::invalid_argument("gradient_eps expects a scalar field");
  SpectralField out(f.grid(), 3);
  derivative_into(f.grid(), 0, f.comp(0), out.comp(0));
  derivative_into(f.grid(), 1, f.comp(0), out.comp(1));
  derivative_into(f.grid(), 2, f.comp(0), out.comp(2), 1.0 / (eps * eps));
  return out;
}

SpectralField laplacian3(const SpectralField& f) {
  const GridSpec& g = f.grid();
  SpectralField out(g, f.components());
  for (int c = 0; c < f.components(); ++c) {
    const cplx* in = f.comp(c);
    cplx* o = out.comp(c);
    for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
      const double kx = g.dkx(ix), ky = g.dky(iy), kz = g.dkz(iz);
      o[i] = -(kx * kx + ky * ky + kz * kz) * in[i];
    });
  }
  return out;
}

SpectralField divergence3(const SpectralField& u) {
  if (u.components() != 3) throw std::invalid_argument("divergence3 expects three components");
  const GridSpec& g = u.grid();
  SpectralField out(g, 1);
  cplx* o = out.comp(0);
  const cplx* a = u.comp(0);
  const cplx* b = u.comp(1);
  const cplx* c = u.comp(2);
  for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
    const cplx s = g.dkx(ix) * a[i] + g.dky(iy) * b[i] + g.dkz(iz) * c[i];
    o[i] = cplx(-s.imag(), s.real());
  });
  return out;
}

SpectralField divergence_H(const SpectralField& v) {
  if (v.components() < 2) throw std::invalid_argument("divergence_H expects >= 2 components");
  const GridSpec& g = v.grid();
  SpectralField out(g, 1);
  cplx* o = out.comp(0);
  const cplx* a = v.comp(0);
  const cplx* b = v.comp(1);
  for_each_mode(g, [&](std::size_t i, int, int iy, int ix) {
    const cplx s = g.dkx(ix) * a[i] + g.dky(iy) * b[i];
    o[i] = cplx(-s.imag(), s.real());
  });
  return out;
}

void dealias_in_place(SpectralField& f) {
  const GridSpec& g = f.grid();
  for (int c = 0; c < f.components(); ++c) {
    cplx* p = f.comp(c);
    for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
      if (!g.keep(iz, iy, ix)) p[i] = cplx(0.0, 0.0);
    });
  }
}

SpectralField dealias(SpectralField f) {
  dealias_in_place(f);
  return f;
}

bool is_dealiased(const SpectralField& f) {
  const GridSpec& g = f.grid();
  bool ok = true;
  for (int c = 0; c < f.components(); ++c) {
    const cplx* p = f.comp(c);
    for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
      if (!g.keep(iz, iy, ix) && p[i] != cplx(0.0, 0.0)) ok = false;
    });
  }
  return ok;
}

SpectralField dealiased_product(const SpectralField& a, const SpectralField& b) {
  if (a.components() != 1 || b.components() != 1 || !(a.grid() == b.grid())) {
    throw std::invalid_argument("dealiased_product expects two scalars on one grid");
  }
  PhysicalField pa = to_physical(a);
  PhysicalField pb = to_physical(b);
  for (std::size_t i = 0; i < pa.data().size(); ++i) pa.data()[i] *= pb.data()[i];
  SpectralField out = to_spectral(pa);
  dealias_in_place(out);
  return out;
}

void remove_mean_in_place(SpectralField& f) {
  for (int c = 0; c < f.components(); ++c) f.comp(c)[0] = cplx(0.0, 0.0);
}

void symmetrize_in_place(SpectralField& f) {
  const GridSpec& g = f.grid();
  for (int c = 0; c < f.components(); ++c) {
    for (int ix : {0, g.nx / 2}) {
      for (int iz = 0; iz < g.nz; ++iz) {
        for (int iy = 0; iy < g.ny; ++iy) {
          const int jz = (g.nz - iz) % g.nz;
          const int jy = (g.ny - iy) % g.ny;
          const std::size_t a = g.spectral_index(iz, iy, ix);
          const std::size_t b = g.spectral_index(jz, jy, ix);
          if (a > b) continue;
          cplx* p = f.comp(c);
          if (a == b) {
            p[a] = cplx(p[a].real(), 0.0);
          } else {
            const cplx m = 0.5 * (p[a] + std::conj(p[b]));
            p[a] = m;
            p[b] = std::conj(m);
          }
        }
      }
    }
  }
}

SpectralField random_smooth_field(const GridSpec& g, int components, std::uint64_t seed,
                                  double slope) {
  // Draw white noise on the grid so Hermitian symmetry comes for free, then
  // shape and truncate its spectrum.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PhysicalField noise(g, components);
  for (double& v : noise.data()) v = normal(rng);
  SpectralField f = to_spectral(noise);
  for (int c = 0; c < components; ++c) {
    cplx* p = f.comp(c);
    for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
      if (!g.keep(iz, iy, ix)) {
        p[i] = cplx(0.0, 0.0);
        return;
      }
      const double k2 = g.kx(ix) * g.kx(ix) + g.ky(iy) * g.ky(iy) + g.kz(iz) * g.kz(iz);
      p[i] *= std::pow(1.0 + k2, -0.5 * slope) * std::sqrt(double(g.physical_size()));
    });
  }
  return f;
}

}  // namespace thinflow
