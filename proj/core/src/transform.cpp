#include "thinflow/transform.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace thinflow {

namespace {

// FFTW's planner is not re-entrant; plan creation and destruction are
// serialised, execution with per-thread buffers is not.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Workspace {
  GridSpec grid;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  explicit Workspace(const GridSpec& g) : grid(g) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    real = fftw_alloc_real(g.physical_size());
    spec = fftw_alloc_complex(g.spectral_size());
    if (!real || !spec) throw std::bad_alloc();
    // FFTW_ESTIMATE keeps plan selection deterministic, which in turn keeps
    // results bitwise reproducible between runs.
    r2c = fftw_plan_dft_r2c_3d(g.nz, g.ny, g.nx, real, spec, FFTW_ESTIMATE);
    c2r = fftw_plan_dft_c2r_3d(g.nz, g.ny, g.nx, spec, real, FFTW_ESTIMATE);
    if (!r2c || !c2r) throw std::runtime_error("FFTW plan creation failed");
  }
  ~Workspace() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
    fftw_free(real);
    fftw_free(spec);
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
};

Workspace& workspace_for(const GridSpec& g) {
  thread_local std::map<std::tuple<int, int, int>, std::unique_ptr<Workspace>> cache;
  auto key = std::make_tuple(g.nx, g.ny, g.nz);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<Workspace>(g)).first;
  }
  return *it->second;
}

}  // namespace

// The vertical grid starts at z = -1, so exp(i pi n z_l) carries an extra
// factor (-1)^n relative to the plain DFT kernel. The sign depends only on the
// parity of iz because nz is even.
void forward_component(const GridSpec& g, const double* in, cplx* out) {
  Workspace& ws = workspace_for(g);
  std::memcpy(ws.real, in, sizeof(double) * g.physical_size());
  fftw_execute(ws.r2c);
  const double inv_n = 1.0 / double(g.physical_size());
  const int nxh = g.nxh();
  for (int iz = 0; iz < g.nz; ++iz) {
    const double s = (iz % 2 == 0) ? inv_n : -inv_n;
    for (int iy = 0; iy < g.ny; ++iy) {
      const std::size_t base = g.spectral_index(iz, iy, 0);
      for (int ix = 0; ix < nxh; ++ix) {
        out[base + ix] = cplx(ws.spec[base + ix][0] * s, ws.spec[base + ix][1] * s);
      }
    }
  }
}

void inverse_component(const GridSpec& g, const cplx* in, double* out) {
  Workspace& ws = workspace_for(g);
  const int nxh = g.nxh();
  for (int iz = 0; iz < g.nz; ++iz) {
    const double s = (iz % 2 == 0) ? 1.0 : -1.0;
    for (int iy = 0; iy < g.ny; ++iy) {
      const std::size_t base = g.spectral_index(iz, iy, 0);
      for (int ix = 0; ix < nxh; ++ix) {
        ws.spec[base + ix][0] = s * in[base + ix].real();
        ws.spec[base + ix][1] = s * in[base + ix].imag();
      }
    }
  }
  fftw_execute(ws.c2r);
  std::memcpy(out, ws.real, sizeof(double) * g.physical_size());
}

SpectralField to_spectral(const PhysicalField& f) {
  if (f.components() == 0) throw std::invalid_argument("transform of an empty field");
  SpectralField out(f.grid(), f.components());
  for (int c = 0; c < f.components(); ++c) forward_component(f.grid(), f.comp(c), out.comp(c));
  return out;
}

PhysicalField to_physical(const SpectralField& f) {
  if (f.components() == 0) throw std::invalid_argument("transform of an empty field");
  PhysicalField out(f.grid(), f.components());
  for (int c = 0; c < f.components(); ++c) inverse_component(f.grid(), f.comp(c), out.comp(c));
  return out;
}

}  // namespace thinflow
