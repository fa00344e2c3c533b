#include "thinflow/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "thinflow/noise.hpp"
#include "thinflow/operators.hpp"
#include "thinflow/transform.hpp"

namespace thinflow {

void KernelK::validate() const {
  if ((kind == Kind::raised_cosine || kind == Kind::gaussian) && !(cutoff > 0.0)) {
    throw std::invalid_argument("model.kernel.cutoff must be positive");
  }
}

double KernelK::multiplier(double kmag) const {
  switch (kind) {
    case Kind::identity: return 1.0;
    case Kind::zero: return 0.0;
    case Kind::gaussian: {
      const double r = kmag / cutoff;
      return std::exp(-0.5 * r * r);
    }
    case Kind::raised_cosine:
      if (kmag <= cutoff) return 1.0;
      if (kmag >= 2.0 * cutoff) return 0.0;
      return 0.5 * (1.0 + std::cos(std::numbers::pi * (kmag - cutoff) / cutoff));
  }
  return 0.0;
}

std::string to_string(KernelK::Kind kind) {
  switch (kind) {
    case KernelK::Kind::raised_cosine: return "raised_cosine";
    case KernelK::Kind::gaussian: return "gaussian";
    case KernelK::Kind::identity: return "identity";
    case KernelK::Kind::zero: return "zero";
  }
  return "?";
}

KernelK::Kind kernel_kind_from_string(const std::string& s) {
  if (s == "raised_cosine" || s == "spectral_lowpass_raised_cosine") return KernelK::Kind::raised_cosine;
  if (s == "gaussian") return KernelK::Kind::gaussian;
  if (s == "identity") return KernelK::Kind::identity;
  if (s == "zero") return KernelK::Kind::zero;
  throw std::invalid_argument("unknown kernel kind '" + s + "'");
}

double kernel_h3_sum(const KernelK& kernel, const GridSpec& g) {
  double sum = 0.0;
  for_each_mode(g, [&](std::size_t, int iz, int iy, int ix) {
    if (!g.keep(iz, iy, ix)) return;
    const double k2 = g.kx(ix) * g.kx(ix) + g.ky(iy) * g.ky(iy) + g.kz(iz) * g.kz(iz);
    sum += g.hermitian_weight(ix) * kernel.multiplier(std::sqrt(k2)) * std::pow(1.0 + k2, 1.5);
  });
  return sum;
}

void apply_K_in_place(cplx* data, const GridSpec& g, const KernelK& kernel, int power) {
  if (kernel.kind == KernelK::Kind::identity) return;
  for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
    const double k2 = g.kx(ix) * g.kx(ix) + g.ky(iy) * g.ky(iy) + g.kz(iz) * g.kz(iz);
    double m = kernel.multiplier(std::sqrt(k2));
    if (power == 2) m *= m;
    data[i] *= m;
  });
}

SpectralField apply_K(const SpectralField& f, const KernelK& kernel) {
  SpectralField out = f;
  for (int c = 0; c < out.components(); ++c) apply_K_in_place(out.comp(c), out.grid(), kernel, 1);
  return out;
}

SpectralField apply_K2(const SpectralField& f, const KernelK& kernel) {
  SpectralField out = f;
  for (int c = 0; c < out.components(); ++c) apply_K_in_place(out.comp(c), out.grid(), kernel, 2);
  return out;
}

SpectralField apply_Ialpha(const SpectralField& u, double alpha) {
  if (u.components() != 3) throw std::invalid_argument("apply_Ialpha expects three components");
  SpectralField out = u;
  cplx* z = out.comp(2);
  for (std::size_t i = 0; i < out.component_size(); ++i) z[i] *= alpha;
  return out;
}

SpectralField apply_IK(const SpectralField& u, const KernelK& kernel) {
  if (u.components() != 3) throw std::invalid_argument("apply_IK expects three components");
  SpectralField out = u;
  apply_K_in_place(out.comp(2), out.grid(), kernel, 1);
  return out;
}

SpectralField divergence_aK_grad(const NoiseModel& model, const KernelK& kernel,
                                 const PhysicalField& grad_w) {
  const GridSpec& g = model.grid();
  if (kernel.kind == KernelK::Kind::zero) return SpectralField(g, 1);
  if (kernel.kind == KernelK::Kind::identity) return divergence_a_grad(model, grad_w);

  const std::size_t n = g.physical_size();
  const int rows = model.bidimensional() ? 2 : 3;
  PhysicalField flux(g, 3);
  std::vector<double> s(n);
  SpectralField s_hat(g, 1);
  for (const NoiseMode& mode : model.modes()) {
    const double* f0 = mode.phi_phys.comp(0);
    const double* f1 = mode.phi_phys.comp(1);
    const double* f2 = mode.phi_phys.comp(2);
    const double* g0 = grad_w.comp(0);
    const double* g1 = grad_w.comp(1);
    const double* g2 = grad_w.comp(2);
    for (std::size_t p = 0; p < n; ++p) s[p] = f0[p] * g0[p] + f1[p] * g1[p] + f2[p] * g2[p];
    // Filter phi_k . grad w with m^2, then spread it back along phi_k.
    forward_component(g, s.data(), s_hat.comp(0));
    dealias_in_place(s_hat);
    apply_K_in_place(s_hat.comp(0), g, kernel, 2);
    inverse_component(g, s_hat.comp(0), s.data());
    for (int i = 0; i < rows; ++i) {
      const double* fi = mode.phi_phys.comp(i);
      double* out = flux.comp(i);
      for (std::size_t p = 0; p < n; ++p) out[p] += fi[p] * s[p];
    }
  }
  SpectralField flux_hat(g, 3);
  for (int i = 0; i < rows; ++i) forward_component(g, flux.comp(i), flux_hat.comp(i));
  SpectralField out = divergence3(flux_hat);
  dealias_in_place(out);
  return out;
}

SpectralField apply_aK_divergence(const SpectralField& w, const NoiseModel& model,
                                  const KernelK& kernel) {
  if (w.components() != 1) throw std::invalid_argument("apply_aK_divergence expects a scalar");
  return divergence_aK_grad(model, kernel, to_physical(gradient3(w)));
}

}  // namespace thinflow
