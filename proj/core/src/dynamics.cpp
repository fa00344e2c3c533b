#include "thinflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "thinflow/operators.hpp"
#include "thinflow/projectors.hpp"
#include "thinflow/transform.hpp"

namespace thinflow {

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::SNS: return "SNS";
    case ModelKind::rSNS: return "rSNS";
    case ModelKind::PE_strong: return "PE_strong";
    case ModelKind::PE_weak: return "PE_weak";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "SNS") return ModelKind::SNS;
  if (s == "rSNS") return ModelKind::rSNS;
  if (s == "PE_strong" || s == "PE") return ModelKind::PE_strong;
  if (s == "PE_weak") return ModelKind::PE_weak;
  throw std::invalid_argument("unknown model variant '" + s + "'");
}

KernelK ModelVariant::effective_kernel() const {
  switch (kind) {
    case ModelKind::SNS: return KernelK::identity();
    case ModelKind::PE_strong: return KernelK::zero();
    default: return kernel;
  }
}

void ModelVariant::validate() const {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("model.eps must lie in (0,1]");
  if (!(alpha_sigma >= 0.0) || !std::isfinite(alpha_sigma)) {
    throw std::invalid_argument("model.alpha_sigma must be finite and >= 0");
  }
  kernel.validate();
}

namespace {

PhysicalField physical_gradient(const SpectralField& q) {
  const GridSpec& g = q.grid();
  PhysicalField out(g, 3);
  SpectralField d(g, 1);
  for (int axis = 0; axis < 3; ++axis) {
    cplx* o = d.comp(0);
    const cplx* in = q.comp(0);
    for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
      const double k = axis == 0 ? g.dkx(ix) : (axis == 1 ? g.dky(iy) : g.dkz(iz));
      o[i] = cplx(-k * in[i].imag(), k * in[i].real());
    });
    inverse_component(g, d.comp(0), out.comp(axis));
  }
  return out;
}

// sum_j a_j grad_j q, transformed and truncated.
void transport_into(const PhysicalField& a, const PhysicalField& grad_q, std::vector<double>& buf,
                    cplx* out, const GridSpec& g, bool skip_vertical = false) {
  const std::size_t n = g.physical_size();
  const double* a0 = a.comp(0);
  const double* a1 = a.comp(1);
  const double* a2 = a.comp(2);
  const double* g0 = grad_q.comp(0);
  const double* g1 = grad_q.comp(1);
  const double* g2 = grad_q.comp(2);
  if (skip_vertical) {
    for (std::size_t p = 0; p < n; ++p) buf[p] = a0[p] * g0[p] + a1[p] * g1[p];
  } else {
    for (std::size_t p = 0; p < n; ++p) buf[p] = a0[p] * g0[p] + a1[p] * g1[p] + a2[p] * g2[p];
  }
  forward_component(g, buf.data(), out);
  for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
    if (!g.keep(iz, iy, ix)) out[i] = cplx(0.0, 0.0);
  });
}

// target[tc] += scale * Laplacian(src[sc]).
void add_laplacian(SpectralField& target, int tc, const SpectralField& src, int sc,
                   double scale) {
  const GridSpec& g = target.grid();
  cplx* o = target.comp(tc);
  const cplx* in = src.comp(sc);
  for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
    const double kx = g.dkx(ix), ky = g.dky(iy), kz = g.dkz(iz);
    o[i] -= scale * (kx * kx + ky * ky + kz * kz) * in[i];
  });
}

// Subtract grad_H p from a two-component field.
void subtract_grad_h(SpectralField& v, const SpectralField& p) {
  const GridSpec& g = v.grid();
  cplx* vx = v.comp(0);
  cplx* vy = v.comp(1);
  const cplx* pp = p.comp(0);
  for_each_mode(g, [&](std::size_t i, int, int iy, int ix) {
    const cplx ip = cplx(-pp[i].imag(), pp[i].real());
    vx[i] -= g.dkx(ix) * ip;
    vy[i] -= g.dky(iy) * ip;
  });
}

// Antiderivative in z with zero vertical mean: p_hat = f_hat / (i k_z).
SpectralField z_antiderivative(const SpectralField& f) {
  const GridSpec& g = f.grid();
  SpectralField out(g, 1);
  cplx* o = out.comp(0);
  const cplx* in = f.comp(0);
  for_each_mode(g, [&](std::size_t i, int iz, int, int) {
    const double kz = g.dkz(iz);
    if (kz == 0.0) return;
    o[i] = cplx(in[i].imag() / kz, -in[i].real() / kz);
  });
  return out;
}

bool needs_grad_w(const ModelVariant& variant) {
  if (variant.is_ns()) return true;
  return variant.kind == ModelKind::PE_weak &&
         variant.effective_kernel().kind != KernelK::Kind::zero;
}

}  // namespace

SpectralField vertical_velocity(const SpectralField& v, double tol) {
  if (v.components() != 2) throw std::invalid_argument("vertical_velocity expects 2 components");
  const GridSpec& g = v.grid();
  SpectralField w(g, 1);
  const cplx* vx = v.comp(0);
  const cplx* vy = v.comp(1);
  cplx* ww = w.comp(0);
  double scale = 0.0;
  double baro = 0.0;
  for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
    const double kx = g.dkx(ix), ky = g.dky(iy);
    const cplx div = kx * vx[i] + ky * vy[i];
    scale = std::max(scale, std::abs(kx * vx[i]) + std::abs(ky * vy[i]));
    const double kz = g.dkz(iz);
    if (iz == 0) {
      baro = std::max(baro, std::abs(div));
      return;
    }
    // d_z w = -div_H v  =>  i kz w = -i div
    if (kz != 0.0) ww[i] = -div / kz;
  });
  if (baro > tol * std::max(scale, 1e-300) && baro > 0.0) {
    throw std::domain_error("vertical_velocity: barotropic divergence " + std::to_string(baro) +
                            " exceeds tolerance");
  }
  // Fix the z-independent part by w(z = 1) = 0, where exp(i pi n) = (-1)^n.
  const int nxh = g.nxh();
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < nxh; ++ix) {
      cplx sum(0.0, 0.0);
      for (int iz = 1; iz < g.nz; ++iz) {
        const cplx c = ww[g.spectral_index(iz, iy, ix)];
        sum += (g.mz(iz) % 2 == 0) ? c : -c;
      }
      ww[g.spectral_index(0, iy, ix)] = -sum;
    }
  }
  return w;
}

SpectralField buoyancy(const SpectralField& theta, const PhysicalConstants& constants) {
  SpectralField b = theta;
  b *= constants.g;
  return b;
}

namespace {

SpectralField pressure_from(const SpectralField& theta, const PhysicalField& grad_w,
                            const ModelVariant& variant, const NoiseModel& noise,
                            const PhysicalConstants& constants) {
  if (!variant.is_pe()) {
    throw std::invalid_argument("hydrostatic_pressure is defined for PE variants only");
  }
  SpectralField dzp = buoyancy(theta, constants);
  dzp *= -1.0;
  const KernelK kernel = variant.effective_kernel();
  if (variant.kind == ModelKind::PE_weak && kernel.kind != KernelK::Kind::zero &&
      variant.terms.transport_noise && !noise.silent() && grad_w.components() == 3) {
    const double a2e2 = variant.alpha_sigma * variant.alpha_sigma * variant.eps * variant.eps;
    dzp.axpy(0.5 * a2e2, divergence_aK_grad(noise, kernel, grad_w));
  }
  return z_antiderivative(dzp);
}

}  // namespace

SpectralField hydrostatic_pressure(const SpectralField& theta, const SpectralField& w,
                                   const ModelVariant& variant, const NoiseModel& noise,
                                   const PhysicalConstants& constants) {
  PhysicalField grad_w;
  if (needs_grad_w(variant) && !w.empty()) grad_w = physical_gradient(w);
  return pressure_from(theta, grad_w, variant, noise, constants);
}

StateEvaluation::StateEvaluation(const State& s, const ModelVariant& variant,
                                 const NoiseModel& noise)
    : state_(&s) {
  (void)noise;
  const GridSpec& g = s.v.grid();
  w_ = vertical_velocity(s.v);
  u_phys_ = PhysicalField(g, 3);
  inverse_component(g, s.v.comp(0), u_phys_.comp(0));
  inverse_component(g, s.v.comp(1), u_phys_.comp(1));
  inverse_component(g, w_.comp(0), u_phys_.comp(2));
  grad_vx_ = physical_gradient(s.v.component(0));
  grad_vy_ = physical_gradient(s.v.component(1));
  grad_theta_ = physical_gradient(s.theta);
  if (needs_grad_w(variant)) grad_w_ = physical_gradient(w_);
}

Tendency rhs_drift(const State& s, const ModelVariant& variant, const NoiseModel& noise,
                   const PhysicalConstants& constants, ViscousTerm viscous) {
  StateEvaluation ev(s, variant, noise);
  return rhs_drift(ev, variant, noise, constants, viscous);
}

Tendency rhs_drift(const StateEvaluation& ev, const ModelVariant& variant,
                   const NoiseModel& noise, const PhysicalConstants& constants,
                   ViscousTerm viscous) {
  const State& s = ev.state();
  const GridSpec& g = s.v.grid();
  const std::size_t n = g.physical_size();
  const KernelK kernel = variant.effective_kernel();
  const bool stochastic = !noise.silent() && variant.terms.transport_noise;
  const bool advect = variant.terms.advection;

  // Advecting velocity u* = u - u_s (or just -u_s without self-advection).
  PhysicalField ustar = ev.u_phys();
  if (!advect) std::fill(ustar.data().begin(), ustar.data().end(), 0.0);
  if (stochastic) {
    const auto& us = noise.drift_phys().data();
    auto& d = ustar.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= us[i];
  }

  std::vector<double> buf(n);
  const bool ns = variant.is_ns();
  const bool moving = advect || stochastic;
  SpectralField f(g, ns ? 3 : 2);
  if (moving) {
    transport_into(ustar, ev.grad_vx(), buf, f.comp(0), g);
    transport_into(ustar, ev.grad_vy(), buf, f.comp(1), g);
    if (ns) transport_into(ustar, ev.grad_w(), buf, f.comp(2), g);
    f *= -1.0;
  }

  if (stochastic) {
    SpectralField dx = divergence_a_grad(noise, ev.grad_vx());
    SpectralField dy = divergence_a_grad(noise, ev.grad_vy());
    std::size_t m = f.component_size();
    for (std::size_t i = 0; i < m; ++i) {
      f.comp(0)[i] += 0.5 * dx.comp(0)[i];
      f.comp(1)[i] += 0.5 * dy.comp(0)[i];
    }
    if (ns && kernel.kind != KernelK::Kind::zero) {
      const double a2 = variant.alpha_sigma * variant.alpha_sigma;
      SpectralField dw = divergence_aK_grad(noise, kernel, ev.grad_w());
      for (std::size_t i = 0; i < m; ++i) f.comp(2)[i] += 0.5 * a2 * dw.comp(0)[i];
    }
  }

  Tendency out;
  if (ns) {
    // Buoyancy -(g theta / eps^2) e_z is folded into the weighted projector.
    SpectralField b = buoyancy(s.theta, constants);
    b *= -1.0;
    out.v = project_Peps_horizontal(f, b, variant.eps);
  } else {
    SpectralField p = pressure_from(s.theta, ev.grad_w(), variant, noise, constants);
    subtract_grad_h(f, p);
    project_P_in_place(f);
    out.v = std::move(f);
  }

  // Tracer.
  out.theta = SpectralField(g, 1);
  if (moving) {
    transport_into(ustar, ev.grad_theta(), buf, out.theta.comp(0), g);
    out.theta *= -1.0;
  }
  if (stochastic) out.theta.axpy(0.5, divergence_a_grad(noise, ev.grad_theta()));

  if (viscous == ViscousTerm::include) {
    add_laplacian(out.v, 0, s.v, 0, 1.0);
    add_laplacian(out.v, 1, s.v, 1, 1.0);
    add_laplacian(out.theta, 0, s.theta, 0, 1.0);
  }
  remove_mean_in_place(out.theta);
  if (!out.v.all_finite() || !out.theta.all_finite()) {
    throw std::domain_error("rhs_drift produced a non-finite value");
  }
  return out;
}

Tendency rhs_diffusion(const StateEvaluation& ev, const ModelVariant& variant,
                       const NoiseModel& noise, std::span<const double> coeffs) {
  const State& s = ev.state();
  const GridSpec& g = s.v.grid();
  const std::size_t n = g.physical_size();
  Tendency out;
  out.v = SpectralField(g, 2);
  out.theta = SpectralField(g, 1);
  if (noise.size() == 0) return out;

  const PhysicalField sigma = noise.combine(coeffs);
  SpectralField sigma_hat(g, 3);
  for (std::size_t k = 0; k < noise.size(); ++k) sigma_hat.axpy(coeffs[k], noise.modes()[k].phi);
  const bool flat = noise.bidimensional();
  const KernelK kernel = variant.effective_kernel();
  const double alpha = variant.alpha_sigma;
  const bool transport = variant.terms.transport_noise;
  std::vector<double> buf(n);

  SpectralField f(g, 3);
  if (transport) {
    transport_into(sigma, ev.grad_vx(), buf, f.comp(0), g, flat);
    transport_into(sigma, ev.grad_vy(), buf, f.comp(1), g, flat);
    f *= -1.0;
  }
  // Additive forcing Delta sigma^H.
  add_laplacian(f, 0, sigma_hat, 0, 1.0);
  add_laplacian(f, 1, sigma_hat, 1, 1.0);

  if (variant.is_ns()) {
    // Vertical component: alpha ( -K[sigma . grad w] + Delta sigma^z ).
    if (transport) {
      transport_into(sigma, ev.grad_w(), buf, f.comp(2), g, flat);
      apply_K_in_place(f.comp(2), g, kernel, 1);
    }
    SpectralField vz(g, 1);
    add_laplacian(vz, 0, sigma_hat, 2, 1.0);
    const std::size_t m = f.component_size();
    for (std::size_t i = 0; i < m; ++i) f.comp(2)[i] = alpha * (vz.comp(0)[i] - f.comp(2)[i]);
    out.v = project_Peps_horizontal(f, SpectralField{}, variant.eps);
  } else {
    SpectralField fh(g, 2);
    fh.set_component(0, f.component(0));
    fh.set_component(1, f.component(1));
    if (variant.kind == ModelKind::PE_weak) {
      const double ae2 = alpha * variant.eps * variant.eps;
      SpectralField dzdp(g, 1);
      bool any = false;
      if (kernel.kind != KernelK::Kind::zero && transport) {
        transport_into(sigma, ev.grad_w(), buf, dzdp.comp(0), g, flat);
        apply_K_in_place(dzdp.comp(0), g, kernel, 1);
        dzdp *= -ae2;
        any = true;
      }
      if (variant.additive_vertical_noise) {
        add_laplacian(dzdp, 0, sigma_hat, 2, ae2);
        any = true;
      }
      if (any) subtract_grad_h(fh, z_antiderivative(dzdp));
    }
    project_P_in_place(fh);
    out.v = std::move(fh);
  }

  if (transport) {
    transport_into(sigma, ev.grad_theta(), buf, out.theta.comp(0), g, flat);
    out.theta *= -1.0;
    remove_mean_in_place(out.theta);
  }
  return out;
}

Tendency rhs_diffusion_mode(const State& s, const ModelVariant& variant, const NoiseModel& noise,
                            std::size_t k) {
  if (k >= noise.size()) throw std::out_of_range("noise mode index out of range");
  StateEvaluation ev(s, variant, noise);
  std::vector<double> e(noise.size(), 0.0);
  e[k] = 1.0;
  return rhs_diffusion(ev, variant, noise, e);
}

}  // namespace thinflow
