#include "thinflow/integrator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "thinflow/kernel.hpp"
#include "thinflow/operators.hpp"
#include "thinflow/projectors.hpp"
#include "thinflow/transform.hpp"

namespace thinflow {

void StepperConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("stepper.dt must be > 0");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("stepper.t_end must be > 0");
  }
  if (!(blowup_threshold > 0.0)) {
    throw std::invalid_argument("stepper.blowup_threshold must be > 0");
  }
  if (!(cfl_guard >= 0.0)) throw std::invalid_argument("stepper.cfl_guard must be >= 0");
  if (record_stride < 1) throw std::invalid_argument("stepper.record_stride must be >= 1");
}

std::uint64_t StepperConfig::step_count() const {
  return std::uint64_t(std::llround(t_end / dt));
}

double blowup_norm(const NormSample& s) { return std::sqrt(std::max(0.0, s.v_h1)); }

namespace {

void integrating_factor(SpectralField& f, double dt) {
  const GridSpec& g = f.grid();
  for (int c = 0; c < f.components(); ++c) {
    cplx* p = f.comp(c);
    for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
      const double kx = g.dkx(ix), ky = g.dky(iy), kz = g.dkz(iz);
      p[i] *= std::exp(-(kx * kx + ky * ky + kz * kz) * dt);
    });
  }
}

double grid_mean_square_integral(const std::vector<double>& f) {
  double s = 0.0;
  for (double x : f) s += x * x;
  return s * GridSpec::volume() / double(f.size());
}

// Sum_k ||phi_k . grad q||^2 on the grid, the exact discrete counterpart of
// (a grad q, grad q).
double transport_energy(const NoiseModel& noise, const PhysicalField& grad) {
  const std::size_t n = noise.grid().physical_size();
  std::vector<double> s(n);
  double total = 0.0;
  for (const NoiseMode& m : noise.modes()) {
    for (std::size_t p = 0; p < n; ++p) {
      s[p] = m.phi_phys.comp(0)[p] * grad.comp(0)[p] + m.phi_phys.comp(1)[p] * grad.comp(1)[p] +
             m.phi_phys.comp(2)[p] * grad.comp(2)[p];
    }
    total += grid_mean_square_integral(s);
  }
  return total;
}

// Filtered analogue: Sum_k ||m P(phi_k . grad w)||^2.
double filtered_transport_energy(const NoiseModel& noise, const KernelK& kernel,
                                 const PhysicalField& grad) {
  if (kernel.kind == KernelK::Kind::zero) return 0.0;
  if (kernel.kind == KernelK::Kind::identity) return transport_energy(noise, grad);
  const GridSpec& g = noise.grid();
  const std::size_t n = g.physical_size();
  std::vector<double> s(n);
  SpectralField sh(g, 1);
  double total = 0.0;
  for (const NoiseMode& m : noise.modes()) {
    for (std::size_t p = 0; p < n; ++p) {
      s[p] = m.phi_phys.comp(0)[p] * grad.comp(0)[p] + m.phi_phys.comp(1)[p] * grad.comp(1)[p] +
             m.phi_phys.comp(2)[p] * grad.comp(2)[p];
    }
    forward_component(g, s.data(), sh.comp(0));
    dealias_in_place(sh);
    apply_K_in_place(sh.comp(0), g, kernel, 1);
    total += norm_squared(sh, NormKind::L2());
  }
  return total;
}

double max_kept_mode(int n, double frac) {
  double m = 0;
  for (int i = 0; i < n / 2; ++i) {
    if (i < frac * n / 2.0) m = i;
  }
  return m;
}

}  // namespace

State step(const State& s, const ModelVariant& variant, const NoiseModel& noise,
           const PhysicalConstants& constants, std::span<const double> increments, double dt,
           EnergyTerms* energy, StepInfo* info) {
  if (!(dt > 0.0)) throw std::invalid_argument("step requires dt > 0");
  const GridSpec& g = s.v.grid();
  StateEvaluation ev(s, variant, noise);
  Tendency drift = rhs_drift(ev, variant, noise, constants, ViscousTerm::exclude);

  State next;
  next.time = s.time + dt;
  next.v = s.v;
  next.v.axpy(dt, drift.v);
  next.theta = s.theta;
  next.theta.axpy(dt, drift.theta);

  Tendency noise_inc;
  if (noise.size() > 0) {
    noise_inc = rhs_diffusion(ev, variant, noise, increments);
    next.v += noise_inc.v;
    next.theta += noise_inc.theta;
  }

  integrating_factor(next.v, dt);
  integrating_factor(next.theta, dt);
  project_P_in_place(next.v);
  dealias_in_place(next.v);
  dealias_in_place(next.theta);
  remove_mean_in_place(next.theta);
  if (!next.v.all_finite() || !next.theta.all_finite()) {
    throw std::domain_error("non-finite state after step");
  }

  if (info) {
    const PhysicalField& u = ev.u_phys();
    double umax[3] = {0, 0, 0};
    for (int c = 0; c < 3; ++c) {
      for (std::size_t p = 0; p < u.component_size(); ++p) {
        umax[c] = std::max(umax[c], std::abs(u.comp(c)[p]));
      }
    }
    info->cfl = dt * (umax[0] * max_kept_mode(g.nx, g.dealias_fraction) +
                      umax[1] * max_kept_mode(g.ny, g.dealias_fraction) +
                      umax[2] * std::numbers::pi * max_kept_mode(g.nz, g.dealias_fraction));
  }

  if (energy) {
    const double e2 = variant.eps * variant.eps;
    const SpectralField& w = ev.w();
    EnergyTerms& t = *energy;
    t.dt = dt;
    t.energy_before =
        0.5 * (norm_squared(s.v, NormKind::L2()) + e2 * norm_squared(w, NormKind::L2()));
    t.dissipation = norm_squared(s.v, NormKind::V()) + e2 * norm_squared(w, NormKind::V());
    if (variant.terms.transport_noise && !noise.silent()) {
      const double a2 = variant.alpha_sigma * variant.alpha_sigma;
      double stoch = transport_energy(noise, ev.grad_vx()) + transport_energy(noise, ev.grad_vy());
      if (variant.is_ns()) {
        stoch += e2 * a2 * filtered_transport_energy(noise, variant.effective_kernel(), ev.grad_w());
      }
      t.dissipation += 0.5 * stoch;
    }
    if (!noise_inc.v.empty()) {
      const SpectralField wg = vertical_velocity(noise_inc.v, 1e-6);
      t.quadratic_variation = 0.5 * (norm_squared(noise_inc.v, NormKind::L2()) +
                                     e2 * norm_squared(wg, NormKind::L2()));
      t.martingale = inner_product(s.v, noise_inc.v, NormKind::L2()) +
                     e2 * inner_product(w, wg, NormKind::L2());
    }
    t.buoyancy_work = -constants.g * inner_product(s.theta, w, NormKind::L2());
    const SpectralField wn = vertical_velocity(next.v);
    t.energy_after =
        0.5 * (norm_squared(next.v, NormKind::L2()) + e2 * norm_squared(wn, NormKind::L2()));
  }
  return next;
}

State step(const State& s, const ModelVariant& variant, const NoiseModel& noise,
           const PhysicalConstants& constants, const BrownianDriver& driver,
           std::uint64_t step_index, double dt) {
  const auto inc = driver.sample_increments(step_index, noise.size());
  return step(s, variant, noise, constants, inc, dt);
}

namespace {

NormSample sample_state(const State& s) {
  return sample_norms(s.v, vertical_velocity(s.v), s.theta);
}

bool check_blowup(const NormSample& smp, const StepperConfig& cfg, RunResult& r, double t,
                  double cfl) {
  if (!smp.all_finite()) {
    r.blew_up = true;
    r.blowup_reason = "nonfinite";
  } else if (blowup_norm(smp) > cfg.blowup_threshold) {
    r.blew_up = true;
    r.blowup_reason = "threshold";
  } else if (cfg.cfl_guard > 0.0 && cfl > cfg.cfl_guard) {
    r.blew_up = true;
    r.blowup_reason = "cfl";
  }
  if (r.blew_up) r.blowup_time = t;
  return r.blew_up;
}

void validate_pair(const ModelVariant& a, const ModelVariant& b) {
  if (a.is_pe() && b.is_pe()) {
    throw std::invalid_argument("coupled runs need at least one Navier-Stokes variant");
  }
  if (a.eps != b.eps) throw std::invalid_argument("coupled variants must share eps");
}

}  // namespace

RunResult integrate(const State& initial, const ModelVariant& variant, const NoiseModel& noise,
                    const PhysicalConstants& constants, const StepperConfig& stepper,
                    const BrownianDriver& driver) {
  stepper.validate();
  variant.validate();
  RunResult r;
  State s = initial;
  NormSample smp = sample_state(s);
  r.times.push_back(s.time);
  r.samples.push_back(smp);
  const double t0 = s.time;
  if (check_blowup(smp, stepper, r, s.time, 0.0)) {
    r.final_state = s;
    return r;
  }
  const std::uint64_t n_steps = stepper.step_count();
  std::vector<double> inc(noise.size());
  for (std::uint64_t n = 0; n < n_steps; ++n) {
    driver.sample_increments(n, inc);
    StepInfo info;
    EnergyTerms et;
    try {
      s = step(s, variant, noise, constants, inc, stepper.dt,
               stepper.record_energy ? &et : nullptr, &info);
    } catch (const std::domain_error&) {
      r.blew_up = true;
      r.blowup_reason = "nonfinite";
      r.blowup_time = t0 + double(n + 1) * stepper.dt;
      break;
    }
    s.time = t0 + double(n + 1) * stepper.dt;
    r.steps = n + 1;
    if (stepper.record_energy) r.energy.push_back(et);
    smp = sample_state(s);
    const bool last = (n + 1 == n_steps);
    const bool blown = check_blowup(smp, stepper, r, s.time, info.cfl);
    if (blown || last || (n + 1) % std::uint64_t(stepper.record_stride) == 0) {
      if (smp.all_finite()) {
        r.times.push_back(s.time);
        r.samples.push_back(smp);
      }
    }
    if (blown) break;
  }
  r.final_state = s;
  return r;
}

CoupledResult integrate_coupled(const State& initial, const ModelVariant& va,
                                const ModelVariant& vb, const NoiseModel& noise,
                                const PhysicalConstants& constants, const StepperConfig& stepper,
                                const BrownianDriver& driver, const IncrementObserver& observer) {
  stepper.validate();
  va.validate();
  vb.validate();
  validate_pair(va, vb);

  CoupledResult c;
  State sa = initial;
  State sb = initial;
  auto record = [&](const State& a, const State& b, const NormSample& na, const NormSample& nb) {
    c.a.times.push_back(a.time);
    c.a.samples.push_back(na);
    c.b.times.push_back(b.time);
    c.b.samples.push_back(nb);
    SpectralField dv = a.v - b.v;
    SpectralField dth = a.theta - b.theta;
    c.times.push_back(a.time);
    c.diff.push_back(sample_norms(dv, vertical_velocity(dv), dth));
  };

  NormSample na = sample_state(sa);
  NormSample nb = sample_state(sb);
  record(sa, sb, na, nb);
  const double t0 = initial.time;
  const bool blown0a = check_blowup(na, stepper, c.a, t0, 0.0);
  const bool blown0b = check_blowup(nb, stepper, c.b, t0, 0.0);
  if (blown0a || blown0b) {
    c.blew_up = true;
    c.a.final_state = sa;
    c.b.final_state = sb;
    return c;
  }

  const std::uint64_t n_steps = stepper.step_count();
  std::vector<double> inc(noise.size());
  for (std::uint64_t n = 0; n < n_steps; ++n) {
    driver.sample_increments(n, inc);
    if (observer) {
      observer(n, 'A', inc);
      observer(n, 'B', inc);
    }
    const double t = t0 + double(n + 1) * stepper.dt;
    StepInfo ia, ib;
    bool failed = false;
    try {
      sa = step(sa, va, noise, constants, inc, stepper.dt, nullptr, &ia);
    } catch (const std::domain_error&) {
      c.a.blew_up = true;
      c.a.blowup_reason = "nonfinite";
      c.a.blowup_time = t;
      failed = true;
    }
    try {
      sb = step(sb, vb, noise, constants, inc, stepper.dt, nullptr, &ib);
    } catch (const std::domain_error&) {
      c.b.blew_up = true;
      c.b.blowup_reason = "nonfinite";
      c.b.blowup_time = t;
      failed = true;
    }
    if (failed) break;
    sa.time = sb.time = t;
    c.a.steps = c.b.steps = n + 1;
    na = sample_state(sa);
    nb = sample_state(sb);
    const bool ba = check_blowup(na, stepper, c.a, t, ia.cfl);
    const bool bb = check_blowup(nb, stepper, c.b, t, ib.cfl);
    const bool last = (n + 1 == n_steps);
    if (ba || bb || last || (n + 1) % std::uint64_t(stepper.record_stride) == 0) {
      if (na.all_finite() && nb.all_finite()) record(sa, sb, na, nb);
    }
    if (ba || bb) break;
  }
  c.blew_up = c.a.blew_up || c.b.blew_up;
  c.a.final_state = sa;
  c.b.final_state = sb;
  return c;
}

}  // namespace thinflow
