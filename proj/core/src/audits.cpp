#include "thinflow/audits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "thinflow/operators.hpp"
#include "thinflow/projectors.hpp"
#include "thinflow/transform.hpp"

namespace thinflow {

namespace {

double rel(double num, double den) { return den > 0.0 ? num / den : num; }

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

bool same_run(const RunResult& a, const RunResult& b, double& diff) {
  diff = std::max(max_abs_diff(a.final_state.v, b.final_state.v),
                  max_abs_diff(a.final_state.theta, b.final_state.theta));
  if (a.times != b.times || a.samples.size() != b.samples.size()) return false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const auto& x = a.samples[i];
    const auto& y = b.samples[i];
    if (x.v_l2 != y.v_l2 || x.v_h1 != y.v_h1 || x.theta_l2 != y.theta_l2 || x.w_l2 != y.w_l2)
      return false;
  }
  return a.final_state.v == b.final_state.v && a.final_state.theta == b.final_state.theta;
}

}  // namespace

ProjectorSuiteReport projector_suite(const GridSpec& g, const std::vector<double>& eps_values,
                                     int fields, std::uint64_t seed) {
  ProjectorSuiteReport r;
  r.fields = fields;
  for (int i = 0; i < fields; ++i) {
    const double eps = eps_values[std::size_t(i) % eps_values.size()];
    const std::uint64_t s = seed + 7919ULL * std::uint64_t(i);
    const NormKind le = NormKind::Leps(eps);
    const SpectralField u = random_smooth_field(g, 3, s, 2.0);
    const SpectralField u2 = random_smooth_field(g, 3, s + 1, 2.0);
    const SpectralField pu = project_Peps(u, eps);
    const SpectralField ppu = project_Peps(pu, eps);
    r.peps_idempotence =
        std::max(r.peps_idempotence, rel(norm(ppu - pu, le), norm(pu, le)));
    const double lhs = inner_product(pu, u2, le);
    const double rhs = inner_product(u, project_Peps(u2, eps), le);
    r.peps_self_adjoint = std::max(
        r.peps_self_adjoint, rel(std::abs(lhs - rhs), norm(u, le) * norm(u2, le)));
    const SpectralField div = divergence3(pu);
    r.peps_divergence = std::max(
        r.peps_divergence, rel(norm(div, NormKind::L2()), norm(pu, NormKind::V())));
    const SpectralField q = random_smooth_field(g, 1, s + 2, 3.0);
    const SpectralField gq = gradient_eps(q, eps);
    r.peps_gradient = std::max(
        r.peps_gradient, rel(norm(project_Peps(gq, eps), le), norm(gq, le)));

    const SpectralField v = random_smooth_field(g, 2, s + 3, 2.0);
    const SpectralField pv = project_P(v);
    r.p_idempotence = std::max(
        r.p_idempotence, rel(norm(project_P(pv) - pv, NormKind::L2()), norm(pv, NormKind::L2())));
    const SpectralField v2 = random_smooth_field(g, 2, s + 4, 2.0);
    const double ar = inner_product(project_A(v), project_R(v2), NormKind::L2());
    r.ar_orthogonality = std::max(
        r.ar_orthogonality,
        rel(std::abs(ar), norm(v, NormKind::L2()) * norm(v2, NormKind::L2())));
  }
  return r;
}

FluctuationReport fluctuation_dissipation_check(const GridSpec& g, int pairs,
                                                std::uint64_t seed) {
  FluctuationReport r;
  r.pairs = pairs;
  std::mt19937_64 rng(seed);
  const int band = int(g.dealias_fraction * std::min(g.nx, g.ny) / 2.0) - 1;
  std::uniform_int_distribution<int> kdist(-band, band);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> count(1, 6);
  for (int p = 0; p < pairs; ++p) {
    NoiseModel model;
    if (p % 2 == 0) {
      std::vector<ModeSpec> specs;
      const int n = count(rng);
      while (int(specs.size()) < n) {
        ModeSpec m{kdist(rng), kdist(rng), 0.1 + unif(rng), unif(rng), unif(rng)};
        if (m.kx != 0 || m.ky != 0) specs.push_back(m);
      }
      model = build_2d_divfree_modes(g, specs, 1.0 + unif(rng));
    } else {
      std::vector<SpectralField> phis;
      const int n = count(rng);
      for (int k = 0; k < n; ++k) phis.push_back(random_smooth_field(g, 3, rng(), 3.0));
      model = NoiseModel::from_spectral(g, phis, 1.0);
    }
    const SpectralField q = random_smooth_field(g, 1, rng(), 2.0);
    const PhysicalField grad = to_physical(gradient3(q));
    const VarianceTensor& a = model.variance();
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < g.physical_size(); ++i) {
      const double gq[3] = {grad.comp(0)[i], grad.comp(1)[i], grad.comp(2)[i]};
      for (const auto& mode : model.modes()) {
        double s = 0.0;
        for (int c = 0; c < 3; ++c) s += mode.phi_phys.comp(c)[i] * gq[c];
        lhs += s * s;
      }
      for (int r0 = 0; r0 < 3; ++r0)
        for (int c = 0; c < 3; ++c) rhs += gq[r0] * a(r0, c, i) * gq[c];
    }
    r.max_relative = std::max(r.max_relative, rel(std::abs(lhs - rhs), std::abs(lhs)));
  }
  return r;
}

ContinuityReport continuity_check(const GridSpec& g, int fields, std::uint64_t seed) {
  ContinuityReport r;
  r.fields = fields;
  for (int i = 0; i < fields; ++i) {
    SpectralField v = random_smooth_field(g, 2, seed + 104729ULL * std::uint64_t(i), 2.0);
    project_P_in_place(v);
    const SpectralField w = vertical_velocity(v);
    const SpectralField divh = divergence_H(v);
    SpectralField res = derivative(w, 2);
    res += divh;
    r.max_residual = std::max(
        r.max_residual, rel(norm(res, NormKind::L2()), norm(divh, NormKind::L2())));
  }
  constexpr double pi = std::numbers::pi;
  PhysicalField v(g, 2);
  v.fill(0, [](double x, double, double z) { return std::sin(x) * std::sin(pi * z); });
  const PhysicalField w = to_physical(vertical_velocity(to_spectral(v)));
  for (int iz = 0; iz < g.nz; ++iz)
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        const double exact = std::cos(g.x(ix)) * (std::cos(pi * g.z(iz)) + 1.0) / pi;
        r.oracle_error = std::max(r.oracle_error, std::abs(w.at(0, iz, iy, ix) - exact));
      }
  return r;
}

ReductionReport reduction_check(const RunConfig& base, int steps) {
  ReductionReport r;
  r.steps = steps;
  StepperConfig st = base.stepper;
  st.t_end = st.dt * steps;
  st.record_stride = 1;
  st.record_energy = false;
  const NoiseModel noise = build_noise(base);
  const State init = make_initial_state(base.grid, base.initial, base.seed);
  const BrownianDriver driver(base.seed, st.dt);

  ModelVariant rsns = base.model, sns = base.model;
  rsns.kind = ModelKind::rSNS;
  rsns.kernel = KernelK::identity();
  sns.kind = ModelKind::SNS;
  const CoupledResult ns = integrate_coupled(init, rsns, sns, noise, base.physics, st, driver);
  double d1 = 0.0;
  r.ns_identical = same_run(ns.a, ns.b, d1) && ns.a.steps == std::uint64_t(steps);
  for (const auto& s : ns.diff) r.ns_identical = r.ns_identical && s.v_l2 == 0.0 && s.theta_l2 == 0.0;
  r.ns_max_diff = d1;

  ModelVariant weak = base.model, strong = base.model;
  weak.kind = ModelKind::PE_weak;
  weak.kernel = KernelK::zero();
  weak.additive_vertical_noise = false;
  strong.kind = ModelKind::PE_strong;
  const RunResult a = integrate(init, weak, noise, base.physics, st, driver);
  const RunResult b = integrate(init, strong, noise, base.physics, st, driver);
  double d2 = 0.0;
  r.pe_identical = same_run(a, b, d2) && a.steps == std::uint64_t(steps);
  r.pe_max_diff = d2;
  return r;
}

StokesDecayReport stokes_decay_check(const GridSpec& g, double eps, double dt, double t_end) {
  StokesDecayReport r;
  r.dt = dt;
  r.t_end = t_end;
  constexpr double pi = std::numbers::pi;
  // Single Fourier modes whose self-advection vanishes identically.
  struct Case {
    int comp;
    std::function<double(double, double, double)> f;
    double k2;
  };
  const std::vector<Case> cases{
      {0, [](double, double y, double) { return std::sin(y); }, 1.0},
      {1, [](double x, double, double) { return std::cos(2.0 * x); }, 4.0},
      {0, [](double, double, double z) { return std::cos(pi * z); }, pi * pi},
      {1, [](double x, double, double z) { return std::sin(x + pi * z); }, 1.0 + pi * pi},
  };
  ModelVariant variant;
  variant.kind = ModelKind::rSNS;
  variant.eps = eps;
  const NoiseModel silent = build_2d_divfree_modes(g, {ModeSpec{1, 0, 1.0}}, 0.0);
  StepperConfig st;
  st.dt = dt;
  st.t_end = t_end;
  st.record_stride = int(std::llround(t_end / dt));
  const PhysicalConstants pc;
  r.seed_independent = true;
  for (const auto& c : cases) {
    PhysicalField v(g, 2);
    v.fill(c.comp, c.f);
    State init{to_spectral(v), SpectralField(g, 1), 0.0};
    dealias_in_place(init.v);
    const double n0 = norm(init.v, NormKind::L2());
    const RunResult run = integrate(init, variant, silent, pc, st, BrownianDriver(1, dt));
    const RunResult run2 = integrate(init, variant, silent, pc, st, BrownianDriver(99, dt));
    r.seed_independent = r.seed_independent && run.final_state.v == run2.final_state.v;
    const double n1 = norm(run.final_state.v, NormKind::L2());
    const double exact = std::exp(-c.k2 * run.final_state.time);
    r.max_relative_error =
        std::max(r.max_relative_error, run.blew_up ? 1.0 : std::abs(n1 / n0 - exact) / exact);
  }
  return r;
}

EnergyAuditReport energy_audit(const RunConfig& base, int runs) {
  EnergyAuditReport r;
  r.runs = runs;
  r.dt = base.stepper.dt;
  StepperConfig st = base.stepper;
  st.record_energy = true;
  const NoiseModel noise = scale_noise_map(build_noise(base), base.model.eps);
  const State init = make_initial_state(base.grid, base.initial, base.seed);
  bool first = true;
  for (int i = 0; i < runs; ++i) {
    const RunResult run = integrate(init, base.model, noise, base.physics, st,
                                    BrownianDriver(base.seed + std::uint64_t(i), st.dt));
    const EnergyResidualReport e = energy_residual(run.energy);
    r.per_run.push_back(e.max_violation);
    r.max_violation = std::max(r.max_violation, e.max_violation);
    r.min_residual = first ? e.min_residual : std::min(r.min_residual, e.min_residual);
    first = false;
  }
  return r;
}

std::vector<CheckResult> run_check_suite(const RunConfig& base, bool quick) {
  std::vector<CheckResult> out;
  const GridSpec& g = base.grid;
  const int nproj = quick ? 30 : 200;
  const auto pr = projector_suite(g, {1.0, 0.1, 0.01}, nproj, base.seed);
  out.push_back({"projector.Peps_idempotence", pr.peps_idempotence <= 1e-10, pr.peps_idempotence, 1e-10});
  out.push_back({"projector.Peps_self_adjoint", pr.peps_self_adjoint <= 1e-10, pr.peps_self_adjoint, 1e-10});
  out.push_back({"projector.Peps_divergence", pr.peps_divergence <= 1e-10, pr.peps_divergence, 1e-10});
  out.push_back({"projector.Peps_gradient", pr.peps_gradient <= 1e-10, pr.peps_gradient, 1e-10});
  out.push_back({"projector.P_idempotence", pr.p_idempotence <= 1e-11, pr.p_idempotence, 1e-11});
  out.push_back({"projector.AR_orthogonality", pr.ar_orthogonality <= 1e-11, pr.ar_orthogonality, 1e-11});
  const auto fd = fluctuation_dissipation_check(g, quick ? 10 : 50, base.seed);
  out.push_back({"noise.fluctuation_dissipation", fd.max_relative <= 1e-10, fd.max_relative, 1e-10});
  const auto cc = continuity_check(g, quick ? 20 : 100, base.seed);
  out.push_back({"dynamics.continuity", cc.max_residual <= 1e-11, cc.max_residual, 1e-11});
  out.push_back({"dynamics.w_oracle", cc.oracle_error <= 1e-10, cc.oracle_error, 1e-10});
  const auto rr = reduction_check(base, quick ? 10 : 100);
  out.push_back({"reduction.rSNS_identity_is_SNS", rr.ns_identical, rr.ns_max_diff, 0.0});
  out.push_back({"reduction.PE_weak_zero_is_PE_strong", rr.pe_identical, rr.pe_max_diff, 0.0});
  const auto sd = stokes_decay_check(g, base.model.eps, 1e-3, 0.5);
  out.push_back({"integrator.stokes_decay", sd.max_relative_error <= 1e-3 && sd.seed_independent,
                 sd.max_relative_error, 1e-3});
  RunConfig ec = base;
  ec.model.kind = ModelKind::rSNS;
  ec.stepper.t_end = quick ? 10 * ec.stepper.dt : ec.stepper.t_end;
  const auto ea = energy_audit(ec, quick ? 2 : 20);
  out.push_back({"energy.residual", ea.max_violation <= 5.0 * ec.stepper.dt, ea.max_violation,
                 5.0 * ec.stepper.dt});
  return out;
}

}  // namespace thinflow
