#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "thinflow/dynamics.hpp"
#include "thinflow/norms.hpp"
#include "thinflow/operators.hpp"
#include "thinflow/projectors.hpp"

using namespace thinflow;
using oracle::pi;

namespace {

State random_state(const GridSpec& g, std::uint64_t seed) {
  SpectralField v = random_smooth_field(g, 2, seed, 3.0);
  project_P_in_place(v);
  SpectralField th = random_smooth_field(g, 1, seed + 1, 3.0);
  remove_mean_in_place(th);
  th *= 0.3;
  return State{v, th, 0.0};
}

ModelVariant variant(ModelKind k, double eps = 0.2) {
  ModelVariant v;
  v.kind = k;
  v.eps = eps;
  v.kernel = KernelK{KernelK::Kind::raised_cosine, 2.0};
  return v;
}

const ModelKind kAll[] = {ModelKind::SNS, ModelKind::rSNS, ModelKind::PE_strong, ModelKind::PE_weak};

double barotropic_divergence(const SpectralField& v) {
  return divergence_H(project_A(v)).max_abs();
}

}  // namespace

TEST_CASE("vertical velocity oracle and continuity") {
  const GridSpec g = oracle::grid();
  const auto v = oracle::spectral(g, {[](double x, double, double z) { return std::sin(x) * std::sin(pi * z); },
                                      [](double, double, double) { return 0.0; }});
  const SpectralField w = vertical_velocity(v);
  CHECK(oracle::max_error(w, 0, [](double x, double, double z) {
          return std::cos(x) * (std::cos(pi * z) + 1.0) / pi;
        }) < 1e-10);

  const auto flat = oracle::spectral(g, {[](double, double y, double) { return std::sin(y); },
                                         [](double x, double, double) { return std::cos(x); }});
  CHECK(vertical_velocity(flat).max_abs() < 1e-15);

  for (std::uint64_t s = 0; s < 10; ++s) {
    const State st = random_state(g, 10 + s);
    const SpectralField ww = vertical_velocity(st.v);
    SpectralField res = derivative(ww, 2);
    res += divergence_H(st.v);
    CHECK(norm(res, NormKind::L2()) <= 1e-11 * norm(divergence_H(st.v), NormKind::L2()));
  }
  const auto bad = oracle::spectral(g, {[](double x, double, double) { return std::sin(x); },
                                        [](double, double, double) { return 0.0; }});
  CHECK_THROWS_AS(vertical_velocity(bad), std::domain_error);
  CHECK_THROWS_AS(vertical_velocity(SpectralField(g, 3)), std::invalid_argument);
}

TEST_CASE("model variants") {
  CHECK(model_kind_from_string("PE") == ModelKind::PE_strong);
  for (ModelKind k : kAll) CHECK(model_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(model_kind_from_string("QG"), std::invalid_argument);
  ModelVariant v;
  v.eps = -1.0;
  try {
    v.validate();
    FAIL("negative eps accepted");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("model.eps") != std::string::npos);
  }
  CHECK(variant(ModelKind::SNS).effective_kernel() == KernelK::identity());
  CHECK(variant(ModelKind::PE_strong).effective_kernel() == KernelK::zero());
  CHECK(PhysicalConstants{}.nu(0.1) == doctest::Approx(0.01));
  CHECK(PhysicalConstants{}.mu() == 1.0);
}

TEST_CASE("zero state has zero drift for every variant") {
  const GridSpec g = oracle::grid();
  const NoiseModel noise = build_2d_divfree_modes(g, default_mode_specs(4, 1.0));
  const State zero{SpectralField(g, 2), SpectralField(g, 1), 0.0};
  for (ModelKind k : kAll) {
    const Tendency t = rhs_drift(zero, variant(k), noise, PhysicalConstants{});
    CHECK(t.v.max_abs() == 0.0);
    CHECK(t.theta.max_abs() == 0.0);
  }
}

TEST_CASE("single-mode drift matches a pointwise oracle") {
  // v = (sin x sin pi z, 0): w = cos x (cos pi z + 1)/pi, and every product
  // stays inside the resolved band, so the oracle is exact.
  const GridSpec g = oracle::grid(16, 16, 16);
  const auto vx = [](double x, double, double z) { return std::sin(x) * std::sin(pi * z); };
  const State s{oracle::spectral(g, {vx, [](double, double, double) { return 0.0; }}),
                SpectralField(g, 1), 0.0};
  const NoiseModel silent = build_2d_divfree_modes(g, {ModeSpec{1, 0, 1.0}}, 0.0);
  const Tendency t = rhs_drift(s, variant(ModelKind::PE_strong), silent, PhysicalConstants{});

  const auto adv = [](double x, double, double z) {
    const double u = std::sin(x) * std::sin(pi * z);
    const double w = std::cos(x) * (std::cos(pi * z) + 1.0) / pi;
    return u * std::cos(x) * std::sin(pi * z) + w * std::sin(x) * pi * std::cos(pi * z);
  };
  SpectralField expected = oracle::spectral(g, {adv, [](double, double, double) { return 0.0; }});
  expected *= -1.0;
  expected = project_P(expected);
  SpectralField lap = laplacian3(s.v);
  expected += lap;
  CHECK(oracle::max_abs_diff(t.v, expected) < 1e-12);
  CHECK(t.theta.max_abs() == 0.0);
}

TEST_CASE("strong and weak primitive equations share the noise-free drift") {
  const GridSpec g = oracle::grid();
  const NoiseModel silent = build_2d_divfree_modes(g, default_mode_specs(3, 1.0), 0.0);
  const State s = random_state(g, 3);
  const Tendency a = rhs_drift(s, variant(ModelKind::PE_strong), silent, PhysicalConstants{});
  const Tendency b = rhs_drift(s, variant(ModelKind::PE_weak), silent, PhysicalConstants{});
  CHECK(a.v == b.v);
  CHECK(a.theta == b.theta);
}

TEST_CASE("model identities hold bit for bit") {
  const GridSpec g = oracle::grid();
  const NoiseModel noise = build_2d_divfree_modes(g, default_mode_specs(4, 1.0));
  const State s = random_state(g, 5);
  const PhysicalConstants pc;

  ModelVariant rsns = variant(ModelKind::rSNS);
  rsns.kernel = KernelK::identity();
  const ModelVariant sns = variant(ModelKind::SNS);
  CHECK(rhs_drift(s, rsns, noise, pc).v == rhs_drift(s, sns, noise, pc).v);

  ModelVariant weak = variant(ModelKind::PE_weak);
  weak.kernel = KernelK::zero();
  weak.additive_vertical_noise = false;
  const ModelVariant strong = variant(ModelKind::PE_strong);
  CHECK(rhs_drift(s, weak, noise, pc).v == rhs_drift(s, strong, noise, pc).v);
  for (std::size_t k = 0; k < noise.size(); ++k) {
    CHECK(rhs_diffusion_mode(s, rsns, noise, k).v == rhs_diffusion_mode(s, sns, noise, k).v);
    CHECK(rhs_diffusion_mode(s, weak, noise, k).v == rhs_diffusion_mode(s, strong, noise, k).v);
  }
  // With a non-trivial kernel the weak martingale pressure is active.
  const ModelVariant weak_k = variant(ModelKind::PE_weak);
  CHECK(oracle::max_abs_diff(rhs_diffusion_mode(s, weak_k, noise, 0).v,
                             rhs_diffusion_mode(s, strong, noise, 0).v) > 0.0);
  CHECK_THROWS_AS(rhs_diffusion_mode(s, strong, noise, noise.size()), std::out_of_range);
}

TEST_CASE("constant mode and constant velocity give a zero noise coefficient") {
  const GridSpec g = oracle::grid();
  const NoiseModel constant = NoiseModel::from_fields(
      g, {oracle::sample(g, {[](double, double, double) { return 1.0; },
                             [](double, double, double) { return 0.0; },
                             [](double, double, double) { return 0.0; }})});
  State s{SpectralField(g, 2), SpectralField(g, 1), 0.0};
  s.v.at(0, 0, 0, 0) = 0.4;
  s.v.at(1, 0, 0, 0) = -0.1;
  for (ModelKind k : kAll) {
    const Tendency t = rhs_diffusion_mode(s, variant(k), constant, 0);
    CHECK(t.v.max_abs() < 1e-15);
    CHECK(t.theta.max_abs() == 0.0);
  }
}

TEST_CASE("strong primitive-equation noise coefficient has no martingale pressure") {
  const GridSpec g = oracle::grid();
  const NoiseModel noise = build_2d_divfree_modes(g, {ModeSpec{1, 2, 1.0, 0.3, 0.1}});
  const State s = random_state(g, 8);
  const Tendency t = rhs_diffusion_mode(s, variant(ModelKind::PE_strong), noise, 0);
  // Oracle: P[-(phi . grad_H) v + Delta phi_H] from independent pieces.
  const PhysicalField phi = noise.modes()[0].phi_phys;
  PhysicalField tr(g, 2);
  const PhysicalField gx = to_physical(gradient_H(s.v.component(0)));
  const PhysicalField gy = to_physical(gradient_H(s.v.component(1)));
  for (std::size_t p = 0; p < g.physical_size(); ++p) {
    tr.comp(0)[p] = -(phi.comp(0)[p] * gx.comp(0)[p] + phi.comp(1)[p] * gx.comp(1)[p]);
    tr.comp(1)[p] = -(phi.comp(0)[p] * gy.comp(0)[p] + phi.comp(1)[p] * gy.comp(1)[p]);
  }
  SpectralField f = dealias(to_spectral(tr));
  SpectralField ph(g, 2);
  ph.set_component(0, noise.modes()[0].phi.component(0));
  ph.set_component(1, noise.modes()[0].phi.component(1));
  f += laplacian3(ph);
  CHECK(oracle::max_abs_diff(t.v, project_P(f)) < 1e-12);
}

TEST_CASE("hydrostatic pressure") {
  const GridSpec g = oracle::grid();
  const NoiseModel noise = build_2d_divfree_modes(g, default_mode_specs(3, 1.0));
  const PhysicalConstants pc;
  ModelVariant strong = variant(ModelKind::PE_strong);
  strong.alpha_sigma = 0.0;

  const auto tz = oracle::spectral(g, {[](double, double, double z) { return std::sin(pi * z); }});
  const SpectralField pz = hydrostatic_pressure(tz, SpectralField(g, 1), strong, noise, pc);
  CHECK(gradient_H(pz).max_abs() < 1e-15);

  const SpectralField zero = hydrostatic_pressure(SpectralField(g, 1), SpectralField(g, 1),
                                                  variant(ModelKind::PE_weak), noise, pc);
  CHECK(zero.max_abs() == 0.0);

  const auto th = oracle::spectral(
      g, {[](double x, double, double z) { return std::sin(x) * std::sin(pi * z); }});
  const SpectralField p = hydrostatic_pressure(th, SpectralField(g, 1), strong, noise, pc);
  SpectralField res = derivative(p, 2);
  res.axpy(pc.g, th);
  CHECK(res.max_abs() < 1e-11);
  CHECK_THROWS_AS(hydrostatic_pressure(th, SpectralField(g, 1), variant(ModelKind::rSNS), noise, pc),
                  std::invalid_argument);
}

TEST_CASE("buoyancy law") {
  const GridSpec g = oracle::grid();
  const PhysicalConstants pc;
  CHECK(buoyancy(SpectralField(g, 1), pc).max_abs() == 0.0);
  SpectralField c(g, 1);
  c.at(0, 0, 0, 0) = 2.0;
  CHECK(buoyancy(c, pc).at(0, 0, 0, 0) == cplx(2.0 * pc.g, 0.0));
  const auto s = oracle::spectral(g, {[](double x, double, double) { return std::sin(x); }});
  CHECK(oracle::max_error(buoyancy(s, pc), 0,
                          [&](double x, double, double) { return pc.g * std::sin(x); }) < 1e-13);
}

TEST_CASE("drift and noise keep the barotropic constraint and the tracer mean") {
  const GridSpec g = oracle::grid();
  const NoiseModel noise = build_2d_divfree_modes(g, default_mode_specs(4, 1.0));
  const State s = random_state(g, 21);
  for (ModelKind k : kAll) {
    CAPTURE(to_string(k));
    const Tendency t = rhs_drift(s, variant(k), noise, PhysicalConstants{});
    CHECK(barotropic_divergence(t.v) <= 1e-10);
    CHECK(std::abs(t.theta.at(0, 0, 0, 0)) == 0.0);
    for (std::size_t m = 0; m < noise.size(); ++m) {
      const Tendency d = rhs_diffusion_mode(s, variant(k), noise, m);
      CHECK(barotropic_divergence(d.v) <= 1e-10);
      CHECK(std::abs(d.theta.at(0, 0, 0, 0)) == 0.0);
    }
  }
}

TEST_CASE("combined diffusion equals the sum of mode coefficients") {
  const GridSpec g = oracle::grid();
  const NoiseModel noise = build_2d_divfree_modes(g, default_mode_specs(3, 1.0));
  const State s = random_state(g, 31);
  const std::vector<double> c{0.3, -1.2, 0.7};
  for (ModelKind k : kAll) {
    const ModelVariant mv = variant(k);
    const StateEvaluation ev(s, mv, noise);
    const Tendency all = rhs_diffusion(ev, mv, noise, c);
    SpectralField sum(g, 2);
    for (std::size_t m = 0; m < 3; ++m) sum.axpy(c[m], rhs_diffusion_mode(s, mv, noise, m).v);
    CHECK(oracle::max_abs_diff(all.v, sum) < 1e-12 * (1.0 + sum.max_abs()));
  }
}
