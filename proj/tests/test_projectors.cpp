#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "thinflow/kernel.hpp"
#include "thinflow/noise.hpp"
#include "thinflow/norms.hpp"
#include "thinflow/operators.hpp"
#include "thinflow/projectors.hpp"

using namespace thinflow;
using oracle::pi;

TEST_CASE("P_eps annihilates scaled gradients and fixes divergence-free fields") {
  const GridSpec g = oracle::grid();
  for (double eps : {1.0, 0.1, 0.01}) {
    CAPTURE(eps);
    const SpectralField q = random_smooth_field(g, 1, 3, 3.0);
    const SpectralField gq = gradient_eps(q, eps);
    CHECK(norm(project_Peps(gq, eps), NormKind::Leps(eps)) <= 1e-11 * norm(gq, NormKind::Leps(eps)));
    const SpectralField u = project_Peps(random_smooth_field(g, 3, 4, 2.0), eps);
    CHECK(oracle::max_abs_diff(project_Peps(u, eps), u) < 1e-13 * u.max_abs() + 1e-300);
  }
  CHECK_THROWS_AS(project_Peps(SpectralField(g, 3), 0.0), std::invalid_argument);
}

TEST_CASE("P_eps removes exactly the gradient part of (sin x, 0, 0)") {
  const GridSpec g = oracle::grid();
  const double eps = 0.3;
  const auto u = oracle::spectral(g, {[](double x, double, double) { return std::sin(x); },
                                      [](double, double, double) { return 0.0; },
                                      [](double, double, double) { return 0.0; }});
  const SpectralField pu = project_Peps(u, eps);
  CHECK(divergence3(pu).max_abs() < 1e-14);
  const SpectralField removed = u - pu;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const SpectralField f = project_Peps(random_smooth_field(g, 3, 50 + s, 2.0), eps);
    CHECK(std::abs(inner_product(removed, f, NormKind::Leps(eps))) <
          1e-12 * norm(u, NormKind::Leps(eps)) * norm(f, NormKind::Leps(eps)));
  }
}

TEST_CASE("P_eps is self-adjoint in the weighted product") {
  const GridSpec g = oracle::grid();
  const double eps = 0.05;
  const SpectralField a = random_smooth_field(g, 3, 1, 2.0);
  const SpectralField b = random_smooth_field(g, 3, 2, 2.0);
  const NormKind k = NormKind::Leps(eps);
  const double lhs = inner_product(project_Peps(a, eps), b, k);
  const double rhs = inner_product(a, project_Peps(b, eps), k);
  CHECK(std::abs(lhs - rhs) < 1e-12 * norm(a, k) * norm(b, k));
}

TEST_CASE("horizontal P_eps with a vertical source") {
  const GridSpec g = oracle::grid();
  const double eps = 0.4;
  const SpectralField f = random_smooth_field(g, 3, 5, 2.0);
  const SpectralField b = random_smooth_field(g, 1, 6, 2.0);
  SpectralField full = f;
  for (std::size_t i = 0; i < full.component_size(); ++i) full.comp(2)[i] += b.comp(0)[i] / (eps * eps);
  const SpectralField ref = project_Peps(full, eps);
  const SpectralField h = project_Peps_horizontal(f, b, eps);
  REQUIRE(h.components() == 2);
  CHECK(oracle::max_abs_diff(h.component(0), ref.component(0)) < 1e-12);
  CHECK(oracle::max_abs_diff(h.component(1), ref.component(1)) < 1e-12);
  const SpectralField h0 = project_Peps_horizontal(f, SpectralField{}, eps);
  CHECK(oracle::max_abs_diff(h0.component(0), project_Peps(f, eps).component(0)) < 1e-14);
}

TEST_CASE("barotropic and baroclinic projectors") {
  const GridSpec g = oracle::grid();
  const auto flat = oracle::spectral(g, {[](double x, double y, double) { return std::sin(x + y); },
                                         [](double x, double, double) { return std::cos(x); }});
  CHECK(oracle::max_abs_diff(project_A(flat), flat) < 1e-15);
  CHECK(project_R(flat).max_abs() < 1e-15);
  const auto layered = oracle::spectral(
      g, {[](double, double, double z) { return std::sin(pi * z); }, [](double, double, double) { return 0.0; }});
  CHECK(project_A(layered).max_abs() < 1e-15);
  CHECK(oracle::max_abs_diff(project_R(layered), layered) < 1e-15);

  const SpectralField v = random_smooth_field(g, 2, 9, 2.0);
  const SpectralField av = project_A(v);
  CHECK(oracle::max_abs_diff(project_A(av), av) == 0.0);
  CHECK(project_A(project_R(v)).max_abs() < 1e-15);
  CHECK(oracle::max_abs_diff(av + project_R(v), v) < 1e-15);
  const double pyth = norm_squared(av, NormKind::L2()) + norm_squared(project_R(v), NormKind::L2());
  CHECK(pyth == doctest::Approx(norm_squared(v, NormKind::L2())).epsilon(1e-13));
}

TEST_CASE("P combines the 2D Leray projector with the identity on baroclinic modes") {
  const GridSpec g = oracle::grid();
  // Horizontal gradient of phi = sin x cos 2y.
  const auto grad = oracle::spectral(
      g, {[](double x, double y, double) { return std::cos(x) * std::cos(2 * y); },
          [](double x, double y, double) { return -2.0 * std::sin(x) * std::sin(2 * y); }});
  CHECK(project_P(grad).max_abs() < 1e-14);
  const SpectralField v = random_smooth_field(g, 2, 11, 2.0);
  const SpectralField r = project_R(v);
  CHECK(oracle::max_abs_diff(project_P(r), r) == 0.0);
  const SpectralField pv = project_P(v);
  CHECK(oracle::max_abs_diff(project_P(pv), pv) < 1e-15);
  CHECK(norm(pv, NormKind::L2()) <= norm(v, NormKind::L2()) * (1 + 1e-14));
  CHECK(oracle::max_abs_diff(project_P(project_A(v)), project_A(pv)) < 1e-15);
  CHECK(oracle::max_abs_diff(project_P(project_R(v)), project_R(pv)) < 1e-15);
  SpectralField w = v;
  project_P_in_place(w);
  CHECK(w == pv);
  // The barotropic part of the output is divergence free.
  CHECK(divergence_H(project_A(pv)).max_abs() < 1e-14);
}

TEST_CASE("kernel multipliers") {
  const GridSpec g = oracle::grid(32, 32, 16);
  KernelK rc{KernelK::Kind::raised_cosine, 4.0};
  CHECK(rc.multiplier(0.0) == 1.0);
  CHECK(rc.multiplier(4.0) == 1.0);
  CHECK(rc.multiplier(8.0) == 0.0);
  for (double k = 0; k < 12; k += 0.37) {
    CHECK(rc.multiplier(k) >= 0.0);
    CHECK(rc.multiplier(k) <= 1.0);
  }
  const auto m8 = oracle::spectral(g, {[](double x, double, double) { return std::sin(8 * x); }});
  CHECK(apply_K(m8, rc).max_abs() < 1e-14);
  const SpectralField r = random_smooth_field(g, 2, 1, 2.0);
  CHECK(apply_K(r, KernelK::identity()) == r);
  CHECK(apply_K(r, KernelK::zero()).max_abs() == 0.0);
  CHECK(std::isfinite(kernel_h3_sum(rc, g)));
  CHECK(std::isfinite(kernel_h3_sum(KernelK{KernelK::Kind::gaussian, 3.0}, g)));
  CHECK(kernel_kind_from_string("spectral_lowpass_raised_cosine") == KernelK::Kind::raised_cosine);
  CHECK(kernel_kind_from_string(to_string(KernelK::Kind::gaussian)) == KernelK::Kind::gaussian);
  CHECK_THROWS_AS(kernel_kind_from_string("boxcar"), std::invalid_argument);
  CHECK_THROWS_AS((KernelK{KernelK::Kind::gaussian, -1.0}).validate(), std::invalid_argument);
  // Squared multiplier.
  const auto m5 = oracle::spectral(g, {[](double x, double, double) { return std::sin(5 * x); }});
  const double m = rc.multiplier(5.0);
  CHECK(oracle::max_abs_diff(apply_K2(m5, rc), (m * m) * m5) < 1e-15);
}

TEST_CASE("I_alpha and I_K act on the vertical component only") {
  const GridSpec g = oracle::grid();
  const SpectralField u = random_smooth_field(g, 3, 2, 1.0);
  const SpectralField ia = apply_Ialpha(u, 3.5);
  CHECK(ia.component(0) == u.component(0));
  CHECK(ia.component(1) == u.component(1));
  CHECK(oracle::max_abs_diff(ia.component(2), 3.5 * u.component(2)) < 1e-15);
  CHECK(apply_Ialpha(u, 1.0) == u);
  const KernelK k{KernelK::Kind::raised_cosine, 2.0};
  const SpectralField ik = apply_IK(u, k);
  CHECK(ik.component(0) == u.component(0));
  CHECK(ik.component(1) == u.component(1));
  CHECK(ik.component(2) == apply_K(u.component(2), k));
}

TEST_CASE("filtered variance operator") {
  const GridSpec g = oracle::grid();
  const double c = 0.8;
  const NoiseModel constant = NoiseModel::from_fields(
      g, {oracle::sample(g, {[c](double, double, double) { return c; },
                             [](double, double, double) { return 0.0; },
                             [](double, double, double) { return 0.0; }})});
  const auto w = oracle::spectral(g, {[](double x, double, double) { return std::sin(x); }});
  CHECK(oracle::max_error(apply_aK_divergence(w, constant, KernelK::identity()), 0,
                          [c](double x, double, double) { return -c * c * std::sin(x); }) < 1e-13);
  CHECK(apply_aK_divergence(w, constant, KernelK::zero()).max_abs() == 0.0);

  const NoiseModel m = build_2d_divfree_modes(g, default_mode_specs(5, 1.0));
  const SpectralField q = random_smooth_field(g, 1, 4, 3.0);
  const PhysicalField gq = to_physical(gradient3(q));
  CHECK(oracle::max_abs_diff(apply_aK_divergence(q, m, KernelK::identity()), divergence_a_grad(m, gq)) <
        1e-12);
  for (const KernelK& k : {KernelK::identity(), KernelK{KernelK::Kind::raised_cosine, 2.0},
                           KernelK{KernelK::Kind::gaussian, 1.5}}) {
    const double form = inner_product(apply_aK_divergence(q, m, k), q, NormKind::L2());
    CHECK(form <= 1e-10);
  }
}
