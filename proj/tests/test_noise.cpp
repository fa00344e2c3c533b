#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "thinflow/audits.hpp"
#include "thinflow/noise.hpp"
#include "thinflow/operators.hpp"

using namespace thinflow;
using oracle::pi;

namespace {

NoiseModel single_field_model(const GridSpec& g, oracle::Fn fx, oracle::Fn fy, oracle::Fn fz) {
  return NoiseModel::from_fields(g, {oracle::sample(g, {fx, fy, fz})}, 1.0);
}

oracle::Fn zero() {
  return [](double, double, double) { return 0.0; };
}

}  // namespace

TEST_CASE("streamfunction modes give the curl of psi") {
  const GridSpec g = oracle::grid();
  const NoiseModel m = build_2d_divfree_modes(g, {ModeSpec{1, 1, 1.0, 0.0, 0.0}});
  REQUIRE(m.size() == 1);
  const PhysicalField& phi = m.modes()[0].phi_phys;
  CHECK(oracle::max_error(phi, 0, [](double x, double y, double) { return -std::cos(x) * std::sin(y); }) <
        1e-13);
  CHECK(oracle::max_error(phi, 1, [](double x, double y, double) { return std::sin(x) * std::cos(y); }) <
        1e-13);
  CHECK(oracle::max_error(phi, 2, zero()) == 0.0);
  CHECK(divergence3(m.modes()[0].phi).max_abs() < 1e-12);
  CHECK(m.bidimensional());
}

TEST_CASE("bidimensional modes are exactly z independent") {
  const GridSpec g = oracle::grid();
  const NoiseModel m = build_2d_divfree_modes(g, default_mode_specs(8, 0.7), 2.0);
  CHECK(m.bidimensional());
  for (const auto& mode : m.modes()) {
    CHECK(derivative(mode.phi, 2).max_abs() == 0.0);
    CHECK(mode.phi.component(2).max_abs() == 0.0);
    CHECK(divergence3(mode.phi).max_abs() < 1e-12);
  }
  // a_zz and a_Hz vanish identically.
  const VarianceTensor& a = m.variance();
  for (std::size_t p = 0; p < g.physical_size(); ++p) {
    CHECK(a(2, 2, p) == 0.0);
    CHECK(a(0, 2, p) == 0.0);
    CHECK(a(1, 2, p) == 0.0);
  }
}

TEST_CASE("mode construction rejects bad input") {
  const GridSpec g = oracle::grid();
  CHECK_THROWS_AS(build_2d_divfree_modes(g, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_2d_divfree_modes(g, {ModeSpec{0, 0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(build_2d_divfree_modes(g, {ModeSpec{40, 0, 1.0}}), std::invalid_argument);
}

TEST_CASE("upsilon scales modes by its square root") {
  const GridSpec g = oracle::grid();
  const NoiseModel a = build_2d_divfree_modes(g, {ModeSpec{1, 2, 1.0}}, 1.0);
  const NoiseModel b = build_2d_divfree_modes(g, {ModeSpec{1, 2, 1.0}}, 4.0);
  CHECK(b.modes()[0].phi.max_abs() == doctest::Approx(2.0 * a.modes()[0].phi.max_abs()));
  CHECK(build_2d_divfree_modes(g, {ModeSpec{1, 2, 1.0}}, 0.0).silent());
}

TEST_CASE("variance tensor and Ito-Stokes drift of (sin y, sin x, 0)") {
  const GridSpec g = oracle::grid();
  const NoiseModel m = single_field_model(
      g, [](double, double y, double) { return std::sin(y); },
      [](double x, double, double) { return std::sin(x); }, zero());
  const VarianceTensor& a = m.variance();
  double err = 0.0;
  for (int iz = 0; iz < g.nz; ++iz)
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        const std::size_t p = g.physical_index(iz, iy, ix);
        const double x = g.x(ix), y = g.y(iy);
        err = std::max(err, std::abs(a(0, 0, p) - std::sin(y) * std::sin(y)));
        err = std::max(err, std::abs(a(0, 1, p) - std::sin(x) * std::sin(y)));
        err = std::max(err, std::abs(a(1, 0, p) - std::sin(x) * std::sin(y)));
        err = std::max(err, std::abs(a(1, 1, p) - std::sin(x) * std::sin(x)));
        err = std::max(err, std::abs(a(2, 2, p)));
      }
  CHECK(err < 1e-14);
  const PhysicalField& us = m.drift_phys();
  CHECK(oracle::max_error(us, 0, [](double x, double y, double) { return 0.5 * std::sin(x) * std::cos(y); }) <
        1e-12);
  CHECK(oracle::max_error(us, 1, [](double x, double y, double) { return 0.5 * std::sin(y) * std::cos(x); }) <
        1e-12);
  CHECK(oracle::max_error(us, 2, zero()) < 1e-14);
}

TEST_CASE("constant mode") {
  const GridSpec g = oracle::grid();
  const double c = 0.7;
  const NoiseModel m = single_field_model(g, [c](double, double, double) { return c; }, zero(), zero());
  for (std::size_t p = 0; p < g.physical_size(); p += 97) {
    CHECK(m.variance()(0, 0, p) == doctest::Approx(c * c));
    CHECK(m.variance()(1, 1, p) == 0.0);
    CHECK(m.variance()(0, 1, p) == 0.0);
  }
  CHECK(m.drift().max_abs() < 1e-15);
}

TEST_CASE("variances of independent modes add") {
  const GridSpec g = oracle::grid();
  const ModeSpec m1{1, 0, 1.0, 0.3, 0.0}, m2{0, 2, 0.5, 0.0, 1.1};
  const NoiseModel both = build_2d_divfree_modes(g, {m1, m2});
  const NoiseModel a = build_2d_divfree_modes(g, {m1});
  const NoiseModel b = build_2d_divfree_modes(g, {m2});
  double err = 0.0;
  for (std::size_t i = 0; i < both.variance().a.data().size(); ++i) {
    err = std::max(err, std::abs(both.variance().a.data()[i] - a.variance().a.data()[i] -
                                 b.variance().a.data()[i]));
  }
  CHECK(err < 1e-14);
  CHECK(ito_stokes_drift(both).max_abs() ==
        doctest::Approx(both.drift().max_abs()).epsilon(1e-14));
}

TEST_CASE("variance tensor is symmetric positive semidefinite") {
  const GridSpec g = oracle::grid();
  std::vector<SpectralField> phis;
  for (int k = 0; k < 4; ++k) phis.push_back(random_smooth_field(g, 3, 100 + k, 3.0));
  const NoiseModel m = NoiseModel::from_spectral(g, phis);
  CHECK(!m.bidimensional());
  CHECK(m.variance().min_eigenvalue() >= -1e-10);
  CHECK(VarianceTensor::slot(0, 1) == VarianceTensor::slot(1, 0));
  CHECK(VarianceTensor::slot(2, 1) == VarianceTensor::slot(1, 2));
  CHECK(variance_tensor(m).min_eigenvalue() >= -1e-10);
}

TEST_CASE("fluctuation-dissipation identity") {
  const FluctuationReport r = fluctuation_dissipation_check(oracle::grid(), 12, 77);
  CHECK(r.max_relative <= 1e-10);
}

TEST_CASE("thin-domain rescaling of kernel-defined modes") {
  const GridSpec g = oracle::grid();
  const double c = 0.5;
  KernelNoiseModel vertical;
  vertical.modes.push_back([c](double, double, double) {
    return std::array<double, 3>{0.0, 0.0, std::sqrt(c)};
  });
  const NoiseModel scaled = scale_noise_map(g, vertical, 0.1);
  for (std::size_t p = 0; p < g.physical_size(); p += 53) {
    CHECK(scaled.variance()(2, 2, p) == doctest::Approx(100.0 * c).epsilon(1e-12));
  }

  KernelNoiseModel mixed;
  mixed.modes.push_back([](double x, double y, double z) {
    return std::array<double, 3>{std::sin(y + z), std::cos(x) * z, std::sin(x + 2 * z)};
  });
  const double e1 = 0.5, e2 = 0.3;
  const KernelNoiseModel twice = scale_kernel(scale_kernel(mixed, e1), e2);
  const KernelNoiseModel once = scale_kernel(mixed, e1 * e2);
  for (double z : {-0.9, -0.2, 0.4, 0.95}) {
    const auto a = twice.modes[0](0.3, 1.2, z);
    const auto b = once.modes[0](0.3, 1.2, z);
    for (int i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
  }
  const auto id = scale_kernel(mixed, 1.0).modes[0](0.1, 0.2, 0.3);
  const auto ref = mixed.modes[0](0.1, 0.2, 0.3);
  for (int i = 0; i < 3; ++i) CHECK(id[i] == ref[i]);
  CHECK_THROWS_AS(scale_kernel(mixed, 0.0), std::invalid_argument);

  KernelNoiseModel flat;
  flat.bidimensional = true;
  flat.modes.push_back([](double x, double y, double) {
    return std::array<double, 3>{std::sin(y), std::sin(x), 0.0};
  });
  const NoiseModel f1 = scale_noise_map(g, flat, 1.0);
  const NoiseModel f2 = scale_noise_map(g, flat, 0.05);
  CHECK(f1.modes()[0].phi == f2.modes()[0].phi);
}

TEST_CASE("discrete rescaling is the identity on bidimensional models") {
  const GridSpec g = oracle::grid();
  const NoiseModel m = build_2d_divfree_modes(g, default_mode_specs(4, 1.0));
  const NoiseModel s = scale_noise_map(m, 0.01);
  for (std::size_t k = 0; k < m.size(); ++k) CHECK(s.modes()[k].phi == m.modes()[k].phi);
  const NoiseModel full = NoiseModel::from_spectral(g, {random_smooth_field(g, 3, 1, 3.0)});
  CHECK_THROWS_AS(scale_noise_map(full, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(scale_noise_map(m, -1.0), std::invalid_argument);
}

TEST_CASE("Brownian increments") {
  const BrownianDriver d(42, 0.01);
  CHECK(d.sample_increments(7, 5) == BrownianDriver(42, 0.01).sample_increments(7, 5));
  CHECK(d.sample_increments(7, 5) != d.sample_increments(8, 5));
  CHECK_THROWS_AS(BrownianDriver(1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(BrownianDriver(1, -1.0), std::invalid_argument);

  const int n = 100000;
  double s0 = 0, s1 = 0, s00 = 0, s11 = 0, s01 = 0;
  for (int k = 0; k < n; ++k) {
    const auto x = d.sample_increments(std::uint64_t(k), 2);
    s0 += x[0];
    s1 += x[1];
    s00 += x[0] * x[0];
    s11 += x[1] * x[1];
    s01 += x[0] * x[1];
  }
  const double m0 = s0 / n, m1 = s1 / n;
  const double v0 = s00 / n - m0 * m0, v1 = s11 / n - m1 * m1;
  CHECK(std::abs(v0 / 0.01 - 1.0) < 0.03);
  CHECK(std::abs(v1 / 0.01 - 1.0) < 0.03);
  CHECK(std::abs((s01 / n - m0 * m1) / std::sqrt(v0 * v1)) < 0.02);
}

TEST_CASE("regularity audit") {
  const GridSpec g = oracle::grid();
  const RegularityReport empty = regularity_audit(NoiseModel{});
  CHECK(empty.h4_sum == 0.0);
  CHECK(empty.sup_linf == 0.0);
  CHECK(!empty.divergence_flagged);

  const NoiseModel unit = build_2d_divfree_modes(g, {ModeSpec{1, 0, 1.0}});
  const RegularityReport r = regularity_audit(unit);
  CHECK(std::isfinite(r.h4_sum));
  CHECK(r.h4_sum > 0.0);
  CHECK(!r.divergence_flagged);

  const NoiseModel bad = single_field_model(
      g, [](double x, double, double) { return std::sin(x); }, zero(), zero());
  CHECK(regularity_audit(bad).divergence_flagged);
}
