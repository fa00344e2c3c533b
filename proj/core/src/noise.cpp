#include "thinflow/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "thinflow/norms.hpp"
#include "thinflow/operators.hpp"
#include "thinflow/transform.hpp"

namespace thinflow {

int VarianceTensor::slot(int i, int j) {
  if (i > j) std::swap(i, j);
  static constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return table[i][j];
}

double VarianceTensor::min_eigenvalue() const {
  double lo = 0.0;
  bool first = true;
  const std::size_t n = a.component_size();
  for (std::size_t p = 0; p < n; ++p) {
    // Closed-form eigenvalues of a symmetric 3x3 matrix.
    const double a11 = (*this)(0, 0, p), a12 = (*this)(0, 1, p), a13 = (*this)(0, 2, p);
    const double a22 = (*this)(1, 1, p), a23 = (*this)(1, 2, p), a33 = (*this)(2, 2, p);
    const double p1 = a12 * a12 + a13 * a13 + a23 * a23;
    double emin;
    if (p1 == 0.0) {
      emin = std::min({a11, a22, a33});
    } else {
      const double q = (a11 + a22 + a33) / 3.0;
      const double p2 = (a11 - q) * (a11 - q) + (a22 - q) * (a22 - q) + (a33 - q) * (a33 - q) +
                        2.0 * p1;
      const double pp = std::sqrt(p2 / 6.0);
      const double b11 = (a11 - q) / pp, b22 = (a22 - q) / pp, b33 = (a33 - q) / pp;
      const double b12 = a12 / pp, b13 = a13 / pp, b23 = a23 / pp;
      const double detb = b11 * (b22 * b33 - b23 * b23) - b12 * (b12 * b33 - b23 * b13) +
                          b13 * (b12 * b23 - b22 * b13);
      const double r = std::clamp(detb / 2.0, -1.0, 1.0);
      const double phi = std::acos(r) / 3.0;
      emin = q + 2.0 * pp * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    }
    if (first || emin < lo) lo = emin;
    first = false;
  }
  return lo;
}

NoiseModel NoiseModel::from_fields(const GridSpec& g, const std::vector<PhysicalField>& phis,
                                   double upsilon, double alpha_sigma,
                                   const std::vector<double>& amplitudes) {
  if (!(upsilon >= 0.0)) throw std::invalid_argument("noise.upsilon must be >= 0");
  NoiseModel m;
  m.grid_ = g;
  m.upsilon_ = upsilon;
  m.alpha_sigma_ = alpha_sigma;
  const double root = std::sqrt(upsilon);
  for (std::size_t k = 0; k < phis.size(); ++k) {
    if (phis[k].components() != 3 || !(phis[k].grid() == g)) {
      throw std::invalid_argument("noise mode " + std::to_string(k) +
                                  " must be a 3-component field on the model grid");
    }
    NoiseMode mode;
    mode.index = int(k);
    mode.amplitude = k < amplitudes.size() ? amplitudes[k] : 1.0;
    mode.phi_phys = phis[k];
    for (double& v : mode.phi_phys.data()) v *= root;
    mode.phi = to_spectral(mode.phi_phys);
    m.modes_.push_back(std::move(mode));
  }
  m.finalize();
  return m;
}

NoiseModel NoiseModel::from_spectral(const GridSpec& g, const std::vector<SpectralField>& phis,
                                     double upsilon, double alpha_sigma,
                                     const std::vector<double>& amplitudes) {
  if (!(upsilon >= 0.0)) throw std::invalid_argument("noise.upsilon must be >= 0");
  NoiseModel m;
  m.grid_ = g;
  m.upsilon_ = upsilon;
  m.alpha_sigma_ = alpha_sigma;
  const double root = std::sqrt(upsilon);
  for (std::size_t k = 0; k < phis.size(); ++k) {
    if (phis[k].components() != 3 || !(phis[k].grid() == g)) {
      throw std::invalid_argument("noise mode " + std::to_string(k) +
                                  " must be a 3-component field on the model grid");
    }
    NoiseMode mode;
    mode.index = int(k);
    mode.amplitude = k < amplitudes.size() ? amplitudes[k] : 1.0;
    mode.phi = phis[k];
    mode.phi *= root;
    mode.phi_phys = to_physical(mode.phi);
    m.modes_.push_back(std::move(mode));
  }
  m.finalize();
  return m;
}

void NoiseModel::finalize() {
  const GridSpec& g = grid_;
  bidimensional_ = true;
  silent_ = true;
  for (const NoiseMode& mode : modes_) {
    if (mode.phi.max_abs() != 0.0) silent_ = false;
    if (mode.phi.component(2).max_abs() != 0.0) bidimensional_ = false;
    for (int c = 0; c < 2 && bidimensional_; ++c) {
      const cplx* p = mode.phi.comp(c);
      for_each_mode(g, [&](std::size_t i, int iz, int, int) {
        if (iz != 0 && p[i] != cplx(0.0, 0.0)) bidimensional_ = false;
      });
    }
  }
  variance_ = variance_tensor(*this);
  drift_ = ito_stokes_drift(*this);
  drift_phys_ = to_physical(drift_);
}

PhysicalField NoiseModel::combine(std::span<const double> coeffs) const {
  if (coeffs.size() != modes_.size()) {
    throw std::invalid_argument("combine: coefficient count differs from mode count");
  }
  PhysicalField out(grid_, 3);
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    const double c = coeffs[k];
    const auto& src = modes_[k].phi_phys.data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += c * src[i];
  }
  return out;
}

NoiseModel build_2d_divfree_modes(const GridSpec& g, const std::vector<ModeSpec>& spec,
                                  double upsilon, double alpha_sigma) {
  if (spec.empty()) throw std::invalid_argument("noise model needs at least one mode");
  std::vector<SpectralField> phis;
  std::vector<double> amps;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const ModeSpec& s = spec[k];
    if (s.kx == 0 && s.ky == 0) {
      throw std::invalid_argument("noise mode " + std::to_string(k) + ": zero wavevector");
    }
    const int ax = std::abs(s.kx);
    const int iy_any = s.ky >= 0 ? s.ky : g.ny + s.ky;
    if (ax >= g.nx / 2 || std::abs(s.ky) >= g.ny / 2 || !g.keep(0, iy_any, ax)) {
      throw std::invalid_argument("noise mode " + std::to_string(k) +
                                  ": wavevector outside the resolved band");
    }
    // Streamfunction coefficients from the product of two cosines; terms
    // with negative x-wavenumber are the conjugates of stored ones.
    SpectralField psi(g, 1);
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) {
        const int mx = s1 * s.kx;
        const int my = s2 * s.ky;
        if (mx < 0) continue;
        const int iy = my >= 0 ? my : g.ny + my;
        psi.at(0, 0, iy, mx) += 0.25 * s.amplitude * std::polar(1.0, s1 * s.px + s2 * s.py);
      }
    }
    symmetrize_in_place(psi);
    SpectralField dpsi_x = derivative(psi, 0);
    SpectralField dpsi_y = derivative(psi, 1);
    SpectralField phi(g, 3);
    phi.set_component(0, dpsi_y);
    dpsi_x *= -1.0;
    phi.set_component(1, dpsi_x);
    phis.push_back(std::move(phi));
    amps.push_back(s.amplitude);
  }
  return NoiseModel::from_spectral(g, phis, upsilon, alpha_sigma, amps);
}

std::vector<ModeSpec> default_mode_specs(int count, double amplitude) {
  if (count < 0) throw std::invalid_argument("noise.mode_count must be >= 0");
  // Enumerate wavevectors by increasing |k|^2 in the half plane kx > 0 or
  // (kx = 0, ky > 0), which lists each streamfunction mode once.
  std::vector<std::pair<int, int>> ks;
  for (int r2 = 1; int(ks.size()) < count; ++r2) {
    for (int kx = 0; kx * kx <= r2; ++kx) {
      for (int ky = -r2; ky <= r2; ++ky) {
        if (kx * kx + ky * ky != r2) continue;
        if (kx == 0 && ky <= 0) continue;
        ks.emplace_back(kx, ky);
      }
    }
  }
  std::vector<ModeSpec> out;
  for (int i = 0; i < count; ++i) {
    ModeSpec m;
    m.kx = ks[i].first;
    m.ky = ks[i].second;
    const double k2 = double(m.kx * m.kx + m.ky * m.ky);
    m.amplitude = amplitude / k2;
    m.px = std::fmod(0.7 + 1.9 * i, 2.0 * std::numbers::pi);
    m.py = std::fmod(0.3 + 2.3 * i, 2.0 * std::numbers::pi);
    out.push_back(m);
  }
  return out;
}

VarianceTensor variance_tensor(const NoiseModel& model) {
  VarianceTensor vt;
  vt.a = PhysicalField(model.grid(), 6);
  const std::size_t n = model.grid().physical_size();
  for (const NoiseMode& mode : model.modes()) {
    const double* f[3] = {mode.phi_phys.comp(0), mode.phi_phys.comp(1), mode.phi_phys.comp(2)};
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        double* dst = vt.a.comp(VarianceTensor::slot(i, j));
        for (std::size_t p = 0; p < n; ++p) dst[p] += f[i][p] * f[j][p];
      }
    }
  }
  return vt;
}

SpectralField ito_stokes_drift(const NoiseModel& model) {
  const GridSpec& g = model.grid();
  SpectralField a_hat = to_spectral(model.variance().a);
  SpectralField us(g, 3);
  for (int i = 0; i < 3; ++i) {
    SpectralField row(g, 3);
    for (int j = 0; j < 3; ++j) row.set_component(j, a_hat.component(VarianceTensor::slot(i, j)));
    SpectralField d = divergence3(row);
    d *= 0.5;
    us.set_component(i, d);
  }
  dealias_in_place(us);
  return us;
}

SpectralField divergence_a_grad(const NoiseModel& model, const PhysicalField& grad_q) {
  const GridSpec& g = model.grid();
  const std::size_t n = g.physical_size();
  const VarianceTensor& a = model.variance();
  const int rows = model.bidimensional() ? 2 : 3;
  PhysicalField flux(g, 3);
  for (int i = 0; i < rows; ++i) {
    double* out = flux.comp(i);
    const double* ai0 = a.a.comp(VarianceTensor::slot(i, 0));
    const double* ai1 = a.a.comp(VarianceTensor::slot(i, 1));
    const double* ai2 = a.a.comp(VarianceTensor::slot(i, 2));
    const double* g0 = grad_q.comp(0);
    const double* g1 = grad_q.comp(1);
    const double* g2 = grad_q.comp(2);
    if (model.bidimensional()) {
      for (std::size_t p = 0; p < n; ++p) out[p] = ai0[p] * g0[p] + ai1[p] * g1[p];
    } else {
      for (std::size_t p = 0; p < n; ++p) out[p] = ai0[p] * g0[p] + ai1[p] * g1[p] + ai2[p] * g2[p];
    }
  }
  SpectralField flux_hat(g, 3);
  for (int i = 0; i < rows; ++i) forward_component(g, flux.comp(i), flux_hat.comp(i));
  SpectralField out = divergence3(flux_hat);
  dealias_in_place(out);
  return out;
}

KernelNoiseModel scale_kernel(const KernelNoiseModel& model, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("scale_noise_map requires eps > 0");
  if (model.bidimensional) return model;
  KernelNoiseModel out = model;
  for (auto& f : out.modes) {
    ModeFunction base = f;
    f = [base, eps](double x, double y, double z) {
      auto v = base(x, y, eps * z);
      v[2] /= eps;
      return v;
    };
  }
  return out;
}

NoiseModel sample_kernel_model(const GridSpec& g, const KernelNoiseModel& model) {
  std::vector<PhysicalField> phis;
  for (const auto& f : model.modes) {
    PhysicalField phi(g, 3);
    for (int iz = 0; iz < g.nz; ++iz)
      for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
          const auto v = f(g.x(ix), g.y(iy), g.z(iz));
          for (int c = 0; c < 3; ++c) phi.at(c, iz, iy, ix) = v[c];
        }
    phis.push_back(std::move(phi));
  }
  return NoiseModel::from_fields(g, phis, model.upsilon, model.alpha_sigma);
}

NoiseModel scale_noise_map(const GridSpec& g, const KernelNoiseModel& model, double eps) {
  return sample_kernel_model(g, scale_kernel(model, eps));
}

NoiseModel scale_noise_map(const NoiseModel& model, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("scale_noise_map requires eps > 0");
  if (!model.bidimensional() && eps != 1.0) {
    throw std::invalid_argument(
        "scale_noise_map: z-dependent discrete models need an analytic kernel model");
  }
  return model;
}

BrownianDriver::BrownianDriver(std::uint64_t seed, double dt) : seed_(seed), dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("BrownianDriver requires dt > 0");
}

void BrownianDriver::sample_increments(std::uint64_t step, std::span<double> out) const {
  std::seed_seq seq{std::uint32_t(seed_), std::uint32_t(seed_ >> 32), std::uint32_t(step),
                    std::uint32_t(step >> 32), 0x7f4a7c15u};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = std::sqrt(dt_);
  for (double& x : out) x = scale * normal(rng);
}

std::vector<double> BrownianDriver::sample_increments(std::uint64_t step,
                                                      std::size_t modes) const {
  std::vector<double> out(modes);
  sample_increments(step, std::span<double>(out));
  return out;
}

namespace {
double h4_squared(const SpectralField& f) {
  const GridSpec& g = f.grid();
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    const cplx* p = f.comp(c);
    for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
      const double k2 = g.kx(ix) * g.kx(ix) + g.ky(iy) * g.ky(iy) + g.kz(iz) * g.kz(iz);
      const double w = std::pow(1.0 + k2, 4);
      sum += g.hermitian_weight(ix) * w * std::norm(p[i]);
    });
  }
  return sum * GridSpec::volume();
}
}  // namespace

RegularityReport regularity_audit(const NoiseModel& model, double divergence_tol) {
  RegularityReport r;
  for (const NoiseMode& mode : model.modes()) {
    r.h4_sum += h4_squared(mode.phi);
    r.sup_linf = std::max(r.sup_linf, mode.phi_phys.max_abs());
    const double scale = std::max(norm(mode.phi, NormKind::L2()) + norm(mode.phi, NormKind::V()),
                                  1e-300);
    const double div = norm(divergence3(mode.phi), NormKind::L2()) / scale;
    r.max_divergence = std::max(r.max_divergence, div);
  }
  if (!model.drift().empty()) r.drift_h4 = std::sqrt(h4_squared(model.drift()));
  r.divergence_flagged = r.max_divergence > divergence_tol;
  return r;
}

}  // namespace thinflow
