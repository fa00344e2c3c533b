#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "thinflow/field.hpp"

namespace thinflow {

/// One horizontal streamfunction mode
///   psi = amplitude * cos(kx x + px) * cos(ky y + py)
/// generating the divergence-free velocity (d_y psi, -d_x psi, 0).
struct ModeSpec {
  int kx = 1;
  int ky = 0;
  double amplitude = 1.0;
  double px = 0.0;
  double py = 0.0;
  bool operator==(const ModeSpec&) const = default;
};

/// A noise eigenmode. `phi` already includes sqrt(upsilon).
struct NoiseMode {
  int index = 0;
  double amplitude = 0.0;
  SpectralField phi;       // 3 components
  PhysicalField phi_phys;  // same field on the grid
};

/// Pointwise symmetric tensor a = sum_k phi_k phi_k^T. Only the six unique
/// entries are stored, so symmetry holds exactly.
struct VarianceTensor {
  PhysicalField a;  // components: xx, xy, xz, yy, yz, zz

  static int slot(int i, int j);
  double operator()(int i, int j, std::size_t point) const {
    return a.comp(slot(i, j))[point];
  }
  /// Smallest eigenvalue over all grid points.
  double min_eigenvalue() const;
};

/// Finite set of transport-noise modes with cached variance tensor and
/// Ito-Stokes drift u_s = 1/2 div(a).
class NoiseModel {
 public:
  NoiseModel() = default;

  /// Modes given as physical 3-vector fields (before sqrt(upsilon) scaling).
  static NoiseModel from_fields(const GridSpec& g, const std::vector<PhysicalField>& phis,
                                double upsilon = 1.0, double alpha_sigma = 1.0,
                                const std::vector<double>& amplitudes = {});
  /// Modes given by their Fourier coefficients (before sqrt(upsilon) scaling).
  static NoiseModel from_spectral(const GridSpec& g, const std::vector<SpectralField>& phis,
                                  double upsilon = 1.0, double alpha_sigma = 1.0,
                                  const std::vector<double>& amplitudes = {});

  const GridSpec& grid() const { return grid_; }
  const std::vector<NoiseMode>& modes() const { return modes_; }
  std::size_t size() const { return modes_.size(); }
  double upsilon() const { return upsilon_; }
  double alpha_sigma() const { return alpha_sigma_; }
  void set_alpha_sigma(double a) { alpha_sigma_ = a; }

  /// True when every mode has zero vertical component and no z dependence.
  bool bidimensional() const { return bidimensional_; }
  /// True when no mode carries any energy (upsilon = 0 or empty).
  bool silent() const { return silent_; }

  const VarianceTensor& variance() const { return variance_; }
  const SpectralField& drift() const { return drift_; }        // u_s, 3 components
  const PhysicalField& drift_phys() const { return drift_phys_; }

  /// sum_k c_k phi_k on the grid (3 components).
  PhysicalField combine(std::span<const double> coeffs) const;

 private:
  void finalize();

  GridSpec grid_{};
  std::vector<NoiseMode> modes_;
  double upsilon_ = 1.0;
  double alpha_sigma_ = 1.0;
  bool bidimensional_ = true;
  bool silent_ = true;
  VarianceTensor variance_;
  SpectralField drift_;
  PhysicalField drift_phys_;
};

/// Bidimensional divergence-free model from streamfunction modes. Throws on
/// an empty list, a zero wavevector or a mode outside the resolved band.
NoiseModel build_2d_divfree_modes(const GridSpec& g, const std::vector<ModeSpec>& spec,
                                  double upsilon = 1.0, double alpha_sigma = 1.0);

/// Deterministic low-wavenumber mode set: `count` modes with amplitude
/// `amplitude / |k|` and spread phases.
std::vector<ModeSpec> default_mode_specs(int count, double amplitude);

VarianceTensor variance_tensor(const NoiseModel& model);
SpectralField ito_stokes_drift(const NoiseModel& model);

/// div(a grad q) from the physical gradient of q (3 components), truncated.
SpectralField divergence_a_grad(const NoiseModel& model, const PhysicalField& grad_q);

/// Noise modes defined analytically, used to express the thin-domain
/// rescaling phi_eps(x,y,z) = (phi^H(x,y,eps z), phi^z(x,y,eps z) / eps).
using ModeFunction = std::function<std::array<double, 3>(double, double, double)>;
struct KernelNoiseModel {
  std::vector<ModeFunction> modes;
  double upsilon = 1.0;
  double alpha_sigma = 1.0;
  /// Declares phi^z = 0 and no z dependence; the rescaling is then the identity.
  bool bidimensional = false;
};

KernelNoiseModel scale_kernel(const KernelNoiseModel& model, double eps);
NoiseModel sample_kernel_model(const GridSpec& g, const KernelNoiseModel& model);
NoiseModel scale_noise_map(const GridSpec& g, const KernelNoiseModel& model, double eps);
/// Discrete models are only rescalable when bidimensional (identity map).
NoiseModel scale_noise_map(const NoiseModel& model, double eps);

/// Gaussian increments keyed on (seed, step, mode): the same key always
/// yields the same value, independent of who asks or in which order.
class BrownianDriver {
 public:
  BrownianDriver(std::uint64_t seed, double dt);

  std::uint64_t seed() const { return seed_; }
  double dt() const { return dt_; }

  std::vector<double> sample_increments(std::uint64_t step, std::size_t modes) const;
  void sample_increments(std::uint64_t step, std::span<double> out) const;

 private:
  std::uint64_t seed_;
  double dt_;
};

struct RegularityReport {
  double h4_sum = 0.0;          // sum_k ||phi_k||_{H^4}^2
  double sup_linf = 0.0;        // max_k ||phi_k||_{L^inf}
  double drift_h4 = 0.0;        // ||u_s||_{H^4}
  double max_divergence = 0.0;  // max_k ||div phi_k||_{L2} / ||phi_k||_{H1}
  bool divergence_flagged = false;
};

RegularityReport regularity_audit(const NoiseModel& model, double divergence_tol = 1e-12);

}  // namespace thinflow
