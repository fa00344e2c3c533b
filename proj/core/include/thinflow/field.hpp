#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "thinflow/grid.hpp"

namespace thinflow {

using cplx = std::complex<double>;

/// Truncated Fourier coefficients of a real periodic field with one or more
/// components. Coefficients are normalised so that
/// f(x) = sum_k c_k exp(i k.x), with the real-to-complex half spectrum stored
/// per component.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(const GridSpec& grid, int components);

  const GridSpec& grid() const { return grid_; }
  int components() const { return ncomp_; }
  std::size_t component_size() const { return grid_.spectral_size(); }
  bool empty() const { return ncomp_ == 0; }

  cplx* comp(int c) { return data_.data() + std::size_t(c) * component_size(); }
  const cplx* comp(int c) const {
    return data_.data() + std::size_t(c) * component_size();
  }
  cplx& at(int c, int iz, int iy, int ix) {
    return comp(c)[grid_.spectral_index(iz, iy, ix)];
  }
  const cplx& at(int c, int iz, int iy, int ix) const {
    return comp(c)[grid_.spectral_index(iz, iy, ix)];
  }

  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

  /// Copy of one component as a scalar field.
  SpectralField component(int c) const;
  void set_component(int c, const SpectralField& scalar);

  /// Vector field assembled from scalar fields on one grid.
  static SpectralField stack(std::initializer_list<const SpectralField*> parts);

  void set_zero();
  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  /// this += s * o
  void axpy(double s, const SpectralField& o);

  /// Largest coefficient modulus.
  double max_abs() const;
  bool all_finite() const;

  bool operator==(const SpectralField& o) const = default;

 private:
  void check_compatible(const SpectralField& o) const;

  GridSpec grid_{};
  int ncomp_ = 0;
  std::vector<cplx> data_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Real grid values, one array per component, x fastest.
class PhysicalField {
 public:
  PhysicalField() = default;
  PhysicalField(const GridSpec& grid, int components);

  const GridSpec& grid() const { return grid_; }
  int components() const { return ncomp_; }
  std::size_t component_size() const { return grid_.physical_size(); }

  double* comp(int c) { return data_.data() + std::size_t(c) * component_size(); }
  const double* comp(int c) const {
    return data_.data() + std::size_t(c) * component_size();
  }
  double& at(int c, int iz, int iy, int ix) {
    return comp(c)[grid_.physical_index(iz, iy, ix)];
  }
  double at(int c, int iz, int iy, int ix) const {
    return comp(c)[grid_.physical_index(iz, iy, ix)];
  }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// Fill a component from f(x, y, z).
  template <class F>
  void fill(int c, F&& f) {
    for (int iz = 0; iz < grid_.nz; ++iz)
      for (int iy = 0; iy < grid_.ny; ++iy)
        for (int ix = 0; ix < grid_.nx; ++ix)
          at(c, iz, iy, ix) = f(grid_.x(ix), grid_.y(iy), grid_.z(iz));
  }

  double max_abs() const;
  bool operator==(const PhysicalField& o) const = default;

 private:
  GridSpec grid_{};
  int ncomp_ = 0;
  std::vector<double> data_;
};

}  // namespace thinflow
