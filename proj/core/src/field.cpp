#include "thinflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace thinflow {

SpectralField::SpectralField(const GridSpec& grid, int components)
    : grid_(grid), ncomp_(components) {
  if (components < 1) throw std::invalid_argument("field needs at least one component");
  data_.assign(std::size_t(components) * grid.spectral_size(), cplx(0.0, 0.0));
}

void SpectralField::check_compatible(const SpectralField& o) const {
  if (!(grid_ == o.grid_) || ncomp_ != o.ncomp_) {
    throw std::invalid_argument("spectral field size mismatch");
  }
}

SpectralField SpectralField::component(int c) const {
  if (c < 0 || c >= ncomp_) throw std::out_of_range("component index out of range");
  SpectralField out(grid_, 1);
  std::copy(comp(c), comp(c) + component_size(), out.comp(0));
  return out;
}

void SpectralField::set_component(int c, const SpectralField& scalar) {
  if (c < 0 || c >= ncomp_) throw std::out_of_range("component index out of range");
  if (!(scalar.grid_ == grid_) || scalar.ncomp_ != 1) {
    throw std::invalid_argument("set_component expects a scalar on the same grid");
  }
  std::copy(scalar.comp(0), scalar.comp(0) + component_size(), comp(c));
}

SpectralField SpectralField::stack(std::initializer_list<const SpectralField*> parts) {
  if (parts.size() == 0) throw std::invalid_argument("stack of zero fields");
  const GridSpec& g = (*parts.begin())->grid();
  int total = 0;
  for (const auto* p : parts) {
    if (!(p->grid() == g)) throw std::invalid_argument("stack: grid mismatch");
    total += p->components();
  }
  SpectralField out(g, total);
  int c = 0;
  for (const auto* p : parts) {
    for (int k = 0; k < p->components(); ++k, ++c) {
      std::copy(p->comp(k), p->comp(k) + out.component_size(), out.comp(c));
    }
  }
  return out;
}

void SpectralField::set_zero() { std::fill(data_.begin(), data_.end(), cplx(0.0, 0.0)); }

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

void SpectralField::axpy(double s, const SpectralField& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool SpectralField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

PhysicalField::PhysicalField(const GridSpec& grid, int components)
    : grid_(grid), ncomp_(components) {
  if (components < 1) throw std::invalid_argument("field needs at least one component");
  data_.assign(std::size_t(components) * grid.physical_size(), 0.0);
}

double PhysicalField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace thinflow
