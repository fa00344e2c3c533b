#include "thinflow/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "thinflow/operators.hpp"

namespace thinflow {

std::string NormKind::name() const {
  switch (tag) {
    case Tag::L2: return "L2";
    case Tag::Leps: return "Leps";
    case Tag::V: return "V";
    case Tag::Veps: return "Veps";
    case Tag::DA: return "DA";
    case Tag::DAeps: return "DAeps";
    case Tag::DA32: return "DA32";
  }
  return "?";
}

namespace {

// Weight |k|^(2p) for the seminorm of order p.
double order_of(NormKind::Tag t) {
  switch (t) {
    case NormKind::Tag::L2:
    case NormKind::Tag::Leps: return 0;
    case NormKind::Tag::V:
    case NormKind::Tag::Veps: return 1;
    case NormKind::Tag::DA:
    case NormKind::Tag::DAeps: return 2;
    case NormKind::Tag::DA32: return 3;
  }
  return 0;
}

double component_inner(const GridSpec& g, const cplx* a, const cplx* b, int order) {
  double sum = 0.0;
  for_each_mode(g, [&](std::size_t i, int iz, int iy, int ix) {
    double w = g.hermitian_weight(ix);
    if (order > 0) {
      const double k2 = g.dkx(ix) * g.dkx(ix) + g.dky(iy) * g.dky(iy) + g.dkz(iz) * g.dkz(iz);
      w *= order == 1 ? k2 : (order == 2 ? k2 * k2 : k2 * k2 * k2);
    }
    sum += w * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
  });
  return sum * GridSpec::volume();
}

}  // namespace

double inner_product(const SpectralField& a, const SpectralField& b, const NormKind& kind) {
  if (!(a.grid() == b.grid()) || a.components() != b.components()) {
    throw std::invalid_argument("inner_product: field shapes differ");
  }
  double eps2 = 1.0;
  if (kind.weighted()) {
    if (!kind.eps) throw std::invalid_argument("norm kind " + kind.name() + " requires eps");
    if (!(*kind.eps > 0.0)) throw std::invalid_argument("norm eps must be positive");
    eps2 = *kind.eps * *kind.eps;
  }
  const int order = int(order_of(kind.tag));
  double total = 0.0;
  for (int c = 0; c < a.components(); ++c) {
    const double w = (kind.weighted() && c == 2) ? eps2 : 1.0;
    total += w * component_inner(a.grid(), a.comp(c), b.comp(c), order);
  }
  return total;
}

double norm_squared(const SpectralField& a, const NormKind& kind) {
  return inner_product(a, a, kind);
}

double norm(const SpectralField& a, const NormKind& kind) {
  return std::sqrt(std::max(0.0, norm_squared(a, kind)));
}

bool NormSample::all_finite() const {
  for (double x : {v_l2, v_h1, v_h2, v_h3, w_l2, w_h1, w_h2, theta_l2, theta_h1, theta_h2,
                   theta_h3}) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

NormSample sample_norms(const SpectralField& v, const SpectralField& w,
                        const SpectralField& theta) {
  NormSample s;
  if (!v.empty()) {
    s.v_l2 = norm_squared(v, NormKind::L2());
    s.v_h1 = norm_squared(v, NormKind::V());
    s.v_h2 = norm_squared(v, NormKind::DA());
    s.v_h3 = norm_squared(v, NormKind::DA32());
  }
  if (!w.empty()) {
    s.w_l2 = norm_squared(w, NormKind::L2());
    s.w_h1 = norm_squared(w, NormKind::V());
    s.w_h2 = norm_squared(w, NormKind::DA());
  }
  if (!theta.empty()) {
    s.theta_l2 = norm_squared(theta, NormKind::L2());
    s.theta_h1 = norm_squared(theta, NormKind::V());
    s.theta_h2 = norm_squared(theta, NormKind::DA());
    s.theta_h3 = norm_squared(theta, NormKind::DA32());
  }
  return s;
}

}  // namespace thinflow
