#include "thinflow/diagnostics.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace thinflow {

namespace {

std::vector<std::size_t> window_indices(const std::vector<double>& times, const Window& w) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= w.begin && times[i] <= w.end) idx.push_back(i);
  }
  return idx;
}

// sup of `point` plus trapezoid integral of `rate` over the window.
template <class Sample>
double sup_plus_integral(const std::vector<double>& times, const std::vector<Sample>& s,
                         const Window& w, const std::function<double(const Sample&)>& point,
                         const std::function<double(const Sample&)>& rate) {
  if (times.size() != s.size()) throw std::invalid_argument("series length mismatch");
  const auto idx = window_indices(times, w);
  if (idx.empty()) throw std::invalid_argument("empty evaluation window");
  double sup = 0.0;
  double integral = 0.0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    sup = std::max(sup, point(s[idx[j]]));
    if (j > 0) {
      const double dt = times[idx[j]] - times[idx[j - 1]];
      integral += 0.5 * dt * (rate(s[idx[j]]) + rate(s[idx[j - 1]]));
    }
  }
  return sup + integral;
}

}  // namespace

double trapezoid(const std::vector<double>& t, const std::vector<double>& y, const Window& w) {
  if (t.size() != y.size()) throw std::invalid_argument("series length mismatch");
  const auto idx = window_indices(t, w);
  double s = 0.0;
  for (std::size_t j = 1; j < idx.size(); ++j) {
    s += 0.5 * (t[idx[j]] - t[idx[j - 1]]) * (y[idx[j]] + y[idx[j - 1]]);
  }
  return s;
}

double compute_E0(const std::vector<double>& times, const std::vector<NormSample>& diff,
                  double eps, const Window& window) {
  return sup_plus_integral<NormSample>(
      times, diff, window,
      [eps](const NormSample& d) { return 0.5 * (d.leps2(eps) + d.theta_l2); },
      [eps](const NormSample& d) { return d.veps2(eps) + d.theta_h1; });
}

double compute_E1(const std::vector<double>& times, const std::vector<NormSample>& diff,
                  double eps, const Window& window, bool blew_up) {
  if (blew_up) return std::numeric_limits<double>::infinity();
  return sup_plus_integral<NormSample>(
      times, diff, window,
      [eps](const NormSample& d) { return d.veps2(eps) + d.theta_h1; },
      [eps](const NormSample& d) { return d.daeps2(eps) + d.theta_h2; });
}

double compute_E14(const std::vector<double>& times, const std::vector<NormSample>& samples,
                   const Window& window) {
  return sup_plus_integral<NormSample>(
      times, samples, window,
      [](const NormSample& s) {
        const double v = s.v_h1 + s.theta_h1;
        return 0.5 * v * v;
      },
      [](const NormSample& s) { return (s.v_h1 + s.theta_h1) * (s.v_h2 + s.theta_h2); });
}

double tau_delta_surrogate(const std::vector<double>& times,
                           const std::vector<NormSample>& samples, double delta,
                           const Window& window) {
  if (times.size() != samples.size()) throw std::invalid_argument("series length mismatch");
  const auto idx = window_indices(times, window);
  if (idx.empty()) throw std::invalid_argument("empty evaluation window");
  double sup = 0.0;
  double integral = 0.0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const NormSample& s = samples[idx[j]];
    const double v = s.v_h1 + s.theta_h1;
    sup = std::max(sup, 0.5 * v * v);
    if (j > 0) {
      const NormSample& p = samples[idx[j - 1]];
      integral += 0.5 * (times[idx[j]] - times[idx[j - 1]]) *
                  ((s.v_h1 + s.theta_h1) * (s.v_h2 + s.theta_h2) +
                   (p.v_h1 + p.theta_h1) * (p.v_h2 + p.theta_h2));
    }
    if (sup + integral >= delta) return times[idx[j]];
  }
  return times[idx.back()];
}

ErrorFunctionals error_functionals(const CoupledResult& run, double eps, const Window& window) {
  ErrorFunctionals e;
  e.window = window;
  e.E0 = compute_E0(run.times, run.diff, eps, window);
  e.E1 = compute_E1(run.times, run.diff, eps, window, run.blew_up);
  e.E14 = compute_E14(run.b.times, run.b.samples, window);
  return e;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("fit_rate needs at least three points");
  RateFit fit;
  fit.points = points;
  const double n = double(points.size());
  double sx = 0, sy = 0;
  std::vector<double> xs, ys;
  for (const auto& [e, err] : points) {
    if (!(e > 0.0) || !(err > 0.0) || !std::isfinite(err)) {
      throw std::invalid_argument("fit_rate needs positive finite eps and error values");
    }
    xs.push_back(std::log(e));
    ys.push_back(std::log(err));
    sx += xs.back();
    sy += ys.back();
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate needs distinct eps values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    sse += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  const double dof = n - 2.0;
  fit.slope_se = std::sqrt(sse / dof / sxx);
  boost::math::students_t dist(dof);
  fit.slope_ci = boost::math::quantile(boost::math::complement(dist, 0.025)) * fit.slope_se;
  return fit;
}

MomentPath moment_path(const RunResult& run, double eps) {
  MomentPath m;
  std::vector<double> rate;
  const double e4 = eps * eps * eps * eps;
  for (const NormSample& s : run.samples) {
    const double l = s.leps2(eps);
    m.sup_quartic = std::max(m.sup_quartic, l * l);
    rate.push_back(s.v_l2 * s.v_h1 + e4 * s.w_l2 * s.w_h1);
  }
  m.lhs = m.sup_quartic + trapezoid(run.times, rate);
  return m;
}

MomentAuditReport moment_bound_audit(std::vector<MomentEnsemble> ensembles, double max_ratio,
                                     std::size_t min_paths) {
  if (ensembles.size() < 2) throw std::invalid_argument("moment audit needs >= 2 eps values");
  std::sort(ensembles.begin(), ensembles.end(),
            [](const MomentEnsemble& a, const MomentEnsemble& b) { return a.eps > b.eps; });
  MomentAuditReport r;
  for (const auto& e : ensembles) {
    if (e.paths.size() < min_paths) {
      throw std::invalid_argument("moment audit ensemble at eps=" + std::to_string(e.eps) +
                                  " has fewer than " + std::to_string(min_paths) + " paths");
    }
    double s = 0, l = 0;
    for (const auto& p : e.paths) {
      s += p.sup_quartic;
      l += p.lhs;
    }
    r.eps.push_back(e.eps);
    r.sup_quartic_mean.push_back(s / double(e.paths.size()));
    r.lhs_mean.push_back(l / double(e.paths.size()));
  }
  for (std::size_t i = 1; i < r.eps.size(); ++i) {
    r.sup_ratio.push_back(r.sup_quartic_mean[i] / r.sup_quartic_mean[i - 1]);
    r.lhs_ratio.push_back(r.lhs_mean[i] / r.lhs_mean[i - 1]);
  }
  r.max_sup_ratio = *std::max_element(r.sup_ratio.begin(), r.sup_ratio.end());
  r.max_lhs_ratio = *std::max_element(r.lhs_ratio.begin(), r.lhs_ratio.end());
  r.pass = r.max_sup_ratio <= max_ratio && r.max_lhs_ratio <= max_ratio;
  return r;
}

EnergyResidualReport energy_residual(const std::vector<EnergyTerms>& terms) {
  EnergyResidualReport r;
  for (const auto& t : terms) {
    r.energy_scale = std::max({r.energy_scale, t.energy_before, t.energy_after});
  }
  if (r.energy_scale == 0.0) {
    r.residuals.assign(terms.size(), 0.0);
    return r;
  }
  bool first = true;
  for (const auto& t : terms) {
    const double res = t.energy_after + t.dt * t.dissipation - t.energy_before -
                       t.quadratic_variation - t.martingale - t.dt * t.buoyancy_work;
    const double nres = res / r.energy_scale;
    r.residuals.push_back(nres);
    r.max_violation = std::max(r.max_violation, nres);
    r.min_residual = first ? nres : std::min(r.min_residual, nres);
    first = false;
  }
  return r;
}

H3Probe h3_boundedness_probe(const RunResult& run) {
  H3Probe p;
  std::vector<double> h3;
  for (const auto& s : run.samples) {
    p.sup_h2 = std::max(p.sup_h2, s.v_h2);
    h3.push_back(s.v_h3);
  }
  p.int_h3 = trapezoid(run.times, h3);
  p.finite = std::isfinite(p.sup_h2) && std::isfinite(p.int_h3) && !run.blew_up;
  return p;
}

H3Comparison compare_h3(const H3Probe& coarse, const H3Probe& fine, double max_ratio) {
  auto ratio = [](double a, double b) {
    if (a == 0.0 && b == 0.0) return 1.0;
    if (a <= 0.0 || b <= 0.0) return std::numeric_limits<double>::infinity();
    return std::max(a / b, b / a);
  };
  H3Comparison c;
  c.sup_ratio = ratio(coarse.sup_h2, fine.sup_h2);
  c.int_ratio = ratio(coarse.int_h3, fine.int_h3);
  c.pass = coarse.finite && fine.finite && c.sup_ratio <= max_ratio && c.int_ratio <= max_ratio;
  return c;
}

}  // namespace thinflow
