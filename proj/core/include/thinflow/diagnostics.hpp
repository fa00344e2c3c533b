#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "thinflow/integrator.hpp"
#include "thinflow/norms.hpp"

namespace thinflow {

/// Time window [begin, end] over which functionals are evaluated. Only
/// recorded samples inside the window contribute.
struct Window {
  double begin = 0.0;
  double end = std::numeric_limits<double>::infinity();
};

/// sup 1/2 (||U||^2_eps + ||Theta||^2) + int (||grad U||^2_eps + ||grad Theta||^2)
double compute_E0(const std::vector<double>& times, const std::vector<NormSample>& diff,
                  double eps, const Window& window = {});

/// sup (||U||^2_Veps + ||Theta||^2_V) + int (||U||^2_DAeps + ||Theta||^2_DA);
/// +infinity when the coupled run blew up.
double compute_E1(const std::vector<double>& times, const std::vector<NormSample>& diff,
                  double eps, const Window& window, bool blew_up);

/// sup 1/2 ||(v,theta)||_V^4 + int ||(v,theta)||_V^2 ||(v,theta)||_DA^2
double compute_E14(const std::vector<double>& times, const std::vector<NormSample>& samples,
                   const Window& window = {});

/// First recorded time at which E14 over [window.begin, t] reaches delta;
/// the last recorded time in the window otherwise.
double tau_delta_surrogate(const std::vector<double>& times,
                           const std::vector<NormSample>& samples, double delta,
                           const Window& window = {});

struct ErrorFunctionals {
  double E0 = 0.0;
  double E14 = 0.0;
  double E1 = 0.0;
  Window window;
};

/// E0 and E1 of the difference series, E14 of the reference (model B) run.
ErrorFunctionals error_functionals(const CoupledResult& run, double eps, const Window& window = {});

struct RateFit {
  std::vector<std::pair<double, double>> points;  // (eps, error)
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
  /// Half-width of the 95% confidence interval of the slope.
  double slope_ci = 0.0;
};

/// Least-squares slope of log(error) against log(eps). Throws on fewer than
/// three points or a nonpositive value.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

/// Per-path value of the fourth-moment bound:
///   sup ||u||^4_eps + int (||v||^2 ||grad v||^2 + eps^4 ||w||^2 ||grad w||^2)
struct MomentPath {
  double sup_quartic = 0.0;
  double lhs = 0.0;
};
MomentPath moment_path(const RunResult& run, double eps);

struct MomentEnsemble {
  double eps = 0.0;
  std::vector<MomentPath> paths;
};

struct MomentAuditReport {
  std::vector<double> eps;
  std::vector<double> sup_quartic_mean;
  std::vector<double> lhs_mean;
  /// Ratios between consecutive eps values (ordered by decreasing eps).
  std::vector<double> sup_ratio;
  std::vector<double> lhs_ratio;
  double max_sup_ratio = 0.0;
  double max_lhs_ratio = 0.0;
  bool pass = false;
};

/// Passes when neither estimate grows by more than `max_ratio` from one eps
/// to the next smaller one. Throws when an ensemble has fewer than
/// `min_paths` members or fewer than two eps values are given.
MomentAuditReport moment_bound_audit(std::vector<MomentEnsemble> ensembles,
                                     double max_ratio = 1.5, std::size_t min_paths = 20);

struct EnergyResidualReport {
  std::vector<double> residuals;  // normalised per step
  double energy_scale = 0.0;
  double max_violation = 0.0;  // largest positive normalised residual, >= 0
  double min_residual = 0.0;
};

/// Per-step residual of the discrete energy inequality,
///   E_{n+1} + dt D_n - E_n - Q_n - M_n - dt B_n,
/// normalised by the largest energy of the run.
EnergyResidualReport energy_residual(const std::vector<EnergyTerms>& terms);

struct H3Probe {
  double sup_h2 = 0.0;  // sup ||Delta v||^2
  double int_h3 = 0.0;  // int ||v||^2_{D(A^{3/2})}
  bool finite = true;
};
H3Probe h3_boundedness_probe(const RunResult& run);

struct H3Comparison {
  double sup_ratio = 0.0;
  double int_ratio = 0.0;
  bool pass = false;
};
/// Self-consistency under time-step refinement: both ratios <= max_ratio.
H3Comparison compare_h3(const H3Probe& coarse, const H3Probe& fine, double max_ratio = 1.2);

/// Trapezoid integral of y over the samples whose time lies in the window.
double trapezoid(const std::vector<double>& t, const std::vector<double>& y,
                 const Window& window = {});

}  // namespace thinflow
