#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thinflow/config.hpp"
#include "thinflow/diagnostics.hpp"

namespace thinflow {

/// Worst relative defects of the projectors over a batch of random fields.
struct ProjectorSuiteReport {
  int fields = 0;
  double peps_idempotence = 0.0;
  double peps_self_adjoint = 0.0;
  double peps_divergence = 0.0;
  double peps_gradient = 0.0;
  double p_idempotence = 0.0;
  double ar_orthogonality = 0.0;
};
ProjectorSuiteReport projector_suite(const GridSpec& g, const std::vector<double>& eps_values,
                                     int fields, std::uint64_t seed);

/// sum_k ||phi_k . grad q||^2 against (a grad q, grad q) on random
/// (noise model, q) pairs; worst relative mismatch.
struct FluctuationReport {
  int pairs = 0;
  double max_relative = 0.0;
};
FluctuationReport fluctuation_dissipation_check(const GridSpec& g, int pairs, std::uint64_t seed);

struct ContinuityReport {
  int fields = 0;
  /// max ||d_z w(v) + div_H v|| / ||div_H v|| over random admissible v.
  double max_residual = 0.0;
  /// w(v) for v = (sin x sin pi z, 0) against cos x (cos pi z + 1) / pi, max norm.
  double oracle_error = 0.0;
};
ContinuityReport continuity_check(const GridSpec& g, int fields, std::uint64_t seed);

struct ReductionReport {
  int steps = 0;
  /// rSNS with the identity kernel against SNS.
  bool ns_identical = false;
  /// PE_weak with the zero kernel and no additive vertical noise against PE_strong.
  bool pe_identical = false;
  double ns_max_diff = 0.0;
  double pe_max_diff = 0.0;
};
ReductionReport reduction_check(const RunConfig& base, int steps);

struct StokesDecayReport {
  /// Worst relative error of the mode amplitudes against exp(-|k|^2 t).
  double max_relative_error = 0.0;
  /// Two silent-noise runs with different seeds agree bitwise.
  bool seed_independent = false;
  double t_end = 0.0;
  double dt = 0.0;
};
StokesDecayReport stokes_decay_check(const GridSpec& g, double eps, double dt, double t_end);

struct EnergyAuditReport {
  int runs = 0;
  double dt = 0.0;
  double max_violation = 0.0;  // normalised
  double min_residual = 0.0;
  std::vector<double> per_run;
};
/// `runs` noise-on runs of `base` (seeds base.seed + i) with energy recording.
EnergyAuditReport energy_audit(const RunConfig& base, int runs);

/// One line of the `check` subcommand.
struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
};
/// Fast invariant suite over `base` (projectors, noise identity,
/// continuity, model reductions, deterministic limit, energy residual).
std::vector<CheckResult> run_check_suite(const RunConfig& base, bool quick = true);

}  // namespace thinflow
