#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "thinflow/config.hpp"
#include "thinflow/diagnostics.hpp"

namespace thinflow {

/// Identifies one coupled path of a sweep.
struct PathJob {
  std::size_t cell = 0;
  double eps = 0.0;
  double alpha_sigma = 0.0;
  std::uint64_t seed = 0;  // Brownian seed of the path
};

struct PathResult {
  std::uint64_t seed = 0;
  double E0 = 0.0;
  double E1 = 0.0;
  double E14 = 0.0;
  /// The Navier-Stokes member of the pair reached the blow-up surrogate.
  bool blew_up = false;
  double blowup_time = 0.0;
  MomentPath moment;  // of the Navier-Stokes member
  /// Non-empty when the path failed; the cell is then marked.
  std::string error;
};

struct CellReport {
  double eps = 0.0;
  double alpha_sigma = 0.0;
  double gamma = 0.0;
  ModelKind model_a = ModelKind::rSNS;
  ModelKind model_b = ModelKind::PE_weak;
  std::vector<PathResult> paths;
  std::size_t n_paths = 0;  // successful paths
  double E0_mean = 0.0, E0_se = 0.0;
  /// Over paths that did not blow up; NaN when none survived.
  double E1_mean = 0.0, E1_se = 0.0;
  double blowup_frac = 0.0;
  std::size_t failed_paths = 0;
};

struct SweepReport {
  SweepConfig config;
  std::string config_hash;
  std::vector<CellReport> cells;
  std::optional<RateFit> fit_E0;
  std::optional<RateFit> fit_E1;
  /// Why a fit is missing, e.g. identical models give zero error.
  std::string fit_note;
  bool resumed = false;
};

/// Path seed p of a sweep: base seed + p. The same seeds (hence the same
/// Brownian paths) are reused at every eps.
std::uint64_t path_seed(const SweepConfig& s, int path);

/// Runs one coupled path of the configured pair at (eps, alpha).
PathResult run_path(const SweepConfig& s, const PathJob& job);

using PathRunner = std::function<PathResult(const SweepConfig&, const PathJob&)>;

struct SweepOptions {
  /// Output directory; empty disables persistence.
  std::string out_dir;
  /// Overrides sweep.workers when > 0 (THINFLOW_WORKERS is read by the CLI).
  int workers = 0;
  /// Replaces run_path, e.g. to feed synthetic data through the pipeline.
  PathRunner runner;
  /// Optional progress callback (cells done, paths done, total paths).
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Runs every (eps, path) job on a worker pool, reduces cells in a
/// deterministic order, fits rates and writes sweep.csv, sweep.json and
/// cells/<eps>_<seed>.json. A completed sweep with matching config hash is
/// loaded instead of recomputed; individual finished paths are reused too.
SweepReport run_sweep(const SweepConfig& sweep, const SweepOptions& options = {});

/// Cell statistics and rate fits from path results (pure).
void reduce_cell(CellReport& cell);
void fit_report(SweepReport& report);

void write_sweep_csv(const SweepReport& report, const std::string& path);
void write_sweep_json(const SweepReport& report, const std::string& path);
std::string sweep_csv(const SweepReport& report);
std::string sweep_json(const SweepReport& report);

struct CsvRow {
  double eps = 0.0;
  double E0_mean = 0.0;
  double E1_mean = 0.0;
};
/// Reads the eps/E0_mean/E1_mean columns of a sweep CSV.
std::vector<CsvRow> read_sweep_csv(const std::string& path);

/// Time series CSV of a single run (t, norms).
void write_run_csv(const RunResult& run, const std::string& path);
void write_coupled_csv(const CoupledResult& run, double eps, const std::string& path);

}  // namespace thinflow
