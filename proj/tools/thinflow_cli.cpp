// Command-line front end: single runs, coupled runs, sweeps, checks and
// rate refits.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <cmath>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "thinflow/audits.hpp"
#include "thinflow/config.hpp"
#include "thinflow/harness.hpp"

namespace fs = std::filesystem;
using namespace thinflow;

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
};

void add_common(CLI::App* app, Common& c, bool config_required) {
  auto* opt = app->add_option("--config", c.config, "Configuration file");
  if (config_required) opt->required();
  opt->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "Output directory")->capture_default_str();
  app->add_option("--seed", c.seed, "Seed (overrides the configuration)");
  app->add_option("--paths", c.paths, "Paths per sweep cell (overrides the configuration)");
}

ParsedConfig load(const Common& c) {
  ParsedConfig p = c.config.empty() ? ParsedConfig{} : load_config(c.config);
  if (c.seed) {
    p.run.seed = *c.seed;
    if (p.sweep) p.sweep->base.seed = *c.seed;
  }
  if (c.paths && p.sweep) p.sweep->paths_per_cell = *c.paths;
  return p;
}

int env_workers() {
  if (const char* w = std::getenv("THINFLOW_WORKERS")) {
    try {
      const int n = std::stoi(w);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid THINFLOW_WORKERS='" << w << "'\n";
  }
  return 0;
}

void print_sample(const char* label, const RunResult& r) {
  const auto& s = r.samples.back();
  std::printf("%s: t=%.4g steps=%llu ||v||^2=%.6g ||grad v||^2=%.6g ||theta||^2=%.6g%s%s\n",
              label, r.times.back(), static_cast<unsigned long long>(r.steps), s.v_l2, s.v_h1,
              s.theta_l2, r.blew_up ? " blew_up:" : "", r.blowup_reason.c_str());
}

int cmd_run(const Common& c) {
  const RunConfig rc = load(c).run;
  const NoiseModel noise = scale_noise_map(build_noise(rc), rc.model.eps);
  const State init = make_initial_state(rc.grid, rc.initial, rc.seed);
  const RunResult run =
      integrate(init, rc.model, noise, rc.physics, rc.stepper, BrownianDriver(rc.seed, rc.stepper.dt));
  fs::create_directories(c.out);
  write_run_csv(run, (fs::path(c.out) / "run.csv").string());
  print_sample(to_string(rc.model.kind).c_str(), run);
  if (rc.stepper.record_energy) {
    const auto e = energy_residual(run.energy);
    std::printf("energy residual: max violation %.3e (5 dt = %.3e)\n", e.max_violation,
                5.0 * rc.stepper.dt);
  }
  return run.blew_up ? 2 : 0;
}

int cmd_couple(const Common& c, const std::string& partner) {
  const RunConfig rc = load(c).run;
  ModelVariant a = rc.model, b = rc.model;
  b.kind = model_kind_from_string(partner);
  const NoiseModel noise = scale_noise_map(build_noise(rc), rc.model.eps);
  const State init = make_initial_state(rc.grid, rc.initial, rc.seed);
  const CoupledResult run = integrate_coupled(init, a, b, noise, rc.physics, rc.stepper,
                                              BrownianDriver(rc.seed, rc.stepper.dt));
  fs::create_directories(c.out);
  write_coupled_csv(run, rc.model.eps, (fs::path(c.out) / "couple.csv").string());
  const Window w{0.0, rc.stepper.t_end};
  std::printf("%s vs %s eps=%g: E0=%.6e E1=%.6e%s\n", to_string(a.kind).c_str(),
              to_string(b.kind).c_str(), rc.model.eps,
              compute_E0(run.times, run.diff, rc.model.eps, w),
              compute_E1(run.times, run.diff, rc.model.eps, w, run.blew_up),
              run.blew_up ? " (blew up)" : "");
  return 0;
}

int cmd_sweep(const Common& c) {
  const ParsedConfig p = load(c);
  if (!p.sweep) throw std::invalid_argument("sweep: configuration has no [sweep] section");
  SweepOptions opt;
  opt.out_dir = c.out;
  opt.workers = env_workers();
  opt.progress = [](std::size_t done, std::size_t total) {
    std::fprintf(stderr, "\r%zu/%zu paths", done, total);
    if (done == total) std::fprintf(stderr, "\n");
  };
  const SweepReport r = run_sweep(*p.sweep, opt);
  std::cout << sweep_csv(r);
  if (r.resumed) std::printf("(outputs up to date, config hash %s)\n", r.config_hash.c_str());
  if (r.fit_E0) std::printf("E0 slope %.3f +- %.3f (r2 %.3f)\n", r.fit_E0->slope, r.fit_E0->slope_ci, r.fit_E0->r2);
  if (r.fit_E1) std::printf("E1 slope %.3f +- %.3f (r2 %.3f)\n", r.fit_E1->slope, r.fit_E1->slope_ci, r.fit_E1->r2);
  if (!r.fit_note.empty()) std::printf("%s\n", r.fit_note.c_str());
  return 0;
}

int cmd_check(const Common& c, bool full) {
  const RunConfig rc = load(c).run;
  int failures = 0;
  for (const auto& r : run_check_suite(rc, !full)) {
    std::printf("%-40s %s value=%.3e tol=%.1e\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                r.value, r.tolerance);
    failures += r.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}

int cmd_rates(const std::string& csv) {
  const auto rows = read_sweep_csv(csv);
  std::vector<std::pair<double, double>> e0, e1;
  for (const auto& r : rows) {
    e0.emplace_back(r.eps, r.E0_mean);
    if (std::isfinite(r.E1_mean)) e1.emplace_back(r.eps, r.E1_mean);
  }
  auto report = [](const char* name, const std::vector<std::pair<double, double>>& pts) {
    try {
      const RateFit f = fit_rate(pts);
      std::printf("%s slope %.4f +- %.4f (95%%), r2 %.4f, %zu points\n", name, f.slope,
                  f.slope_ci, f.r2, pts.size());
    } catch (const std::invalid_argument& e) {
      std::printf("%s slope undefined: %s\n", name, e.what());
    }
  };
  report("E0", e0);
  report("E1", e1);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thinflow: stochastic thin-domain Navier-Stokes / primitive equations solver"};
  app.require_subcommand(1);
  Common run_c, couple_c, sweep_c, check_c;
  std::string partner = "PE_weak";
  std::string csv;
  bool full = false;

  auto* run = app.add_subcommand("run", "Integrate one model and write <out>/run.csv");
  add_common(run, run_c, false);
  auto* couple = app.add_subcommand("couple", "Integrate model.variant and a partner on shared noise");
  add_common(couple, couple_c, false);
  couple->add_option("--partner", partner, "Second model (SNS, rSNS, PE_strong, PE_weak)")
      ->capture_default_str();
  auto* sweep = app.add_subcommand("sweep", "Convergence sweep over eps");
  add_common(sweep, sweep_c, true);
  auto* check = app.add_subcommand("check", "Invariant and audit suite");
  add_common(check, check_c, false);
  check->add_flag("--full", full, "Use the full sample sizes");
  auto* rates = app.add_subcommand("rates", "Refit convergence slopes from a sweep CSV");
  rates->add_option("csv", csv, "sweep.csv")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run_c);
    if (*couple) return cmd_couple(couple_c, partner);
    if (*sweep) return cmd_sweep(sweep_c);
    if (*check) return cmd_check(check_c, full);
    if (*rates) return cmd_rates(csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
