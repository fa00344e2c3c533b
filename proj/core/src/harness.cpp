#include "thinflow/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace thinflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string eps_tag(double eps) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(num(v)); }

double from_jnum(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

std::string hash_of(const SweepConfig& s) {
  SweepConfig canonical = s;
  canonical.workers = 1;  // parallelism never changes results
  return config_hash(serialize(canonical));
}

json path_to_json(const PathResult& p, const PathJob& job, const std::string& hash) {
  return json{{"config_hash", hash},
              {"eps", job.eps},
              {"alpha_sigma", job.alpha_sigma},
              {"seed", p.seed},
              {"E0", jnum(p.E0)},
              {"E1", jnum(p.E1)},
              {"E14", jnum(p.E14)},
              {"blew_up", p.blew_up},
              {"blowup_time", jnum(p.blowup_time)},
              {"moment", {{"sup_quartic", jnum(p.moment.sup_quartic)}, {"lhs", jnum(p.moment.lhs)}}},
              {"error", p.error}};
}

std::optional<PathResult> load_path(const fs::path& file, const std::string& hash) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  try {
    json j;
    in >> j;
    if (j.at("config_hash").get<std::string>() != hash) return std::nullopt;
    PathResult p;
    p.seed = j.at("seed").get<std::uint64_t>();
    p.E0 = from_jnum(j.at("E0"));
    p.E1 = from_jnum(j.at("E1"));
    p.E14 = from_jnum(j.at("E14"));
    p.blew_up = j.at("blew_up").get<bool>();
    p.blowup_time = from_jnum(j.at("blowup_time"));
    p.moment.sup_quartic = from_jnum(j.at("moment").at("sup_quartic"));
    p.moment.lhs = from_jnum(j.at("moment").at("lhs"));
    p.error = j.at("error").get<std::string>();
    if (!p.error.empty()) return std::nullopt;  // retry failed paths
    return p;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
}

std::pair<double, double> mean_se(const std::vector<double>& xs) {
  if (xs.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  double m = 0.0;
  for (double x : xs) m += x;
  m /= double(xs.size());
  if (xs.size() < 2) return {m, 0.0};
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= double(xs.size() - 1);
  return {m, std::sqrt(v / double(xs.size()))};
}

std::optional<SweepReport> load_report(const fs::path& dir, const SweepConfig& sweep,
                                       const std::string& hash) {
  std::ifstream in(dir / "sweep.json");
  if (!in || !fs::exists(dir / "sweep.csv")) return std::nullopt;
  try {
    json j;
    in >> j;
    if (j.at("config_hash").get<std::string>() != hash) return std::nullopt;
    SweepReport r;
    r.config = sweep;
    r.config_hash = hash;
    r.resumed = true;
    for (const auto& c : j.at("cells")) {
      CellReport cell;
      cell.eps = c.at("eps").get<double>();
      cell.alpha_sigma = c.at("alpha_sigma").get<double>();
      cell.gamma = c.at("gamma").get<double>();
      cell.model_a = model_kind_from_string(c.at("model_a").get<std::string>());
      cell.model_b = model_kind_from_string(c.at("model_b").get<std::string>());
      cell.n_paths = c.at("n_paths").get<std::size_t>();
      cell.E0_mean = from_jnum(c.at("E0_mean"));
      cell.E0_se = from_jnum(c.at("E0_se"));
      cell.E1_mean = from_jnum(c.at("E1_mean"));
      cell.E1_se = from_jnum(c.at("E1_se"));
      cell.blowup_frac = from_jnum(c.at("blowup_frac"));
      cell.failed_paths = c.at("failed_paths").get<std::size_t>();
      for (const auto& p : c.at("paths")) {
        PathResult pr;
        pr.seed = p.at("seed").get<std::uint64_t>();
        pr.E0 = from_jnum(p.at("E0"));
        pr.E1 = from_jnum(p.at("E1"));
        pr.E14 = from_jnum(p.at("E14"));
        pr.blew_up = p.at("blew_up").get<bool>();
        pr.blowup_time = from_jnum(p.at("blowup_time"));
        pr.moment.sup_quartic = from_jnum(p.at("moment").at("sup_quartic"));
        pr.moment.lhs = from_jnum(p.at("moment").at("lhs"));
        pr.error = p.at("error").get<std::string>();
        cell.paths.push_back(pr);
      }
      r.cells.push_back(std::move(cell));
    }
    fit_report(r);
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::uint64_t path_seed(const SweepConfig& s, int path) {
  return s.base.seed + std::uint64_t(path);
}

PathResult run_path(const SweepConfig& s, const PathJob& job) {
  PathResult out;
  out.seed = job.seed;
  RunConfig rc = s.base;
  rc.model.eps = job.eps;
  rc.model.alpha_sigma = job.alpha_sigma;
  ModelVariant a = rc.model, b = rc.model;
  a.kind = s.model_a;
  b.kind = s.model_b;
  const NoiseModel noise = scale_noise_map(build_noise(rc), job.eps);
  // Initial data is shared by every path and every eps.
  const State init = make_initial_state(rc.grid, rc.initial, rc.seed);
  const BrownianDriver driver(job.seed, rc.stepper.dt);
  const CoupledResult run =
      integrate_coupled(init, a, b, noise, rc.physics, rc.stepper, driver);
  const Window window{0.0, rc.stepper.t_end};
  out.E0 = compute_E0(run.times, run.diff, job.eps, window);
  out.E1 = compute_E1(run.times, run.diff, job.eps, window, run.blew_up);
  const RunResult& ns = a.is_ns() ? run.a : run.b;
  const RunResult& ref = a.is_ns() ? run.b : run.a;
  out.E14 = compute_E14(ref.times, ref.samples, window);
  out.blew_up = ns.blew_up;
  out.blowup_time = ns.blew_up ? ns.blowup_time : rc.stepper.t_end;
  out.moment = moment_path(ns, job.eps);
  return out;
}

void reduce_cell(CellReport& cell) {
  std::vector<double> e0, e1;
  std::size_t blown = 0;
  cell.failed_paths = 0;
  for (const auto& p : cell.paths) {
    if (!p.error.empty()) {
      ++cell.failed_paths;
      continue;
    }
    e0.push_back(p.E0);
    if (std::isfinite(p.E1)) e1.push_back(p.E1);
    if (p.blew_up) ++blown;
  }
  cell.n_paths = e0.size();
  std::tie(cell.E0_mean, cell.E0_se) = mean_se(e0);
  std::tie(cell.E1_mean, cell.E1_se) = mean_se(e1);
  cell.blowup_frac = cell.n_paths ? double(blown) / double(cell.n_paths)
                                  : std::numeric_limits<double>::quiet_NaN();
}

void fit_report(SweepReport& report) {
  std::vector<std::pair<double, double>> p0, p1;
  for (const auto& c : report.cells) {
    if (c.n_paths == 0) continue;
    p0.emplace_back(c.eps, c.E0_mean);
    if (std::isfinite(c.E1_mean)) p1.emplace_back(c.eps, c.E1_mean);
  }
  report.fit_E0.reset();
  report.fit_E1.reset();
  std::string note;
  try {
    report.fit_E0 = fit_rate(p0);
  } catch (const std::invalid_argument& e) {
    note += std::string("E0 slope undefined: ") + e.what() + ". ";
  }
  try {
    report.fit_E1 = fit_rate(p1);
  } catch (const std::invalid_argument& e) {
    note += std::string("E1 slope undefined: ") + e.what() + ".";
  }
  report.fit_note = note;
}

SweepReport run_sweep(const SweepConfig& sweep, const SweepOptions& options) {
  sweep.validate();
  const std::string hash = hash_of(sweep);
  const bool persist = !options.out_dir.empty();
  const fs::path dir = options.out_dir;
  if (persist) {
    if (auto done = load_report(dir, sweep, hash)) return *done;
    fs::create_directories(dir / "cells");
  }

  SweepReport report;
  report.config = sweep;
  report.config_hash = hash;
  std::vector<PathJob> jobs;
  for (std::size_t c = 0; c < sweep.eps_list.size(); ++c) {
    CellReport cell;
    cell.eps = sweep.eps_list[c];
    cell.alpha_sigma = sweep.alpha_for(cell.eps);
    cell.gamma = sweep.reported_gamma();
    cell.model_a = sweep.model_a;
    cell.model_b = sweep.model_b;
    cell.paths.resize(std::size_t(sweep.paths_per_cell));
    report.cells.push_back(std::move(cell));
    for (int p = 0; p < sweep.paths_per_cell; ++p) {
      jobs.push_back({c, sweep.eps_list[c], sweep.alpha_for(sweep.eps_list[c]),
                      path_seed(sweep, p)});
    }
  }

  const PathRunner runner = options.runner ? options.runner : PathRunner(run_path);
  std::atomic<std::size_t> next{0}, done{0};
  std::mutex writer;
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const PathJob& job = jobs[i];
      const std::size_t slot = i % std::size_t(sweep.paths_per_cell);
      const fs::path file =
          dir / "cells" / (eps_tag(job.eps) + "_" + std::to_string(job.seed) + ".json");
      std::optional<PathResult> res = persist ? load_path(file, hash) : std::nullopt;
      if (!res) {
        try {
          res = runner(sweep, job);
        } catch (const std::exception& e) {
          res = PathResult{};
          res->seed = job.seed;
          res->error = e.what();
        }
        if (persist) {
          const std::string text = path_to_json(*res, job, hash).dump(2) + "\n";
          std::lock_guard lock(writer);
          write_text(file, text);
        }
      }
      report.cells[job.cell].paths[slot] = *res;
      const std::size_t d = ++done;
      if (options.progress) {
        std::lock_guard lock(writer);
        options.progress(d, jobs.size());
      }
    }
  };
  const int workers = std::max(1, options.workers > 0 ? options.workers : sweep.workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (auto& cell : report.cells) reduce_cell(cell);
  fit_report(report);
  if (persist) {
    write_sweep_csv(report, (dir / "sweep.csv").string());
    write_sweep_json(report, (dir / "sweep.json").string());
  }
  return report;
}

std::string sweep_csv(const SweepReport& report) {
  std::ostringstream o;
  o << "eps,alpha_sigma,gamma,model_a,model_b,n_paths,E0_mean,E0_se,E1_mean,E1_se,"
       "blowup_frac,slope,slope_ci\n";
  const double slope = report.fit_E0 ? report.fit_E0->slope : std::nan("");
  const double ci = report.fit_E0 ? report.fit_E0->slope_ci : std::nan("");
  for (const auto& c : report.cells) {
    o << num(c.eps) << ',' << num(c.alpha_sigma) << ',' << num(c.gamma) << ','
      << to_string(c.model_a) << ',' << to_string(c.model_b) << ',' << c.n_paths << ','
      << num(c.E0_mean) << ',' << num(c.E0_se) << ',' << num(c.E1_mean) << ','
      << num(c.E1_se) << ',' << num(c.blowup_frac) << ',' << num(slope) << ',' << num(ci)
      << '\n';
  }
  return o.str();
}

std::string sweep_json(const SweepReport& report) {
  auto fit_json = [](const std::optional<RateFit>& f) {
    if (!f) return json(nullptr);
    return json{{"slope", f->slope},
                {"slope_ci", f->slope_ci},
                {"slope_se", f->slope_se},
                {"intercept", f->intercept},
                {"r2", f->r2}};
  };
  json cells = json::array();
  for (const auto& c : report.cells) {
    json paths = json::array();
    for (const auto& p : c.paths) {
      paths.push_back(path_to_json(p, PathJob{0, c.eps, c.alpha_sigma, p.seed}, report.config_hash));
    }
    cells.push_back({{"eps", c.eps},
                     {"alpha_sigma", c.alpha_sigma},
                     {"gamma", c.gamma},
                     {"model_a", to_string(c.model_a)},
                     {"model_b", to_string(c.model_b)},
                     {"n_paths", c.n_paths},
                     {"E0_mean", jnum(c.E0_mean)},
                     {"E0_se", jnum(c.E0_se)},
                     {"E1_mean", jnum(c.E1_mean)},
                     {"E1_se", jnum(c.E1_se)},
                     {"blowup_frac", jnum(c.blowup_frac)},
                     {"failed_paths", c.failed_paths},
                     {"paths", paths}});
  }
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  json j{{"config_hash", report.config_hash},
         {"config", serialize(report.config)},
         {"metadata", {{"generated_at", stamp}}},
         {"slope_E0", fit_json(report.fit_E0)},
         {"slope_E1", fit_json(report.fit_E1)},
         {"fit_note", report.fit_note},
         {"cells", cells}};
  return j.dump(2) + "\n";
}

void write_sweep_csv(const SweepReport& report, const std::string& path) {
  write_text(path, sweep_csv(report));
}

void write_sweep_json(const SweepReport& report, const std::string& path) {
  write_text(path, sweep_json(report));
}

std::vector<CsvRow> read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV '" + path + "'");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string h;
    while (std::getline(ss, h, ',')) header.push_back(h);
  }
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error("CSV '" + path + "' lacks column " + name);
  };
  const std::size_t ie = col("eps"), i0 = col("E0_mean"), i1 = col("E1_mean");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string x;
    while (std::getline(ss, x, ',')) f.push_back(x);
    if (f.size() != header.size()) throw std::runtime_error("malformed CSV row: " + line);
    rows.push_back({std::stod(f[ie]), std::stod(f[i0]), std::stod(f[i1])});
  }
  return rows;
}

void write_run_csv(const RunResult& run, const std::string& path) {
  std::ostringstream o;
  o << "t,v_l2,v_h1,v_h2,w_l2,w_h1,theta_l2,theta_h1\n";
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const auto& s = run.samples[i];
    o << num(run.times[i]) << ',' << num(s.v_l2) << ',' << num(s.v_h1) << ',' << num(s.v_h2)
      << ',' << num(s.w_l2) << ',' << num(s.w_h1) << ',' << num(s.theta_l2) << ','
      << num(s.theta_h1) << '\n';
  }
  write_text(path, o.str());
}

void write_coupled_csv(const CoupledResult& run, double eps, const std::string& path) {
  std::ostringstream o;
  o << "t,diff_leps2,diff_veps2,diff_theta_l2,diff_theta_h1\n";
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const auto& d = run.diff[i];
    o << num(run.times[i]) << ',' << num(d.leps2(eps)) << ',' << num(d.veps2(eps)) << ','
      << num(d.theta_l2) << ',' << num(d.theta_h1) << '\n';
  }
  write_text(path, o.str());
}

}  // namespace thinflow
