#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "thinflow/config.hpp"
#include "thinflow/harness.hpp"

using namespace thinflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("thinflow_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SweepConfig tiny_sweep() {
  SweepConfig s;
  s.base.grid = GridSpec{8, 8, 4};
  s.base.noise.mode_count = 2;
  s.base.noise.amplitude = 0.3;
  s.base.stepper.dt = 0.01;
  s.base.stepper.t_end = 0.05;
  s.eps_list = {0.4, 0.2, 0.1};
  s.paths_per_cell = 2;
  return s;
}

// Deterministic stand-in for the solver: E0 = 7 eps^2 exactly.
PathResult synthetic(const SweepConfig&, const PathJob& job) {
  PathResult r;
  r.seed = job.seed;
  r.E0 = 7.0 * job.eps * job.eps;
  r.E1 = 3.0 * job.eps;
  r.E14 = 1.0;
  r.blowup_time = 1.0;
  return r;
}

}  // namespace

TEST_CASE("config defaults and validation") {
  const ParsedConfig p = parse_config("");
  CHECK(p.run == RunConfig{});
  CHECK(!p.sweep);
  CHECK_NOTHROW(p.run.validate());
  try {
    parse_config("[model]\neps = -1\n");
    FAIL("negative eps accepted");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("model.eps") != std::string::npos);
  }
}

TEST_CASE("config parse errors carry the line number") {
  try {
    parse_config("seed = 3\n[grid]\nbogus = 1\n");
    FAIL("unknown key accepted");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[nowhere]\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[grid]\nnx = seven\n"), std::invalid_argument);
}

TEST_CASE("config round trip") {
  SweepConfig s = tiny_sweep();
  s.base.model.kind = ModelKind::PE_weak;
  s.base.noise.modes = {ModeSpec{1, 2, 0.5, 0.1, 0.2}, ModeSpec{0, 1, 0.25}};
  s.alpha_rule = AlphaRule::power;
  s.gamma = 0.75;
  s.model_b = ModelKind::PE_strong;
  s.base.stepper.record_energy = true;
  s.base.initial.kind = InitialKind::random_smooth;
  const std::string text = serialize(s);
  const ParsedConfig back = parse_config(text);
  REQUIRE(back.sweep);
  CHECK(*back.sweep == s);
  CHECK(serialize(*back.sweep) == text);
  CHECK(config_hash(text) == config_hash(serialize(*back.sweep)));
  CHECK(config_hash(text).size() == 16);
  CHECK(s.alpha_for(0.01) == doctest::Approx(std::pow(0.01, -0.75)));
}

TEST_CASE("sweep validation") {
  SweepConfig s = tiny_sweep();
  s.eps_list = {0.2, 0.1};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.eps_list = {0.1, 0.2, 0.05};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = tiny_sweep();
  s.model_a = ModelKind::PE_weak;
  s.model_b = ModelKind::PE_strong;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("synthetic sweep recovers the planted rate") {
  SweepConfig s = tiny_sweep();
  s.eps_list = {0.2, 0.1, 0.05, 0.025};
  SweepOptions o;
  o.runner = synthetic;
  const SweepReport r = run_sweep(s, o);
  REQUIRE(r.cells.size() == 4);
  REQUIRE(r.fit_E0);
  CHECK(std::abs(r.fit_E0->slope - 2.0) < 1e-6);
  CHECK(std::abs(r.fit_E1->slope - 1.0) < 1e-6);
  for (const auto& c : r.cells) {
    CHECK(c.n_paths == 2);
    CHECK(c.E0_se == 0.0);
    CHECK(c.paths[0].seed == path_seed(s, 0));
    CHECK(c.paths[1].seed == path_seed(s, 1));
  }
}

TEST_CASE("identical models give zero error and an undefined slope") {
  SweepConfig s = tiny_sweep();
  s.model_a = ModelKind::rSNS;
  s.model_b = ModelKind::rSNS;
  const fs::path dir = scratch("identical");
  SweepOptions o;
  o.out_dir = dir.string();
  const SweepReport r = run_sweep(s, o);
  for (const auto& c : r.cells) CHECK(c.E0_mean == 0.0);
  CHECK(!r.fit_E0);
  CHECK(r.fit_note.find("E0 slope undefined") != std::string::npos);
  const std::string csv = slurp(dir / "sweep.csv");
  CHECK(csv.find(",nan,") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("sweep output files") {
  SweepConfig s = tiny_sweep();
  const fs::path dir = scratch("files");
  SweepOptions o;
  o.out_dir = dir.string();
  o.runner = synthetic;
  const SweepReport r = run_sweep(s, o);
  const std::string csv = slurp(dir / "sweep.csv");
  std::istringstream lines(csv);
  std::string header, line;
  std::getline(lines, header);
  CHECK(header ==
        "eps,alpha_sigma,gamma,model_a,model_b,n_paths,E0_mean,E0_se,E1_mean,E1_se,"
        "blowup_frac,slope,slope_ci");
  int rows = 0;
  while (std::getline(lines, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == int(s.eps_list.size()));
  const auto parsed = read_sweep_csv((dir / "sweep.csv").string());
  REQUIRE(parsed.size() == 3);
  CHECK(parsed[1].eps == doctest::Approx(0.2));
  CHECK(parsed[1].E0_mean == doctest::Approx(0.28));

  const nlohmann::json j = nlohmann::json::parse(slurp(dir / "sweep.json"));
  CHECK(j.at("config_hash").get<std::string>() == r.config_hash);
  CHECK(j.at("cells").size() == 3);
  CHECK(j.at("metadata").contains("generated_at"));
  fs::remove_all(dir);
}

TEST_CASE("empty sweep writes a header-only CSV") {
  SweepReport empty;
  const std::string csv = sweep_csv(empty);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
}

TEST_CASE("worker count does not change results") {
  SweepConfig s = tiny_sweep();
  const fs::path d1 = scratch("w1"), d2 = scratch("w2");
  SweepOptions o1;
  o1.out_dir = d1.string();
  o1.workers = 1;
  SweepOptions o2 = o1;
  o2.out_dir = d2.string();
  o2.workers = 2;
  const SweepReport a = run_sweep(s, o1);
  const SweepReport b = run_sweep(s, o2);
  CHECK(slurp(d1 / "sweep.csv") == slurp(d2 / "sweep.csv"));
  CHECK(a.config_hash == b.config_hash);
  for (std::size_t i = 0; i < a.cells.size(); ++i) CHECK(a.cells[i].E0_mean == b.cells[i].E0_mean);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("sweeps resume from persisted results") {
  SweepConfig s = tiny_sweep();
  const fs::path dir = scratch("resume");
  std::atomic<int> calls{0};
  SweepOptions o;
  o.out_dir = dir.string();
  o.runner = [&](const SweepConfig& c, const PathJob& j) {
    ++calls;
    return synthetic(c, j);
  };
  const SweepReport first = run_sweep(s, o);
  CHECK(!first.resumed);
  CHECK(calls == 6);
  const std::string csv = slurp(dir / "sweep.csv");

  const SweepReport again = run_sweep(s, o);
  CHECK(again.resumed);
  CHECK(calls == 6);
  CHECK(slurp(dir / "sweep.csv") == csv);

  // Interrupted sweep: the summary is gone but per-path files survive.
  fs::remove(dir / "sweep.json");
  fs::remove(dir / "sweep.csv");
  const SweepReport partial = run_sweep(s, o);
  CHECK(calls == 6);
  CHECK(slurp(dir / "sweep.csv") == csv);
  CHECK(partial.cells.size() == 3);

  // A changed configuration invalidates the cache.
  s.paths_per_cell = 3;
  fs::remove_all(dir);
  run_sweep(s, o);
  CHECK(calls == 15);
  fs::remove_all(dir);
}

TEST_CASE("failed paths are recorded, not fatal") {
  SweepConfig s = tiny_sweep();
  SweepOptions o;
  o.runner = [](const SweepConfig& c, const PathJob& j) -> PathResult {
    if (j.seed == path_seed(c, 1)) throw std::runtime_error("boom");
    return synthetic(c, j);
  };
  const SweepReport r = run_sweep(s, o);
  for (const auto& c : r.cells) {
    CHECK(c.failed_paths == 1);
    CHECK(c.n_paths == 1);
  }
}
