#include "thinflow/initial_conditions.hpp"

#include <cmath>
#include <fstream>
#include "json.hpp"
#include <numbers>
#include <stdexcept>

#include "thinflow/norms.hpp"
#include "thinflow/operators.hpp"
#include "thinflow/projectors.hpp"
#include "thinflow/transform.hpp"

namespace thinflow {

std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::taylor_green_like: return "taylor_green_like";
    case InitialKind::random_smooth: return "random_smooth";
    case InitialKind::file: return "file";
  }
  return "unknown";
}

InitialKind initial_kind_from_string(const std::string& s) {
  if (s == "taylor_green_like") return InitialKind::taylor_green_like;
  if (s == "random_smooth") return InitialKind::random_smooth;
  if (s == "file") return InitialKind::file;
  throw std::invalid_argument("initial_condition.kind: unknown value '" + s + "'");
}

void InitialConditionSpec::validate() const {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw std::invalid_argument("initial_condition.amplitude must be finite and >= 0");
  if (!(theta_amplitude >= 0.0) || !std::isfinite(theta_amplitude))
    throw std::invalid_argument("initial_condition.theta_amplitude must be finite and >= 0");
  if (!(spectrum_slope > 0.0) || !std::isfinite(spectrum_slope))
    throw std::invalid_argument("initial_condition.spectrum_slope must be > 0");
  if (kind == InitialKind::file && path.empty())
    throw std::invalid_argument("initial_condition.path is required for kind = file");
}

namespace {

// Rescale so that ||f||^2 / |domain| = target^2.
void scale_rms(SpectralField& f, double target) {
  const double rms = std::sqrt(norm_squared(f, NormKind::L2()) / GridSpec::volume());
  if (rms > 0.0) f *= target / rms;
}

State finish(SpectralField v, SpectralField theta) {
  dealias_in_place(v);
  project_P_in_place(v);
  dealias_in_place(theta);
  remove_mean_in_place(theta);
  return State{std::move(v), std::move(theta), 0.0};
}

State taylor_green(const GridSpec& g, const InitialConditionSpec& spec) {
  using std::cos;
  using std::sin;
  constexpr double pi = std::numbers::pi;
  const double a = spec.amplitude;
  const double b = spec.theta_amplitude;
  PhysicalField v(g, 2), th(g, 1);
  v.fill(0, [a](double x, double y, double z) {
    return a * (cos(x) * sin(y) + 0.5 * sin(x) * cos(pi * z));
  });
  v.fill(1, [a](double x, double y, double z) {
    return a * (-sin(x) * cos(y) + 0.5 * sin(y) * cos(pi * z));
  });
  th.fill(0, [b](double x, double, double z) { return b * cos(x) * sin(pi * z); });
  return finish(to_spectral(v), to_spectral(th));
}

State random_state(const GridSpec& g, const InitialConditionSpec& spec, std::uint64_t seed) {
  SpectralField v = random_smooth_field(g, 2, seed, spec.spectrum_slope);
  project_P_in_place(v);
  scale_rms(v, spec.amplitude);
  SpectralField th = random_smooth_field(g, 1, seed ^ 0x9e3779b97f4a7c15ULL, spec.spectrum_slope);
  remove_mean_in_place(th);
  scale_rms(th, spec.theta_amplitude);
  return finish(std::move(v), std::move(th));
}

State from_file(const GridSpec& g, const InitialConditionSpec& spec) {
  std::ifstream in(spec.path);
  if (!in) throw std::runtime_error("initial_condition.path: cannot open '" + spec.path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("initial_condition.path: invalid JSON: " + std::string(e.what()));
  }
  if (j.at("nx").get<int>() != g.nx || j.at("ny").get<int>() != g.ny ||
      j.at("nz").get<int>() != g.nz) {
    throw std::invalid_argument("initial_condition.path: grid does not match " + g.describe());
  }
  auto load = [&](const char* key, PhysicalField& f, int c) {
    const auto arr = j.at(key).get<std::vector<double>>();
    if (arr.size() != g.physical_size())
      throw std::invalid_argument(std::string("initial_condition.path: '") + key +
                                  "' has wrong length");
    std::copy(arr.begin(), arr.end(), f.comp(c));
  };
  PhysicalField v(g, 2), th(g, 1);
  load("vx", v, 0);
  load("vy", v, 1);
  load("theta", th, 0);
  return finish(to_spectral(v), to_spectral(th));
}

}  // namespace

State make_initial_state(const GridSpec& g, const InitialConditionSpec& spec,
                         std::uint64_t seed) {
  g.validate();
  spec.validate();
  switch (spec.kind) {
    case InitialKind::taylor_green_like: return taylor_green(g, spec);
    case InitialKind::random_smooth: return random_state(g, spec, seed);
    case InitialKind::file: return from_file(g, spec);
  }
  throw std::logic_error("unreachable initial condition kind");
}

void write_state_json(const State& s, const std::string& path) {
  const GridSpec& g = s.v.grid();
  const PhysicalField v = to_physical(s.v);
  const PhysicalField th = to_physical(s.theta);
  auto vec = [&](const PhysicalField& f, int c) {
    return std::vector<double>(f.comp(c), f.comp(c) + g.physical_size());
  };
  nlohmann::json j{{"nx", g.nx},         {"ny", g.ny},         {"nz", g.nz},
                   {"time", s.time},     {"vx", vec(v, 0)},    {"vy", vec(v, 1)},
                   {"theta", vec(th, 0)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump() << '\n';
}

}  // namespace thinflow
