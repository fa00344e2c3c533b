#include "thinflow/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace thinflow {

void NoiseConfig::validate() const {
  if (!(upsilon >= 0.0) || !std::isfinite(upsilon))
    throw std::invalid_argument("noise.upsilon must be finite and >= 0");
  if (modes.empty() && mode_count < 1)
    throw std::invalid_argument("noise.mode_count must be >= 1");
  if (!std::isfinite(amplitude)) throw std::invalid_argument("noise.amplitude must be finite");
  for (const auto& m : modes) {
    if (m.kx == 0 && m.ky == 0) throw std::invalid_argument("noise.mode: zero wavevector");
  }
}

void RunConfig::validate() const {
  grid.validate();
  model.validate();
  noise.validate();
  stepper.validate();
  initial.validate();
  if (!(physics.g > 0.0)) throw std::invalid_argument("physics.g must be > 0");
  if (!(physics.rho0 > 0.0)) throw std::invalid_argument("physics.rho0 must be > 0");
}

std::string to_string(AlphaRule r) { return r == AlphaRule::fixed ? "fixed" : "power"; }

void SweepConfig::validate() const {
  base.validate();
  if (eps_list.size() < 3) throw std::invalid_argument("sweep.eps_list needs >= 3 entries");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0 && eps_list[i] <= 1.0))
      throw std::invalid_argument("sweep.eps_list entries must lie in (0,1]");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("sweep.eps_list must be strictly decreasing");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("sweep.alpha must be finite and >= 0");
  if (!std::isfinite(gamma)) throw std::invalid_argument("sweep.gamma must be finite");
  if (paths_per_cell < 1) throw std::invalid_argument("sweep.paths_per_cell must be >= 1");
  if (workers < 1) throw std::invalid_argument("sweep.workers must be >= 1");
  const ModelVariant a{model_a}, b{model_b};
  if (a.is_pe() && b.is_pe())
    throw std::invalid_argument("sweep.model_a/model_b: at least one must be SNS or rSNS");
}

double SweepConfig::alpha_for(double eps) const {
  return alpha_rule == AlphaRule::fixed ? alpha : std::pow(eps, -gamma);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Ctx {
  int line = 0;
  std::string field;
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("line " + std::to_string(line) + ": " + field + ": " + what);
  }
};

double to_double(const std::string& v, const Ctx& c) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) c.fail("expected a number, got '" + v + "'");
    return d;
  } catch (const std::logic_error&) {
    c.fail("expected a number, got '" + v + "'");
  }
}

long long to_int(const std::string& v, const Ctx& c) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) c.fail("expected an integer, got '" + v + "'");
    return i;
  } catch (const std::logic_error&) {
    c.fail("expected an integer, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& v, const Ctx& c) {
  try {
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    std::size_t pos = 0;
    const unsigned long long i = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return i;
  } catch (const std::logic_error&) {
    c.fail("expected an unsigned integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& v, const Ctx& c) {
  if (v == "true") return true;
  if (v == "false") return false;
  c.fail("expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v, const Ctx& c) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), c));
  return out;
}

template <class F>
auto translate(const Ctx& c, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    c.fail(e.what());
  }
}

using Setter = std::function<void(const std::string&, const Ctx&)>;

}  // namespace

ParsedConfig parse_config(const std::string& text) {
  ParsedConfig out;
  RunConfig& r = out.run;
  SweepConfig sw;
  bool has_sweep = false;
  bool explicit_modes = false;

  std::map<std::string, Setter> keys;
  auto num = [&](const std::string& k, double& dst) {
    keys[k] = [&dst](const std::string& v, const Ctx& c) { dst = to_double(v, c); };
  };
  auto integer = [&](const std::string& k, int& dst) {
    keys[k] = [&dst](const std::string& v, const Ctx& c) { dst = int(to_int(v, c)); };
  };
  auto boolean = [&](const std::string& k, bool& dst) {
    keys[k] = [&dst](const std::string& v, const Ctx& c) { dst = to_bool(v, c); };
  };

  keys["seed"] = [&](const std::string& v, const Ctx& c) { r.seed = to_u64(v, c); };
  integer("grid.nx", r.grid.nx);
  integer("grid.ny", r.grid.ny);
  integer("grid.nz", r.grid.nz);
  num("grid.dealias_fraction", r.grid.dealias_fraction);
  keys["model.variant"] = [&](const std::string& v, const Ctx& c) {
    r.model.kind = translate(c, [&] { return model_kind_from_string(v); });
  };
  num("model.eps", r.model.eps);
  num("model.alpha_sigma", r.model.alpha_sigma);
  boolean("model.additive_vertical_noise", r.model.additive_vertical_noise);
  boolean("model.advection", r.model.terms.advection);
  boolean("model.transport_noise", r.model.terms.transport_noise);
  keys["model.kernel.kind"] = [&](const std::string& v, const Ctx& c) {
    r.model.kernel.kind = translate(c, [&] { return kernel_kind_from_string(v); });
  };
  num("model.kernel.cutoff", r.model.kernel.cutoff);
  num("noise.upsilon", r.noise.upsilon);
  integer("noise.mode_count", r.noise.mode_count);
  num("noise.amplitude", r.noise.amplitude);
  keys["noise.mode"] = [&](const std::string& v, const Ctx& c) {
    std::stringstream ss(v);
    std::vector<std::string> parts;
    std::string p;
    while (ss >> p) parts.push_back(p);
    if (parts.size() != 3 && parts.size() != 5) c.fail("expected 'kx ky amplitude [px py]'");
    ModeSpec m;
    m.kx = int(to_int(parts[0], c));
    m.ky = int(to_int(parts[1], c));
    m.amplitude = to_double(parts[2], c);
    if (parts.size() == 5) {
      m.px = to_double(parts[3], c);
      m.py = to_double(parts[4], c);
    }
    if (!explicit_modes) r.noise.modes.clear();
    explicit_modes = true;
    r.noise.modes.push_back(m);
  };
  num("physics.rho0", r.physics.rho0);
  num("physics.g", r.physics.g);
  num("stepper.dt", r.stepper.dt);
  num("stepper.t_end", r.stepper.t_end);
  num("stepper.cfl_guard", r.stepper.cfl_guard);
  num("stepper.blowup_threshold", r.stepper.blowup_threshold);
  integer("stepper.record_stride", r.stepper.record_stride);
  boolean("stepper.record_energy", r.stepper.record_energy);
  keys["initial_condition.kind"] = [&](const std::string& v, const Ctx& c) {
    r.initial.kind = translate(c, [&] { return initial_kind_from_string(v); });
  };
  num("initial_condition.amplitude", r.initial.amplitude);
  num("initial_condition.spectrum_slope", r.initial.spectrum_slope);
  num("initial_condition.theta_amplitude", r.initial.theta_amplitude);
  keys["initial_condition.path"] = [&](const std::string& v, const Ctx&) { r.initial.path = v; };
  keys["sweep.eps_list"] = [&](const std::string& v, const Ctx& c) { sw.eps_list = to_list(v, c); };
  keys["sweep.alpha_rule"] = [&](const std::string& v, const Ctx& c) {
    if (v == "fixed") sw.alpha_rule = AlphaRule::fixed;
    else if (v == "power") sw.alpha_rule = AlphaRule::power;
    else c.fail("expected fixed or power, got '" + v + "'");
  };
  num("sweep.alpha", sw.alpha);
  num("sweep.gamma", sw.gamma);
  integer("sweep.paths_per_cell", sw.paths_per_cell);
  keys["sweep.model_a"] = [&](const std::string& v, const Ctx& c) {
    sw.model_a = translate(c, [&] { return model_kind_from_string(v); });
  };
  keys["sweep.model_b"] = [&](const std::string& v, const Ctx& c) {
    sw.model_b = translate(c, [&] { return model_kind_from_string(v); });
  };
  integer("sweep.workers", sw.workers);

  static const std::map<std::string, int> sections{
      {"", 0},      {"grid", 0},    {"model", 0},   {"model.kernel", 0},       {"noise", 0},
      {"physics", 0}, {"stepper", 0}, {"sweep", 0}, {"initial_condition", 0}};

  std::string section;
  std::stringstream in(text);
  std::string raw;
  Ctx ctx;
  while (std::getline(in, raw)) {
    ++ctx.line;
    std::string line = raw;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        ctx.field = line;
        ctx.fail("malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) {
        ctx.field = section;
        ctx.fail("unknown section");
      }
      if (section == "sweep") has_sweep = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      ctx.field = section;
      ctx.fail("expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    ctx.field = section.empty() ? key : section + "." + key;
    const auto it = keys.find(ctx.field);
    if (it == keys.end()) ctx.fail("unknown key");
    it->second(value, ctx);
  }

  if (has_sweep) {
    sw.base = r;
    sw.validate();
    out.sweep = sw;
  } else {
    r.validate();
  }
  return out;
}

ParsedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const RunConfig& c) {
  std::ostringstream o;
  auto b = [](bool v) { return v ? "true" : "false"; };
  o << "seed = " << c.seed << "\n\n";
  o << "[grid]\n"
    << "nx = " << c.grid.nx << "\nny = " << c.grid.ny << "\nnz = " << c.grid.nz
    << "\ndealias_fraction = " << fmt(c.grid.dealias_fraction) << "\n\n";
  o << "[model]\n"
    << "variant = " << to_string(c.model.kind) << "\neps = " << fmt(c.model.eps)
    << "\nalpha_sigma = " << fmt(c.model.alpha_sigma)
    << "\nadditive_vertical_noise = " << b(c.model.additive_vertical_noise)
    << "\nadvection = " << b(c.model.terms.advection)
    << "\ntransport_noise = " << b(c.model.terms.transport_noise) << "\n\n";
  o << "[model.kernel]\n"
    << "kind = " << to_string(c.model.kernel.kind) << "\ncutoff = " << fmt(c.model.kernel.cutoff)
    << "\n\n";
  o << "[noise]\n"
    << "upsilon = " << fmt(c.noise.upsilon) << "\nmode_count = " << c.noise.mode_count
    << "\namplitude = " << fmt(c.noise.amplitude) << "\n";
  for (const auto& m : c.noise.modes) {
    o << "mode = " << m.kx << ' ' << m.ky << ' ' << fmt(m.amplitude) << ' ' << fmt(m.px) << ' '
      << fmt(m.py) << "\n";
  }
  o << "\n[physics]\n"
    << "rho0 = " << fmt(c.physics.rho0) << "\ng = " << fmt(c.physics.g) << "\n\n";
  o << "[stepper]\n"
    << "dt = " << fmt(c.stepper.dt) << "\nt_end = " << fmt(c.stepper.t_end)
    << "\ncfl_guard = " << fmt(c.stepper.cfl_guard)
    << "\nblowup_threshold = " << fmt(c.stepper.blowup_threshold)
    << "\nrecord_stride = " << c.stepper.record_stride
    << "\nrecord_energy = " << b(c.stepper.record_energy) << "\n\n";
  o << "[initial_condition]\n"
    << "kind = " << to_string(c.initial.kind) << "\namplitude = " << fmt(c.initial.amplitude)
    << "\nspectrum_slope = " << fmt(c.initial.spectrum_slope)
    << "\ntheta_amplitude = " << fmt(c.initial.theta_amplitude) << "\n";
  if (!c.initial.path.empty()) o << "path = \"" << c.initial.path << "\"\n";
  return o.str();
}

std::string serialize(const SweepConfig& c) {
  std::ostringstream o;
  o << serialize(c.base) << "\n[sweep]\neps_list = ";
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) o << (i ? ", " : "") << fmt(c.eps_list[i]);
  o << "\nalpha_rule = " << to_string(c.alpha_rule) << "\nalpha = " << fmt(c.alpha)
    << "\ngamma = " << fmt(c.gamma) << "\npaths_per_cell = " << c.paths_per_cell
    << "\nmodel_a = " << to_string(c.model_a) << "\nmodel_b = " << to_string(c.model_b)
    << "\nworkers = " << c.workers << "\n";
  return o.str();
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

NoiseModel build_noise(const RunConfig& c) {
  const auto specs =
      c.noise.modes.empty() ? default_mode_specs(c.noise.mode_count, c.noise.amplitude)
                            : c.noise.modes;
  return build_2d_divfree_modes(c.grid, specs, c.noise.upsilon, c.model.alpha_sigma);
}

}  // namespace thinflow
