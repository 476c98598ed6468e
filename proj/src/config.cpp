#include "fsikit/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace fsi::io {

namespace {

enum class Only { Any, MooneyRivlin, Artery };

struct Key {
  const char* section;
  const char* name;
  Only only;
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
  /// Empty if the value is acceptable.
  std::function<std::string(const Config&)> check;
};

// Shortest representation that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("'" + s + "' is not a finite number");
  return v;
}

int to_int(const std::string& s) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("'" + s + "' is not an integer");
  return v;
}

template <class E>
E to_enum(const std::string& s, std::initializer_list<std::pair<const char*, E>> names) {
  std::string all;
  for (const auto& [n, e] : names) {
    if (s == n) return e;
    all += all.empty() ? n : std::string(", ") + n;
  }
  throw ConfigError("'" + s + "' is not one of " + all);
}

template <class E>
std::string from_enum(E v, std::initializer_list<std::pair<const char*, E>> names) {
  for (const auto& [n, e] : names)
    if (e == v) return n;
  return "?";
}

const std::initializer_list<std::pair<const char*, structure::Model>> kModels = {
    {"mooney_rivlin", structure::Model::MooneyRivlin}, {"artery", structure::Model::Artery}};
const std::initializer_list<std::pair<const char*, coupling::LinearSolverKind>> kSolvers = {
    {"amg", coupling::LinearSolverKind::Amg},
    {"krylov", coupling::LinearSolverKind::Krylov},
    {"direct", coupling::LinearSolverKind::Direct}};
const std::initializer_list<std::pair<const char*, ToleranceMode>> kModes = {{"fixed", ToleranceMode::Fixed},
                                                                             {"adaptive", ToleranceMode::Adaptive}};
const std::initializer_list<std::pair<const char*, NewtonNorm>> kNorms = {{"relative", NewtonNorm::Relative},
                                                                          {"absolute", NewtonNorm::Absolute}};

std::string positive(double v) { return v > 0.0 ? "" : "must be positive"; }
std::string positive(int v) { return v > 0 ? "" : "must be positive"; }

#define FSI_REAL(sec, key, only, check)                                                        \
  Key {                                                                                        \
    sec, #key, only, [](Config& c, const std::string& s) { c.key = to_double(s); },            \
        [](const Config& c) { return fmt(c.key); }, [](const Config& c) { return check(c.key); } \
  }
#define FSI_INT(sec, key, only, check)                                                         \
  Key {                                                                                        \
    sec, #key, only, [](Config& c, const std::string& s) { c.key = to_int(s); },               \
        [](const Config& c) { return std::to_string(c.key); },                                 \
        [](const Config& c) { return check(c.key); }                                           \
  }
#define FSI_ENUM(sec, key, table)                                                                  \
  Key {                                                                                            \
    sec, #key, Only::Any, [](Config& c, const std::string& s) { c.key = to_enum(s, table); },      \
        [](const Config& c) { return from_enum(c.key, table); }, [](const Config&) { return std::string(); } \
  }

std::string any(double) { return ""; }
std::string unit_interval_open(double v) { return v > 0.0 && v < 1.0 ? "" : "must lie in (0, 1)"; }
std::string angle(double v) { return v >= 0.0 && v <= 90.0 ? "" : "must lie in [0, 90] degrees"; }
std::string nonnegative(double v) { return v >= 0.0 ? "" : "must be non-negative"; }
std::string at_least_3(int v) { return v >= 3 ? "" : "must be at least 3"; }

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      FSI_REAL("geometry", radius, Only::Any, positive),
      FSI_REAL("geometry", length, Only::Any, positive),
      FSI_REAL("geometry", media_thickness, Only::Any, positive),
      FSI_REAL("geometry", adventitia_thickness, Only::Any, positive),
      FSI_INT("geometry", n_axial, Only::Any, positive),
      FSI_INT("geometry", n_circ, Only::Any, at_least_3),
      FSI_INT("geometry", n_radial_fluid, Only::Any, positive),
      FSI_INT("geometry", n_radial_layer, Only::Any, positive),

      FSI_REAL("fluid", rho_f, Only::Any, positive),
      FSI_REAL("fluid", mu_poise, Only::Any, positive),
      FSI_REAL("fluid", inlet_traction, Only::Any, any),
      FSI_REAL("fluid", pulse_duration, Only::Any, nonnegative),

      FSI_ENUM("structure", model, kModels),
      FSI_REAL("structure", c10, Only::MooneyRivlin, positive),
      FSI_REAL("structure", c01, Only::MooneyRivlin, nonnegative),
      FSI_REAL("structure", media_c10, Only::Artery, positive),
      FSI_REAL("structure", media_k1, Only::Artery, positive),
      FSI_REAL("structure", media_k2, Only::Artery, positive),
      FSI_REAL("structure", media_alpha, Only::Artery, angle),
      FSI_REAL("structure", adventitia_c10, Only::Artery, positive),
      FSI_REAL("structure", adventitia_k1, Only::Artery, positive),
      FSI_REAL("structure", adventitia_k2, Only::Artery, positive),
      FSI_REAL("structure", adventitia_alpha, Only::Artery, angle),
      FSI_REAL("structure", kappa, Only::Any, positive),
      FSI_REAL("structure", rho_s, Only::Any, positive),
      FSI_REAL("structure", beta, Only::Any, positive),
      FSI_REAL("structure", gamma, Only::Any, positive),

      FSI_ENUM("solver", fluid_solver, kSolvers),
      FSI_ENUM("solver", structure_solver, kSolvers),
      FSI_INT("solver", fluid_smoothing_steps, Only::Any, positive),
      FSI_INT("solver", structure_smoothing_steps, Only::Any, positive),
      FSI_REAL("solver", vanka_omega, Only::Any, positive),
      FSI_REAL("solver", theta, Only::Any, positive),
      FSI_INT("solver", max_linear, Only::Any, positive),
      FSI_ENUM("solver", tolerance_mode, kModes),
      FSI_ENUM("solver", newton_norm, kNorms),
      FSI_REAL("solver", eps_dn, Only::Any, positive),
      FSI_REAL("solver", eps_newton, Only::Any, positive),
      FSI_REAL("solver", eps_linear, Only::Any, unit_interval_open),
      FSI_REAL("solver", omega0, Only::Any, unit_interval_open),
      FSI_INT("solver", max_dn, Only::Any, positive),
      FSI_INT("solver", max_newton, Only::Any, positive),
      FSI_REAL("solver", dt, Only::Any, positive),
      FSI_INT("solver", n_steps, Only::Any, positive),
      FSI_INT("solver", output_every, Only::Any, positive),
      Key{"solver", "output_dir", Only::Any, [](Config& c, const std::string& s) { c.output_dir = s; },
          [](const Config& c) { return c.output_dir; }, [](const Config&) { return std::string(); }},
  };
  return k;
}

#undef FSI_REAL
#undef FSI_INT
#undef FSI_ENUM

const char* const kSections[] = {"geometry", "fluid", "structure", "solver"};

bool applies(Only only, structure::Model m) {
  return only == Only::Any || (only == Only::MooneyRivlin) == (m == structure::Model::MooneyRivlin);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config benchmark_config(structure::Model model) {
  Config c;
  c.model = model;
  if (model == structure::Model::Artery) {
    c.pulse_duration = 0.125;
    c.vanka_omega = 0.86;
  }
  return c;
}

Config parse_config(std::istream& is) {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry> entries;  // "section.key"
  std::map<std::string, int> sections;
  std::string section, raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError("malformed section header '" + s + "'", line);
      section = trim(s.substr(1, s.size() - 2));
      bool known = false;
      for (const char* k : kSections) known |= section == k;
      if (!known) throw ParseError("unknown section [" + section + "]", line);
      if (!sections.emplace(section, line).second) throw ParseError("duplicate section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value', got '" + s + "'", line);
    if (section.empty()) throw ParseError("key outside of a section", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string full = section + "." + key;
    bool known = false;
    for (const auto& k : keys()) known |= full == std::string(k.section) + "." + k.name;
    if (!known) throw ParseError("unknown key '" + key + "' in [" + section + "]", line);
    if (!entries.emplace(full, Entry{trim(s.substr(eq + 1)), line}).second)
      throw ParseError("duplicate key '" + key + "'", line);
  }
  for (const char* sec : kSections)
    if (!sections.count(sec)) throw ConfigError("missing [" + std::string(sec) + "]");

  // The model decides which material keys are required and allowed.
  const auto model_it = entries.find("structure.model");
  if (model_it == entries.end()) throw ConfigError("missing required key 'model' in [structure]");
  structure::Model model;
  try {
    model = to_enum(model_it->second.value, kModels);
  } catch (const ConfigError& e) {
    throw ParseError("model: " + std::string(e.what()), model_it->second.line);
  }
  Config c = benchmark_config(model);
  for (const auto& k : keys()) {
    const std::string full = std::string(k.section) + "." + k.name;
    const auto it = entries.find(full);
    const bool relevant = applies(k.only, model);
    if (it == entries.end()) {
      if (relevant && k.only != Only::Any)
        throw ConfigError("missing required key '" + std::string(k.name) + "' in [structure] for model " +
                          from_enum(model, kModels));
      continue;
    }
    if (!relevant)
      throw ParseError(std::string(k.name) + ": not a parameter of model " + from_enum(model, kModels),
                       it->second.line);
    try {
      k.set(c, it->second.value);
    } catch (const ConfigError& e) {
      throw ParseError(std::string(k.name) + ": " + e.what(), it->second.line);
    }
    if (const std::string why = k.check(c); !why.empty())
      throw ParseError(std::string(k.name) + " = " + it->second.value + ": " + why, it->second.line);
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  try {
    return parse_config(f);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string print_config(const Config& c) {
  std::ostringstream os;
  os << "# units: mm, ms, mg, kPa; viscosity in Poise\n";
  for (const char* sec : kSections) {
    os << "\n[" << sec << "]\n";
    for (const auto& k : keys())
      if (std::string(k.section) == sec && applies(k.only, c.model)) os << k.name << " = " << k.get(c) << "\n";
  }
  return os.str();
}

mesh::TubeParams tube_params(const Config& c) {
  mesh::TubeParams p;
  p.radius = c.radius;
  p.length = c.length;
  p.media_thickness = c.media_thickness;
  p.adventitia_thickness = c.adventitia_thickness;
  p.n_axial = c.n_axial;
  p.n_circ = c.n_circ;
  p.n_radial_fluid = c.n_radial_fluid;
  p.n_radial_layer = c.n_radial_layer;
  return p;
}

fluid::FluidParams fluid_params(const Config& c) { return {c.rho_f, c.mu(), c.dt}; }

structure::StructureParams structure_params(const Config& c) {
  structure::StructureParams p;
  p.model = c.model;
  p.mr = {c.c10, c.c01};
  p.media = {c.media_c10, c.media_k1, c.media_k2, c.media_alpha};
  p.adventitia = {c.adventitia_c10, c.adventitia_k1, c.adventitia_k2, c.adventitia_alpha};
  p.rho = c.rho_s;
  p.kappa = c.kappa;
  p.beta = c.beta;
  p.gamma = c.gamma;
  p.dt = c.dt;
  return p;
}

coupling::InletPulse inlet_pulse(const Config& c) { return {Vec3(0.0, 0.0, c.inlet_traction), c.pulse_duration}; }

coupling::SolverSettings solver_settings(const Config& c) {
  coupling::SolverSettings s;
  s.fluid = {c.fluid_solver, c.fluid_smoothing_steps, c.vanka_omega, c.max_linear};
  s.structure = {c.structure_solver, c.structure_smoothing_steps, c.vanka_omega, c.max_linear};
  s.theta = c.theta;
  return s;
}

coupling::CouplingOptions coupling_options(const Config& c) {
  coupling::CouplingOptions o;
  o.eps_dn = c.eps_dn;
  o.omega0 = c.omega0;
  o.max_dn = c.max_dn;
  o.newton.eps = c.eps_newton;
  o.newton.max_iter = c.max_newton;
  o.newton.norm = c.newton_norm;
  o.newton.tolerance = c.tolerance_mode;
  o.newton.eps_linear = c.eps_linear;
  return o;
}

}  // namespace fsi::io
