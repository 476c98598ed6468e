#pragma once

// Run configuration: `key = value` lines under [geometry], [fluid],
// [structure] and [solver] headers, '#' starts a comment. Units are mm, ms,
// mg and kPa, except the viscosity which is given in Poise.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fsikit/coupling.hpp"
#include "fsikit/mesh.hpp"

namespace fsi::io {

struct Config {
  // [geometry]
  double radius = 1.43;
  double length = 18.0;
  double media_thickness = 0.26;
  double adventitia_thickness = 0.13;
  int n_axial = 54;
  int n_circ = 24;
  int n_radial_fluid = 2;
  int n_radial_layer = 1;

  // [fluid]
  double rho_f = 1.0;
  double mu_poise = 0.035;
  double inlet_traction = 1.332;  // kPa, along +z
  double pulse_duration = 1.0;    // ms

  // [structure]
  structure::Model model = structure::Model::MooneyRivlin;
  double c10 = 3.0, c01 = 0.3;
  double media_c10 = 3.0, media_k1 = 2.3632, media_k2 = 0.8393, media_alpha = 29.0;
  double adventitia_c10 = 0.3, adventitia_k1 = 0.562, adventitia_k2 = 0.7112, adventitia_alpha = 62.0;
  double kappa = 1e5;
  double rho_s = 1.2;
  double beta = 0.625;
  double gamma = 1.0;

  // [solver]
  coupling::LinearSolverKind fluid_solver = coupling::LinearSolverKind::Amg;
  coupling::LinearSolverKind structure_solver = coupling::LinearSolverKind::Amg;
  int fluid_smoothing_steps = 8;
  int structure_smoothing_steps = 12;
  double vanka_omega = 0.78;
  double theta = 6.0;
  int max_linear = 200;
  ToleranceMode tolerance_mode = ToleranceMode::Fixed;
  NewtonNorm newton_norm = NewtonNorm::Relative;
  double eps_dn = 1e-8;
  double eps_newton = 1e-8;
  double eps_linear = 1e-8;
  double omega0 = 0.5;
  int max_dn = 100;
  int max_newton = 25;
  double dt = 0.125;
  int n_steps = 8;
  int output_every = 1;
  std::string output_dir;

  bool operator==(const Config&) const = default;

  double mu() const { return fluid::poise_to_kpa_ms(mu_poise); }
};

/// Benchmark defaults for a structure model (pulse length and Vanka
/// relaxation differ between the two).
Config benchmark_config(structure::Model model);

/// Throws ConfigError naming the key and line on any problem.
Config parse_config(std::istream& is);
Config load_config(const std::filesystem::path& path);
/// Every key with its resolved value; parse_config(print_config(c)) == c.
std::string print_config(const Config& c);

mesh::TubeParams tube_params(const Config& c);
fluid::FluidParams fluid_params(const Config& c);
structure::StructureParams structure_params(const Config& c);
coupling::InletPulse inlet_pulse(const Config& c);
coupling::SolverSettings solver_settings(const Config& c);
coupling::CouplingOptions coupling_options(const Config& c);

}  // namespace fsi::io
