// fsikit: command-line front end.
//
//   fsikit run   --config <file> [--out <dir>]
//   fsikit mesh  --config <file> --out <file>
//   fsikit check --config <file>

#include <CLI11.hpp>
#include <iostream>

#include "fsikit/config.hpp"
#include "fsikit/output.hpp"

using namespace fsi;

int main(int argc, char** argv) {
  CLI::App app{"Partitioned FSI simulator for a pressurized elastic tube"};
  app.require_subcommand(1);

  std::string config_path, out;
  auto* run = app.add_subcommand("run", "run the coupled simulation");
  run->add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory (default: config output_dir, then $FSIKIT_OUT)");

  auto* mesh_cmd = app.add_subcommand("mesh", "generate the tube mesh only");
  mesh_cmd->add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  mesh_cmd->add_option("--out", out, "mesh file")->required();

  auto* check = app.add_subcommand("check", "validate a configuration and print the resolved parameters");
  check->add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    const io::Config cfg = io::load_config(config_path);
    if (*check) {
      std::cout << io::print_config(cfg);
      const auto m = mesh::generate_tube_mesh(io::tube_params(cfg));
      std::cout << "\n# mesh: " << m.num_vertices() << " vertices, " << m.num_tets() << " tets ("
                << mesh::fluid_submesh(m).num_tets() << " fluid, " << mesh::structure_submesh(m).num_tets()
                << " structure)\n";
    } else if (*mesh_cmd) {
      const auto m = mesh::generate_tube_mesh(io::tube_params(cfg));
      mesh::save_mesh(m, out);
      std::cout << "wrote " << out << ": " << m.num_vertices() << " vertices, " << m.num_tets() << " tets\n";
    } else {
      const auto dir = io::resolve_output_dir(out, cfg);
      const auto sum = io::run_simulation(cfg, dir, std::cout);
      std::cout << "done: " << sum.steps.size() << " steps, " << sum.snapshots << " snapshots in " << dir.string()
                << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "fsikit: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
