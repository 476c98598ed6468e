#pragma once

// Legacy ASCII VTK snapshots, CSV convergence logs and the simulation driver
// behind `fsikit run`.

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fsikit/config.hpp"
#include "fsikit/coupling.hpp"

namespace fsi::io {

struct PointField {
  std::string name;
  int components = 1;  ///< 1 or 3
  Vec values;          ///< components * num_points
};

void write_vtk(std::ostream& os, std::span<const Vec3> points, std::span<const std::array<Index, 4>> tets,
               std::span<const PointField> fields, const std::string& title = "fsikit");
void write_vtk(const std::filesystem::path& path, std::span<const Vec3> points,
               std::span<const std::array<Index, 4>> tets, std::span<const PointField> fields,
               const std::string& title = "fsikit");

/// The subset of legacy VTK that write_vtk produces.
struct VtkData {
  std::vector<Vec3> points;
  std::vector<std::array<Index, 4>> tets;
  std::vector<int> cell_types;
  std::vector<PointField> fields;
  const PointField* field(const std::string& name) const;
};
VtkData read_vtk(std::istream& is);
VtkData read_vtk(const std::filesystem::path& path);

/// Whole-domain snapshot on the reference mesh: velocity and fluid_pressure
/// on fluid vertices, displacement everywhere (mesh displacement in the
/// fluid), solid_pressure on structure vertices. Zero where not defined.
std::vector<PointField> snapshot_fields(const mesh::Mesh& mesh, const coupling::FsiSolver& s);

inline constexpr const char* kDnLogHeader = "step,dn_iter,interface_residual,aitken_omega";
inline constexpr const char* kNewtonLogHeader = "step,dn_iter,field,newton_iter,outer_norm,inner_tol,inner_iters";

/// dn_log.csv and newton_log.csv in a directory; rows are flushed per step.
class RunLog {
 public:
  explicit RunLog(const std::filesystem::path& dir);
  void append(const coupling::StepReport& rep);
  void flush();

 private:
  std::ofstream dn_, newton_;
};

/// Output directory: explicit argument, else config output_dir, else
/// $FSIKIT_OUT, else ./fsikit_out.
std::filesystem::path resolve_output_dir(const std::string& cli_out, const Config& c);

struct RunSummary {
  std::vector<coupling::StepReport> steps;
  int snapshots = 0;
};

/// Generates the mesh, runs n_steps and writes step_NNNN.vtk (every
/// output_every steps) plus the CSV logs into `out`. Progress lines go to
/// `progress`. On failure logs are flushed and the error propagates.
RunSummary run_simulation(const Config& c, const std::filesystem::path& out, std::ostream& progress);

}  // namespace fsi::io
