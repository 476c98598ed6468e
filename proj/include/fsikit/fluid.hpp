#pragma once

// Incompressible Navier-Stokes in ALE form on the moving fluid mesh:
// implicit Euler in time, P1-P1 with SUPG/PSPG stabilization.
//
// Boundary conditions: u = w (mesh velocity) on the interface, traction g_in
// on the inlet, do-nothing on the outlet.

#include <vector>

#include "fsikit/fem.hpp"
#include "fsikit/mesh.hpp"
#include "fsikit/newton.hpp"

namespace fsi::fluid {

/// 1 P = 0.1 Pa s = 0.1 kPa ms.
constexpr double poise_to_kpa_ms(double poise) { return 0.1 * poise; }

struct FluidParams {
  double rho = 1.0;                     // mg/mm^3
  double mu = poise_to_kpa_ms(0.035);   // kPa ms
  double dt = 0.125;                    // ms
};

struct FluidOptions {
  bool convection = true;
  bool stabilization = true;
};

class FluidProblem {
 public:
  FluidProblem(const mesh::SubMesh& sub, const FluidParams& p, const FluidOptions& opt = {});

  const mesh::SubMesh& mesh() const { return sub_; }
  const FluidParams& params() const { return p_; }
  const FluidOptions& options() const { return opt_; }
  Index num_vertices() const { return sub_.num_vertices(); }
  const std::vector<Index>& interface_vertices() const { return iface_; }

  /// Moves the mesh: current coordinates (m) and mesh velocity w (3m).
  /// Sets the interface Dirichlet values to w. Throws ElementInversion.
  void set_motion(const std::vector<Vec3>& coords, const Vec& w);
  const std::vector<Vec3>& coords() const { return coords_; }
  const Vec& mesh_velocity() const { return w_; }
  const fem::DofMap& dofs() const { return dofs_; }
  /// Scalar mass on the current mesh.
  const SparseMatrix& mass() const { return mass_; }
  const fem::Assembler& assembler() const { return asm_; }

  void assemble(const Vec& x, const Vec& u_old, const Vec3& g_in, fem::BlockSaddleSystem& sys) const;
  Vec residual(const Vec& x, const Vec& u_old, const Vec3& g_in) const;

  NewtonReport solve(Vec& x, const Vec& u_old, const Vec3& g_in, const LinearSolveFn& linear,
                     const NewtonOptions& opt) const;

  /// Pressure Laplacian, pressure mass and convection matrix with
  /// velocity u - w, on the current mesh.
  SparseMatrix pressure_laplacian() const;
  SparseMatrix convection_matrix(const Vec& x) const;

  double tau(Index e, const Vec& x) const;
  /// An outlet vertex: the pressure dof pinned in the preconditioner's Laplacian.
  Index pinned_pressure_vertex() const { return sub_.boundary_vertices(mesh::BoundaryTag::Outlet).front(); }

 private:
  template <bool kMatrix>
  void element(Index e, const Vec& x, const Vec& u_old, fem::LocalMatrix& K, fem::LocalVector& r) const;
  void add_inlet(const Vec3& g_in, Vec& r) const;

  mesh::SubMesh sub_;
  FluidParams p_;
  FluidOptions opt_;
  std::vector<Index> iface_;
  std::vector<Vec3> coords_;
  Vec w_;
  fem::DofMap dofs_;
  SparseMatrix mass_;
  fem::Assembler asm_;
  std::vector<fem::ElementGeometry> geo_;
  std::vector<std::array<Index, 3>> inlet_;
};

}  // namespace fsi::fluid
