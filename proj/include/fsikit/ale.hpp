#pragma once

// Mesh motion for the fluid domain: harmonic extension of the interface
// displacement, posed on the reference fluid mesh, and the mesh update
// x = x0 + d_f.

#include <span>
#include <vector>

#include "fsikit/amg.hpp"
#include "fsikit/mesh.hpp"

namespace fsi::ale {

/// -Laplace(d) = 0 componentwise on the reference fluid mesh with Dirichlet
/// data on the interface, inlet and outlet. The matrix and its AMG are built
/// once; each solve is three CG runs to `tol`.
class HarmonicExtension {
 public:
  explicit HarmonicExtension(const mesh::SubMesh& fluid_ref, double tol = 1e-10);

  Index num_vertices() const { return m_; }
  /// Local ids of all Dirichlet vertices (interface, inlet, outlet), sorted.
  const std::vector<Index>& boundary_vertices() const { return boundary_; }
  const std::vector<Index>& interface_vertices() const { return iface_; }

  /// General form: boundary values read from `data` (3m, dof 3v+c) at the
  /// Dirichlet vertices, everything else ignored. Returns the 3m extension.
  Vec extend(std::span<const double> data) const;
  /// Interface displacement (3 per interface vertex, in interface_vertices()
  /// order), zero on inlet and outlet. Interface data wins on the rims.
  Vec extend_interface(std::span<const double> d_iface) const;

 private:
  Index m_;
  double tol_;
  std::vector<Index> boundary_, iface_;
  std::vector<char> fixed_;
  SparseMatrix lap_;  ///< full Laplacian (for the lifting)
  SparseMatrix a_;    ///< Dirichlet rows and columns eliminated
  amg::ScalarAmg amg_;
};

struct MeshQuality {
  double min_volume_ratio = 1.0;  ///< current / reference volume
  double max_volume_ratio = 1.0;
};

/// x = x0 + d. Throws ElementInversion naming the first non-positive tet.
std::vector<Vec3> move_mesh(std::span<const Vec3> reference, const std::vector<std::array<Index, 4>>& tets,
                            std::span<const double> d, MeshQuality* quality = nullptr);

}  // namespace fsi::ale
