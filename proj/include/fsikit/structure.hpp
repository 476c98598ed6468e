#pragma once

// Mixed displacement-pressure hyperelastodynamics on the reference
// configuration: Newmark-beta in time, P1-P1 with a PSPG-type least-squares
// stabilization of the momentum residual in the pressure equation.

#include <vector>

#include "fsikit/fem.hpp"
#include "fsikit/materials.hpp"
#include "fsikit/mesh.hpp"
#include "fsikit/newton.hpp"

namespace fsi::structure {

enum class Model { MooneyRivlin, Artery };

struct StructureParams {
  Model model = Model::MooneyRivlin;
  materials::MooneyRivlinParams mr;
  materials::ArteryLayerParams media{3.0, 2.3632, 0.8393, 29.0};
  materials::ArteryLayerParams adventitia{0.3, 0.562, 0.7112, 62.0};
  double rho = 1.2;     // mg/mm^3
  double kappa = 1e5;   // kPa
  double beta = 0.625;
  double gamma = 1.0;
  double dt = 0.125;    // ms
};

/// Nodal displacement, velocity and acceleration (3m each).
struct NewmarkState {
  Vec d, v, a;
  static NewmarkState zero(Index m) {
    return {Vec(3 * m, 0.0), Vec(3 * m, 0.0), Vec(3 * m, 0.0)};
  }
};

NewmarkState newmark_advance(const NewmarkState& old, const Vec& d_new, double beta, double gamma, double dt);

struct AssemblyOptions {
  /// Adds the div(F S') part of the strong residual to the stabilization.
  /// It vanishes identically for P1 and exists to check that claim.
  bool include_div_stress = false;
};

class StructureProblem {
 public:
  StructureProblem(const mesh::SubMesh& sub, const StructureParams& p);

  const mesh::SubMesh& mesh() const { return sub_; }
  const StructureParams& params() const { return p_; }
  Index num_vertices() const { return sub_.num_vertices(); }
  /// Solid ends fixed (d = 0); pressure free.
  const fem::DofMap& dofs() const { return dofs_; }
  const SparseMatrix& mass() const { return mass_; }
  const fem::Assembler& assembler() const { return asm_; }
  const materials::Material& material(Index e) const { return mat_[mat_index_[e]]; }
  double tau(Index e) const { return tau_[e]; }

  /// sys.K and sys.r for state x = [d; p], history and nodal load (3m).
  void assemble(const Vec& x, const NewmarkState& hist, const Vec& load, fem::BlockSaddleSystem& sys,
                const AssemblyOptions& opt = {}) const;
  Vec residual(const Vec& x, const NewmarkState& hist, const Vec& load, const AssemblyOptions& opt = {}) const;

  /// Newton solve for one time step; x is the initial guess and the result.
  NewtonReport solve(Vec& x, const NewmarkState& hist, const Vec& load, const LinearSolveFn& linear,
                     const NewtonOptions& opt) const;

  /// Discrete pressure-equation residual scaled by kappa, relative to |M p|:
  /// |kappa R2(x)| / |M p|. It measures how well p = -kappa (J - 1) holds in
  /// the weak, stabilized sense.
  double constraint_residual(const Vec& x, const NewmarkState& hist) const;
  /// Pointwise L2 norm |p + kappa (J - 1)| / |p| (J elementwise constant).
  double constraint_l2(const Vec& x) const;

 private:
  template <bool kMatrix>
  void element(Index e, const Vec& x, const Vec& rs, fem::LocalMatrix& K, fem::LocalVector& r,
               const AssemblyOptions& opt) const;
  Vec newmark_rhs(const NewmarkState& hist) const;

  mesh::SubMesh sub_;
  StructureParams p_;
  fem::DofMap dofs_;
  SparseMatrix mass_;
  fem::Assembler asm_;
  std::vector<fem::ElementGeometry> geo_;
  std::vector<materials::Material> mat_;
  std::vector<Index> mat_index_;
  std::vector<double> tau_;
};

}  // namespace fsi::structure
