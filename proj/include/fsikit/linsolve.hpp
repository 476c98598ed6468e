#pragma once

// Krylov solvers (GCR, BiCGStab, CG) and the block preconditioners for the
// fluid (right, upper triangular) and structure (left, lower triangular)
// saddle systems.

#include <functional>
#include <span>
#include <vector>

#include "fsikit/amg.hpp"
#include "fsikit/newton.hpp"
#include "fsikit/sparse.hpp"

namespace fsi::linsolve {

/// z = P^{-1} r
using Preconditioner = std::function<void(std::span<const double> r, std::span<double> z)>;

struct KrylovOptions {
  double tol = 1e-8;
  int max_it = 200;
  int restart = 50;  ///< GCR only
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  std::vector<double> residuals;  ///< recurrence residual norms, first entry is the initial one
  double reduction = 0.0;         ///< final true (or preconditioned, BiCGStab) residual over the initial one
  double time_ms = 0.0;

  LinearResult result() const { return {iterations, converged, reduction}; }
};

/// Flexible GCR with right preconditioning and restarts. Stops when
/// |b - K x| <= tol |b|. On failure x is the last (and smallest-residual) iterate.
SolveReport gcr(const SparseMatrix& K, std::span<const double> b, std::span<double> x, const Preconditioner& prec,
                const KrylovOptions& opt);

/// BiCGStab on the left-preconditioned system P^{-1} K x = P^{-1} b. The
/// tolerance applies to the preconditioned residual. A breakdown restarts
/// with the current residual as shadow vector; a second breakdown without
/// progress is reported as failure with the best iterate.
SolveReport bicgstab(const SparseMatrix& K, std::span<const double> b, std::span<double> x, const Preconditioner& prec,
                     const KrylovOptions& opt);

/// Preconditioned conjugate gradients for SPD systems.
SolveReport pcg(const SparseMatrix& A, std::span<const double> b, std::span<double> x, const Preconditioner& prec,
                const KrylovOptions& opt);

struct FluidPreconditionerData {
  const SparseMatrix* K = nullptr;   ///< Jacobian with Dirichlet rows eliminated
  Index m = 0;
  const SparseMatrix* laplacian = nullptr;  ///< pressure Laplacian (Neumann)
  const SparseMatrix* mass = nullptr;       ///< pressure mass
  const SparseMatrix* convection = nullptr; ///< pressure convection with u - w
  Index pinned = 0;                         ///< pressure dof pinned in the Laplacian
  double rho = 1.0, dt = 1.0, mu = 1.0;
};

/// P_R^{-1} = [At^{-1}, At^{-1} B1^T S^{-1}; 0, -S^{-1}] with
/// S^{-1} = rho/dt Dp^{-1} + mu diag(Mp)^{-1} + rho diag(Mp)^{-1} Cp Dp^{-1}.
/// Dp^{-1}: fixed number of scalar V-cycles; At^{-1}: one node-coupled
/// V-cycle on the velocity block.
class FluidPreconditioner {
 public:
  FluidPreconditioner(const FluidPreconditionerData& d, int laplacian_cycles = 2, int velocity_cycles = 1);
  void apply(std::span<const double> r, std::span<double> z) const;
  Preconditioner op() const {
    return [this](std::span<const double> r, std::span<double> z) { apply(r, z); };
  }
  /// y = S^{-1} g
  void schur_inverse(std::span<const double> g, std::span<double> y) const;

 private:
  Index m_;
  double rho_, dt_, mu_;
  int lap_cycles_, vel_cycles_;
  SparseMatrix b1t_, convection_;
  Vec inv_mass_diag_;
  amg::ScalarAmg lap_amg_, vel_amg_;
};

/// P_L^{-1} = [At^{-1}, 0; S^{-1} B2 At^{-1}, -S^{-1}] with
/// S = (1/theta + 1/kappa) diag(Mp).
class StructurePreconditioner {
 public:
  StructurePreconditioner(const SparseMatrix& K, Index m, const SparseMatrix& mass, double theta, double kappa,
                          int velocity_cycles = 1);
  void apply(std::span<const double> r, std::span<double> z) const;
  Preconditioner op() const {
    return [this](std::span<const double> r, std::span<double> z) { apply(r, z); };
  }
  const Vec& schur_diagonal() const { return schur_; }

 private:
  Index m_;
  int vel_cycles_;
  SparseMatrix b2_;
  Vec schur_;
  amg::ScalarAmg vel_amg_;
};

/// Pressure Laplacian with one pinned dof (unit row and column).
SparseMatrix pin_dof(const SparseMatrix& a, Index dof);

}  // namespace fsi::linsolve
