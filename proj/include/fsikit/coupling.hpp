#pragma once

// Dirichlet-Neumann coupling of fluid and structure with Aitken relaxation.
//
// One time step iterates on the interface displacement d_G:
//   1. harmonic extension of d_G into the reference fluid mesh, mesh
//      velocity w = (d_f - d_f_old) / dt;
//   2. fluid Newton solve with u = w on the interface;
//   3. interface reaction of the fluid mapped to the structure as nodal load,
//      structure Newton solve giving d~_G;
//   4. r = d~_G - d_G, stop when |r| / sqrt(n) < eps_dn (n interface
//      vertices), else d_G += omega r.
//
// Strong added mass can make a relaxed iterate unsolvable (the fluid pulls
// the wall inside out). Such a sweep is retried with half the relaxation, up
// to max_backtracks times.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fsikit/ale.hpp"
#include "fsikit/amg.hpp"
#include "fsikit/fluid.hpp"
#include "fsikit/mesh.hpp"
#include "fsikit/newton.hpp"
#include "fsikit/structure.hpp"

namespace fsi::coupling {

enum class LinearSolverKind { Amg, Krylov, Direct };

struct FieldSolverSettings {
  LinearSolverKind kind = LinearSolverKind::Amg;
  int smoothing_steps = 8;
  double vanka_omega = 0.78;  ///< structure only
  int max_iterations = 200;   ///< AMG cycles or Krylov iterations
};

struct SolverSettings {
  FieldSolverSettings fluid{LinearSolverKind::Amg, 8, 0.78, 200};
  FieldSolverSettings structure{LinearSolverKind::Amg, 12, 0.78, 200};
  double theta = 6.0;  ///< kPa, structure Schur approximation
};

/// Inlet traction g_in for t <= duration, zero afterwards.
struct InletPulse {
  Vec3 traction{0.0, 0.0, 1.332};  // kPa
  double duration = 1.0;           // ms
  Vec3 at(double t) const;
};

struct CouplingOptions {
  double eps_dn = 1e-8;
  double omega0 = 0.5;
  int max_dn = 100;
  int max_backtracks = 10;
  NewtonOptions newton;
};

/// omega_k = -omega_{k-1} r_prev . (r_new - r_prev) / |r_new - r_prev|^2.
/// Returns omega_prev when r_new == r_prev.
double aitken_omega(double omega_prev, std::span<const double> r_prev, std::span<const double> r_new);

/// Fluid force on the wall at the interface vertices: minus the momentum
/// residual rows of the interface dofs (3 per vertex, in `vertices` order).
Vec fluid_interface_force(const fluid::FluidProblem& fp, const Vec& x, const Vec& u_old, const Vec3& g_in,
                          std::span<const Index> vertices);

/// A Newton solve inside the DN loop, for logs.
struct NewtonLog {
  int dn_iter = 0;
  std::string field;
  NewtonReport report;
  bool abandoned = false;  ///< its sweep failed later and was retried with a smaller omega
};

struct DnIterate {
  int k = 0;
  double residual = 0.0;  ///< |r| / sqrt(n)
  double omega = 0.0;     ///< relaxation applied after this iterate (0 on the converged one)
  int backtracks = 0;     ///< halvings of omega needed for the next sweep
};

struct StepReport {
  int step = 0;
  double time = 0.0;
  std::vector<DnIterate> dn;
  std::vector<NewtonLog> newton;
  bool converged = false;
  double time_ms = 0.0;
  int dn_iterations() const { return static_cast<int>(dn.size()); }
};

/// Builds the Newton linear solve callback for a field.
LinearSolveFn make_fluid_linear_solver(const fluid::FluidProblem& fp, const FieldSolverSettings& s);
LinearSolveFn make_structure_linear_solver(const structure::StructureProblem& sp, const FieldSolverSettings& s,
                                           double theta);

class FsiSolver {
 public:
  FsiSolver(const mesh::Mesh& mesh, const fluid::FluidParams& fp, const structure::StructureParams& sp,
            const InletPulse& pulse, const SolverSettings& solvers, const CouplingOptions& opt);

  /// Advances one time step: iterate() then commit().
  StepReport step();
  /// Runs the DN loop of the next time step without touching the time
  /// history. Throws ConvergenceError (with the DN residual history) if it
  /// does not converge in max_dn iterations.
  StepReport iterate();
  /// At most max_dn DN iterations (sweeps) of the next time step, without
  /// throwing when they do not converge. The step is left pending as after
  /// iterate(). For diagnostics.
  StepReport iterate_partial(int max_dn);
  /// Accepts the converged iterate: Newmark update, old fluid velocity and
  /// old mesh displacement.
  void commit();

  /// One unrelaxed DN sweep from the given interface displacement: returns
  /// d~_G. Updates the iterate states (mesh, fluid and structure solutions)
  /// but not the time history.
  Vec sweep(const Vec& d_gamma, int dn_iter, StepReport* report);

  int step_index() const { return step_; }
  double time() const { return step_ * dt_; }
  double dt() const { return dt_; }
  Index num_interface() const { return static_cast<Index>(iface_f_.size()); }

  const fluid::FluidProblem& fluid() const { return *fluid_; }
  const structure::StructureProblem& structure() const { return *structure_; }
  const mesh::SubMesh& fluid_mesh() const { return fluid_->mesh(); }
  const mesh::SubMesh& structure_mesh() const { return structure_->mesh(); }
  /// Fluid [u; p] on the current mesh.
  const Vec& fluid_state() const { return xf_; }
  /// Fluid mesh displacement (3m_f).
  const Vec& fluid_displacement() const { return df_; }
  /// Structure [d; p].
  const Vec& structure_state() const { return xs_; }
  const structure::NewmarkState& structure_history() const { return hist_; }
  /// Interface displacement (3n, interface pair order).
  const Vec& interface_displacement() const { return dg_; }
  const std::vector<Index>& interface_fluid_vertices() const { return iface_f_; }
  const std::vector<Index>& interface_structure_vertices() const { return iface_s_; }
  const Vec& fluid_velocity_old() const { return u_old_; }
  const CouplingOptions& options() const { return opt_; }
  Vec3 inlet_traction() const { return pulse_.at(time()); }

 private:
  StepReport run_dn(int max_dn, std::vector<double>& history);
  Vec structure_interface_displacement(const Vec& xs) const;

  double dt_;
  InletPulse pulse_;
  CouplingOptions opt_;
  std::unique_ptr<fluid::FluidProblem> fluid_;
  std::unique_ptr<structure::StructureProblem> structure_;
  std::unique_ptr<ale::HarmonicExtension> ext_;
  LinearSolveFn fluid_linear_, structure_linear_;
  std::vector<Index> iface_f_, iface_s_;
  int step_ = 0;
  bool pending_ = false;
  // Time history
  Vec df_old_, u_old_;
  structure::NewmarkState hist_;
  // Current iterate
  Vec xf_, xs_, df_, dg_;
  Vec3 g_in_ = Vec3::Zero();
};

/// Runs n steps, calling on_step after each one. On a failure the callback
/// has seen every completed step; the error propagates.
std::vector<StepReport> run_steps(FsiSolver& solver, int n,
                                  const std::function<void(const FsiSolver&, const StepReport&)>& on_step = {});

}  // namespace fsi::coupling
