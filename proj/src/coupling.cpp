#include "fsikit/coupling.hpp"

#include <chrono>
#include <cmath>
#include <optional>

#include "fsikit/kernels.hpp"
#include "fsikit/linsolve.hpp"

namespace fsi::coupling {

Vec3 InletPulse::at(double t) const {
  // Steps land on multiples of dt; the slack keeps t = duration inside.
  return t <= duration * (1.0 + 1e-12) ? traction : Vec3::Zero();
}

double aitken_omega(double omega_prev, std::span<const double> r_prev, std::span<const double> r_new) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < r_prev.size(); ++i) {
    const double dr = r_new[i] - r_prev[i];
    num += r_prev[i] * dr;
    den += dr * dr;
  }
  if (den == 0.0) return omega_prev;
  return -omega_prev * num / den;
}

Vec fluid_interface_force(const fluid::FluidProblem& fp, const Vec& x, const Vec& u_old, const Vec3& g_in,
                          std::span<const Index> vertices) {
  const Vec r = fp.residual(x, u_old, g_in);
  Vec f(3 * vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (int c = 0; c < 3; ++c) f[3 * i + c] = -r[3 * vertices[i] + c];
  return f;
}

namespace {

LinearSolveFn make_amg_solver(const amg::SaddleAmgOptions& opt, int max_cycles) {
  auto cache = std::make_shared<std::optional<amg::SaddleAmg>>();
  return [cache, opt, max_cycles](const fem::BlockSaddleSystem& sys, const Vec&, const Vec& rhs, Vec& dx,
                                  double tol) {
    if (*cache && (*cache)->size(0) == sys.K.rows)
      (*cache)->refresh(sys.K);
    else
      cache->emplace(sys.K, sys.m, opt);
    std::fill(dx.begin(), dx.end(), 0.0);
    return (*cache)->solve(rhs, dx, tol, max_cycles);
  };
}

LinearResult direct(const fem::BlockSaddleSystem& sys, const Vec&, const Vec& rhs, Vec& dx, double) {
  return direct_solve(sys.K, rhs, dx);
}

}  // namespace

LinearSolveFn make_fluid_linear_solver(const fluid::FluidProblem& fp, const FieldSolverSettings& s) {
  switch (s.kind) {
    case LinearSolverKind::Amg:
      return make_amg_solver({.smoother = amg::Smoother::BraessSarazin, .steps = s.smoothing_steps},
                             s.max_iterations);
    case LinearSolverKind::Krylov:
      return [&fp, s](const fem::BlockSaddleSystem& sys, const Vec& x, const Vec& rhs, Vec& dx, double tol) {
        const SparseMatrix lap = fp.pressure_laplacian();
        const SparseMatrix conv = fp.convection_matrix(x);
        const auto& p = fp.params();
        const linsolve::FluidPreconditioner P(
            {&sys.K, sys.m, &lap, &fp.mass(), &conv, fp.pinned_pressure_vertex(), p.rho, p.dt, p.mu});
        std::fill(dx.begin(), dx.end(), 0.0);
        return linsolve::gcr(sys.K, rhs, dx, P.op(), {.tol = tol, .max_it = s.max_iterations}).result();
      };
    case LinearSolverKind::Direct:
      return direct;
  }
  throw Error("unknown linear solver");
}

LinearSolveFn make_structure_linear_solver(const structure::StructureProblem& sp, const FieldSolverSettings& s,
                                           double theta) {
  switch (s.kind) {
    case LinearSolverKind::Amg:
      return make_amg_solver(
          {.smoother = amg::Smoother::Vanka, .steps = s.smoothing_steps, .omega = s.vanka_omega}, s.max_iterations);
    case LinearSolverKind::Krylov:
      return [&sp, s, theta](const fem::BlockSaddleSystem& sys, const Vec&, const Vec& rhs, Vec& dx, double tol) {
        const linsolve::StructurePreconditioner P(sys.K, sys.m, sp.mass(), theta, sp.params().kappa);
        std::fill(dx.begin(), dx.end(), 0.0);
        return linsolve::bicgstab(sys.K, rhs, dx, P.op(), {.tol = tol, .max_it = s.max_iterations}).result();
      };
    case LinearSolverKind::Direct:
      return direct;
  }
  throw Error("unknown linear solver");
}

FsiSolver::FsiSolver(const mesh::Mesh& mesh, const fluid::FluidParams& fp, const structure::StructureParams& sp,
                     const InletPulse& pulse, const SolverSettings& solvers, const CouplingOptions& opt)
    : dt_(fp.dt), pulse_(pulse), opt_(opt) {
  if (std::abs(fp.dt - sp.dt) > 1e-14 * fp.dt) throw ConfigError("fluid and structure time steps differ");
  fluid_ = std::make_unique<fluid::FluidProblem>(mesh::fluid_submesh(mesh), fp);
  structure_ = std::make_unique<structure::StructureProblem>(mesh::structure_submesh(mesh), sp);
  ext_ = std::make_unique<ale::HarmonicExtension>(fluid_->mesh());
  fluid_linear_ = make_fluid_linear_solver(*fluid_, solvers.fluid);
  structure_linear_ = make_structure_linear_solver(*structure_, solvers.structure, solvers.theta);
  for (const auto& [f, s] : mesh::build_interface_map(mesh).pairs) {
    iface_f_.push_back(fluid_->mesh().local_vertex[f]);
    iface_s_.push_back(structure_->mesh().local_vertex[s]);
  }
  const Index mf = fluid_->num_vertices(), ms = structure_->num_vertices();
  df_old_.assign(3 * mf, 0.0);
  u_old_.assign(3 * mf, 0.0);
  hist_ = structure::NewmarkState::zero(ms);
  xf_.assign(4 * mf, 0.0);
  xs_.assign(4 * ms, 0.0);
  df_.assign(3 * mf, 0.0);
  dg_.assign(3 * iface_f_.size(), 0.0);
}

Vec FsiSolver::structure_interface_displacement(const Vec& xs) const {
  Vec d(3 * iface_s_.size());
  for (std::size_t i = 0; i < iface_s_.size(); ++i)
    for (int c = 0; c < 3; ++c) d[3 * i + c] = xs[3 * iface_s_[i] + c];
  return d;
}

Vec FsiSolver::sweep(const Vec& d_gamma, int dn_iter, StepReport* report) {
  const Index mf = fluid_->num_vertices();
  const std::string where = "step " + std::to_string(step_) + ", DN iteration " + std::to_string(dn_iter) + ": ";
  try {
    Vec data(3 * mf, 0.0);
    for (std::size_t i = 0; i < iface_f_.size(); ++i)
      for (int c = 0; c < 3; ++c) data[3 * iface_f_[i] + c] = d_gamma[3 * i + c];
    df_ = ext_->extend(data);
    const auto coords = ale::move_mesh(fluid_->mesh().coords, fluid_->mesh().tets, df_);
    Vec w(3 * mf);
    for (Index i = 0; i < 3 * mf; ++i) w[i] = (df_[i] - df_old_[i]) / dt_;
    fluid_->set_motion(coords, w);

    const NewtonReport rf = fluid_->solve(xf_, u_old_, g_in_, fluid_linear_, opt_.newton);
    if (report) report->newton.push_back({dn_iter, "fluid", rf});

    const Vec force = fluid_interface_force(*fluid_, xf_, u_old_, g_in_, iface_f_);
    Vec load(3 * structure_->num_vertices(), 0.0);
    for (std::size_t i = 0; i < iface_s_.size(); ++i)
      for (int c = 0; c < 3; ++c) load[3 * iface_s_[i] + c] = force[3 * i + c];
    const NewtonReport rs = structure_->solve(xs_, hist_, load, structure_linear_, opt_.newton);
    if (report) report->newton.push_back({dn_iter, "structure", rs});
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(where + e.what(), e.history());
  } catch (const ElementInversion& e) {
    throw ElementInversion(e.element(), where + e.what());
  }
  return structure_interface_displacement(xs_);
}

StepReport FsiSolver::iterate() {
  std::vector<double> history;
  StepReport rep = run_dn(opt_.max_dn, history);
  if (!rep.converged)
    throw ConvergenceError("step " + std::to_string(step_) + ": DN iteration did not converge in " +
                               std::to_string(opt_.max_dn) + " iterations (last |r|/sqrt(n) = " +
                               std::to_string(history.back()) + ")",
                           history);
  return rep;
}

StepReport FsiSolver::iterate_partial(int max_dn) {
  std::vector<double> history;
  return run_dn(max_dn, history);
}

StepReport FsiSolver::run_dn(int max_dn, std::vector<double>& history) {
  if (pending_) throw Error("FsiSolver: previous step not committed");
  const auto t0 = std::chrono::steady_clock::now();
  ++step_;
  pending_ = true;
  g_in_ = pulse_.at(time());
  StepReport rep;
  rep.step = step_;
  rep.time = time();
  const double scale = 1.0 / std::sqrt(std::max<double>(1.0, static_cast<double>(iface_f_.size())));
  Vec dg = dg_, r_prev;
  Vec dtilde = sweep(dg, 1, &rep);
  double omega = opt_.omega0;
  for (int k = 1; k <= max_dn; ++k) {
    Vec r(dg.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = dtilde[i] - dg[i];
    const double res = kernels::norm2(r) * scale;
    history.push_back(res);
    if (!std::isfinite(res)) break;
    if (res < opt_.eps_dn) {
      rep.dn.push_back({k, res, 0.0, 0});
      rep.converged = true;
      break;
    }
    if (k == max_dn) {
      rep.dn.push_back({k, res, 0.0, 0});
      break;
    }
    if (k > 1) omega = aitken_omega(omega, r_prev, r);
    const Vec xf = xf_, xs = xs_;
    for (int b = 0;; ++b) {
      const std::size_t logged = rep.newton.size();
      Vec cand = dg;
      kernels::axpy(omega, r, cand);
      try {
        dtilde = sweep(cand, k + 1, &rep);
        dg = std::move(cand);
        rep.dn.push_back({k, res, omega, b});
        break;
      } catch (const Error& e) {
        if (b >= opt_.max_backtracks) throw;
        for (std::size_t i = logged; i < rep.newton.size(); ++i) rep.newton[i].abandoned = true;
        xf_ = xf;
        xs_ = xs;
        omega *= 0.5;
      }
    }
    r_prev = std::move(r);
  }
  dg_ = dg;
  rep.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

void FsiSolver::commit() {
  if (!pending_) throw Error("FsiSolver: nothing to commit");
  const Index mf = fluid_->num_vertices(), ms = structure_->num_vertices();
  const auto& sp = structure_->params();
  hist_ = structure::newmark_advance(hist_, Vec(xs_.begin(), xs_.begin() + 3 * ms), sp.beta, sp.gamma, dt_);
  u_old_.assign(xf_.begin(), xf_.begin() + 3 * mf);
  df_old_ = df_;
  pending_ = false;
}

StepReport FsiSolver::step() {
  StepReport rep = iterate();
  commit();
  return rep;
}

std::vector<StepReport> run_steps(FsiSolver& solver, int n,
                                  const std::function<void(const FsiSolver&, const StepReport&)>& on_step) {
  std::vector<StepReport> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(solver.step());
    if (on_step) on_step(solver, out.back());
  }
  return out;
}

}  // namespace fsi::coupling
