// Acceptance harness: runs the twelve acceptance criteria at their pinned
// tolerances and prints one PASS/FAIL line per criterion (details indented
// above it). The exit status is 1 if a criterion not listed with
// --known-failure fails.

#include <CLI11.hpp>

#include <Eigen/LU>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "fsikit/amg.hpp"
#include "fsikit/config.hpp"
#include "fsikit/coupling.hpp"
#include "fsikit/kernels.hpp"
#include "fsikit/linsolve.hpp"
#include "oracles.hpp"
#include "systems.hpp"

using namespace fsi;
using structure::Model;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
};

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

template <class... A>
void note(const char* f, A... a) {
  std::printf("    %s\n", fmt(f, a...).c_str());
  std::fflush(stdout);
}

const char* model_name(Model m) { return m == Model::MooneyRivlin ? "mooney-rivlin" : "artery"; }

std::string g_config_dir = FSIKIT_SOURCE_DIR "/configs";

io::Config benchmark(Model m) {
  return io::load_config(g_config_dir + (m == Model::MooneyRivlin ? "/benchmark_mooney_rivlin.cfg"
                                                                  : "/benchmark_artery.cfg"));
}

coupling::FsiSolver make_solver(const mesh::Mesh& mesh, const io::Config& c) {
  return coupling::FsiSolver(mesh, io::fluid_params(c), io::structure_params(c), io::inlet_pulse(c),
                             io::solver_settings(c), io::coupling_options(c));
}

const mesh::Mesh& desk_mesh() {
  static const mesh::Mesh m = mesh::generate_tube_mesh(io::tube_params(benchmark(Model::MooneyRivlin)));
  return m;
}

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / b.norm(); }

// ---------------------------------------------------------------------------
// Linear solver runs on the first-Newton-step systems.

int amg_cycles(const test::LinearSystem& s, const amg::SaddleAmgOptions& opt, double tol = 1e-8) {
  const amg::SaddleAmg a(s.K, s.m, opt);
  Vec x(s.K.rows, 0.0);
  const LinearResult r = a.solve(s.rhs, x, tol, 500);
  if (!r.converged) throw Error(fmt("AMG did not reach %.0e in 500 cycles", tol));
  return r.iterations;
}

amg::SaddleAmgOptions fluid_amg(int steps = 8) { return {.smoother = amg::Smoother::BraessSarazin, .steps = steps}; }
amg::SaddleAmgOptions structure_amg(int steps = 12, double omega = 0.78) {
  return {.smoother = amg::Smoother::Vanka, .steps = steps, .omega = omega};
}

int fluid_gcr(const mesh::Mesh& mesh, Vec* solution = nullptr, double tol = 1e-8) {
  fluid::FluidProblem fp(mesh::fluid_submesh(mesh), fluid::FluidParams{});
  const auto s = test::fluid_system(mesh);
  const SparseMatrix lap = fp.pressure_laplacian();
  const SparseMatrix conv = fp.convection_matrix(Vec(s.K.rows, 0.0));
  const auto& p = fp.params();
  const linsolve::FluidPreconditioner P({&s.K, s.m, &lap, &fp.mass(), &conv, fp.pinned_pressure_vertex(), p.rho,
                                         p.dt, p.mu});
  Vec x(s.K.rows, 0.0);
  const auto r = linsolve::gcr(s.K, s.rhs, x, P.op(), {.tol = tol, .max_it = 1000});
  if (!r.converged) throw Error("fluid GCR did not converge");
  if (solution) *solution = x;
  return r.iterations;
}

int structure_bicgstab(const mesh::Mesh& mesh, const structure::StructureParams& sp, Vec* solution = nullptr,
                       double tol = 1e-8) {
  const auto s = test::structure_system(mesh, sp);
  const auto sub = mesh::structure_submesh(mesh);
  const SparseMatrix M = fem::scalar_mass(sub.coords, sub.tets);
  const linsolve::StructurePreconditioner P(s.K, s.m, M, 6.0, sp.kappa);
  Vec x(s.K.rows, 0.0);
  const auto r = linsolve::bicgstab(s.K, s.rhs, x, P.op(), {.tol = tol, .max_it = 2000});
  if (!r.converged) throw Error("structure BiCGStab did not converge");
  if (solution) *solution = x;
  return r.iterations;
}

// ---------------------------------------------------------------------------
// First time step of a benchmark: the first two DN iterations, as run by the
// coupled solver, plus the constraint residuals of the final sub-solves.

struct FirstStep {
  coupling::StepReport report;
  double constraint_weak = 0.0, constraint_l2 = 0.0, divergence = 0.0;
};

FirstStep first_step(Model model, ToleranceMode mode) {
  static std::map<std::pair<Model, ToleranceMode>, FirstStep> cache;
  const auto key = std::make_pair(model, mode);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  io::Config c = benchmark(model);
  c.tolerance_mode = mode;
  auto solver = make_solver(desk_mesh(), c);
  FirstStep fs;
  fs.report = solver.iterate_partial(2);

  fs.constraint_weak = solver.structure().constraint_residual(solver.structure_state(), solver.structure_history());
  fs.constraint_l2 = solver.structure().constraint_l2(solver.structure_state());

  // Continuity rows of the fluid residual relative to the free residual of
  // the rest state on the same moved mesh.
  const auto& fp = solver.fluid();
  const Index m = fp.num_vertices();
  const Vec r = fp.residual(solver.fluid_state(), solver.fluid_velocity_old(), solver.inlet_traction());
  const Vec r0 = fp.residual(Vec(4 * m, 0.0), solver.fluid_velocity_old(), solver.inlet_traction());
  double div = 0.0, scale = 0.0;
  for (Index v = 0; v < m; ++v) div += r[3 * m + v] * r[3 * m + v];
  for (Index i = 0; i < 4 * m; ++i)
    if (!fp.dofs().fixed[i]) scale += r0[i] * r0[i];
  fs.divergence = std::sqrt(div / scale);
  cache[key] = fs;
  return fs;
}

std::string inner_counts(const NewtonReport& r) {
  std::string s;
  for (const auto& st : r.steps) s += (s.empty() ? "" : ",") + std::to_string(st.inner_iters);
  return s;
}

std::string increments(const NewtonReport& r) {
  std::string s;
  for (const auto& st : r.steps) s += fmt("%s%.1e", s.empty() ? "" : " ", st.norm);
  return s;
}

// ---------------------------------------------------------------------------

Outcome c1_stress_free() {
  double worst = 0.0;
  const Mat3 I = Mat3::Identity();
  worst = std::max(worst, materials::pk2(materials::Material::mooney_rivlin({}), I, 0.0).S.cwiseAbs().maxCoeff());
  const structure::StructureParams sp;
  test::Gen g(101);
  for (int k = 0; k < 16; ++k) {
    const Vec3 x(g.uniform(), g.uniform(), g.uniform());
    if (Vec3(x.x(), x.y(), 0.0).norm() < 0.1) continue;
    const auto& layer = k % 2 ? sp.media : sp.adventitia;
    const auto [a1, a2] = materials::fiber_directions(materials::fiber_frame(x), layer.alpha);
    worst = std::max(worst, materials::pk2(materials::Material::artery(layer, a1, a2), I, 0.0).S.cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, fmt("max |S| at F = I, p = 0: %.2e kPa (limit 1e-12)", worst)};
}

Outcome c2_tangents() {
  test::Gen g(102);
  const structure::StructureParams sp;
  const auto mr = materials::Material::mooney_rivlin(sp.mr);
  double worst_mr = 0.0, worst_ar = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto k = materials::kinematics(test::random_grad(g, 0.2));
    worst_mr = std::max(worst_mr, rel(mr.tangent(k.C), test::fd_tangent(mr, k.C)));
  }
  int tested = 0;
  while (tested < 100) {
    const Vec3 x(g.uniform(), g.uniform(), g.uniform());
    if (Vec3(x.x(), x.y(), 0.0).norm() < 0.1) continue;
    const auto& layer = tested % 2 ? sp.media : sp.adventitia;
    const auto [a1, a2] = materials::fiber_directions(materials::fiber_frame(x), layer.alpha);
    Mat3 grad;
    if (!test::random_artery_state(g, a1, a2, 0.2, grad)) continue;
    const auto mat = materials::Material::artery(layer, a1, a2);
    const auto k = materials::kinematics(grad, &a1, &a2);
    worst_ar = std::max(worst_ar, rel(mat.tangent(k.C), test::fd_tangent(mat, k.C)));
    ++tested;
  }
  note("mooney-rivlin: worst relative error %.2e over 100 states", worst_mr);
  note("artery (J4, J6 > 1): worst relative error %.2e over 100 states", worst_ar);
  const double worst = std::max(worst_mr, worst_ar);
  return {worst <= 1e-6, fmt("tangent vs central differences: %.2e (limit 1e-6)", worst)};
}

Outcome c3_jacobians() {
  const auto& mesh = desk_mesh();
  test::Gen g(103);
  double worst_f = 0.0;
  {
    fluid::FluidProblem fp(mesh::fluid_submesh(mesh), fluid::FluidParams{});
    const Index m = fp.num_vertices();
    std::vector<Vec3> coords = fp.mesh().coords;
    for (auto& c : coords) c *= 1.0 + 0.01 * g.uniform();
    fp.set_motion(coords, g.vec(3 * m, -0.2, 0.2));
    const Vec x = test::random_fluid_state(m, g);
    const Vec uo = g.vec(3 * m, -0.5, 0.5);
    const Vec3 gin(0.0, 0.0, 1.332);
    fem::BlockSaddleSystem sys;
    fp.assemble(x, uo, gin, sys);
    for (int k = 0; k < 20; ++k) {
      const Vec v = g.vec(4 * m);
      const Vec Jv = sys.K * std::span<const double>(v);
      worst_f = std::max(worst_f, test::fd_directional_error(
                                      [&](const Vec& y) { return fp.residual(y, uo, gin); }, x, v, Jv, 1e-5));
    }
  }
  note("fluid: worst relative error %.2e over 20 directions", worst_f);
  double worst_s = 0.0;
  for (Model model : {Model::MooneyRivlin, Model::Artery}) {
    structure::StructureParams p;
    p.model = model;
    structure::StructureProblem sp(mesh::structure_submesh(mesh), p);
    const Index m = sp.num_vertices();
    const Vec x = test::inflated_state(sp, g, 5e-4);
    if (model == Model::Artery) note("artery state: min(J4, J6) - 1 = %.2e", test::min_fiber_extension(sp, x));
    const auto hist = test::random_history(m, g);
    const Vec load = test::pressure_load(sp.mesh(), 1.332);
    fem::BlockSaddleSystem sys;
    sp.assemble(x, hist, load, sys);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      Vec v = g.vec(4 * m);
      for (Index i = 0; i < 3 * m; ++i) v[i] *= 1e-3;
      const Vec Jv = sys.K * std::span<const double>(v);
      worst = std::max(worst, test::fd_directional_error(
                                  [&](const Vec& y) { return sp.residual(y, hist, load); }, x, v, Jv, 1e-4));
    }
    note("structure (%s): worst relative error %.2e over 20 directions", model_name(model), worst);
    worst_s = std::max(worst_s, worst);
  }
  const double worst = std::max(worst_f, worst_s);
  return {worst <= 1e-5, fmt("Jacobian vs residual differences: %.2e (limit 1e-5)", worst)};
}

Outcome c4_newton_tail() {
  // Increments normalized by the first one; pairs whose later increment is
  // already at round-off (<= 1e-12 e_1) carry no rate information.
  constexpr double kC = 10.0, kRoundoff = 1e-12;
  bool ok = true;
  int max_iters = 0;
  double worst_c = 0.0;
  for (Model model : {Model::MooneyRivlin, Model::Artery}) {
    const FirstStep fs = first_step(model, ToleranceMode::Fixed);
    for (const auto& log : fs.report.newton) {
      const auto e = log.report.norms();
      const int n = static_cast<int>(e.size());
      max_iters = std::max(max_iters, n);
      double c = 0.0;
      for (int k = std::max(0, n - 3); k + 1 < n; ++k) {
        const double a = e[k] / e[0], b = e[k + 1] / e[0];
        if (b > kRoundoff) c = std::max(c, b / std::pow(a, 1.8));
      }
      worst_c = std::max(worst_c, c);
      const bool good = log.report.converged && n <= 6 && c <= kC;
      ok = ok && good;
      note("%s DN %d %-9s%s: %d iterations, e_k = %s, C = %.2g%s", model_name(model), log.dn_iter,
           log.field.c_str(), log.abandoned ? " (abandoned sweep)" : "", n, increments(log.report).c_str(), c,
           good ? "" : "  <-- violates");
    }
  }
  return {ok, fmt("first-step sub-solves: at most %d Newton iterations (limit 6), tail constant %.2g (limit %g)",
                  max_iters, worst_c, kC)};
}

Outcome c5_coarsening() {
  bool ok = true;
  double lo = 1e300, hi = 0.0;
  const auto fs = test::fluid_system(desk_mesh());
  const auto ss = test::structure_system(desk_mesh());
  for (int field = 0; field < 2; ++field) {
    const auto& s = field == 0 ? fs : ss;
    const amg::SaddleAmg a(s.K, s.m, field == 0 ? fluid_amg() : structure_amg());
    std::string sizes, ratios;
    for (int l = 0; l < a.num_levels(); ++l) {
      sizes += (l ? " " : "") + std::to_string(a.size(l));
      if (l + 1 < a.num_levels()) {
        const double r = static_cast<double>(a.size(l)) / static_cast<double>(a.size(l + 1));
        ratios += fmt("%s%.2f", l ? " " : "", r);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        ok = ok && r >= 5.0 && r <= 12.0;
      }
    }
    note("%s levels: %s dofs, ratios %s", field == 0 ? "fluid" : "structure", sizes.c_str(), ratios.c_str());
  }
  if (hi == 0.0) return {false, "no coarse levels were built"};
  return {ok, fmt("per-level dof reduction in [%.2f, %.2f] (limits [5, 12])", lo, hi)};
}

Outcome c6_smoothing() {
  const auto fs = test::fluid_system(desk_mesh());
  const auto ss = test::structure_system(desk_mesh());
  const int f4 = amg_cycles(fs, fluid_amg(4)), f8 = amg_cycles(fs, fluid_amg(8));
  const int s6 = amg_cycles(ss, structure_amg(6)), s12 = amg_cycles(ss, structure_amg(12));
  const double rf = static_cast<double>(f4) / f8, rs = static_cast<double>(s6) / s12;
  note("fluid Braess-Sarazin: 4 steps %d cycles, 8 steps %d cycles, factor %.2f", f4, f8, rf);
  note("structure Vanka: 6 steps %d cycles, 12 steps %d cycles, factor %.2f", s6, s12, rs);
  const double worst = std::min(rf, rs);
  return {worst >= 1.6, fmt("cycle reduction from doubled smoothing: %.2f (limit >= 1.6)", worst)};
}

Outcome c7_kappa() {
  std::vector<int> amgc, bicg;
  for (double kappa : {1e3, 1e5, 1e7}) {
    structure::StructureParams sp;
    sp.kappa = kappa;
    amgc.push_back(amg_cycles(test::structure_system(desk_mesh(), sp), structure_amg()));
    bicg.push_back(structure_bicgstab(desk_mesh(), sp));
    note("kappa %.0e kPa: AMG %d cycles, BiCGStab %d iterations", kappa, amgc.back(), bicg.back());
  }
  const auto [alo, ahi] = std::minmax_element(amgc.begin(), amgc.end());
  const auto [blo, bhi] = std::minmax_element(bicg.begin(), bicg.end());
  const double bvar = static_cast<double>(*bhi - *blo) / *blo;
  return {*ahi - *alo <= 3 && bvar <= 0.5,
          fmt("AMG spread %d cycles (limit 3), BiCGStab spread %.0f%% (limit 50%%)", *ahi - *alo, 100 * bvar)};
}

Outcome c8_mesh_independence() {
  const auto coarse_p = io::tube_params(benchmark(Model::MooneyRivlin));
  struct Counts {
    int fluid_amg, structure_amg, gcr, bicgstab;
  };
  auto run = [](const mesh::Mesh& mesh, const char* label) {
    Counts c{};
    c.fluid_amg = amg_cycles(test::fluid_system(mesh), fluid_amg());
    c.structure_amg = amg_cycles(test::structure_system(mesh), structure_amg());
    c.gcr = fluid_gcr(mesh);
    c.bicgstab = structure_bicgstab(mesh, structure::StructureParams{});
    note("%s (%zu tets): fluid AMG %d, structure AMG %d, fluid GCR %d, structure BiCGStab %d", label,
         mesh.tets.size(), c.fluid_amg, c.structure_amg, c.gcr, c.bicgstab);
    return c;
  };
  const Counts a = run(desk_mesh(), "coarse");
  const Counts b = run(mesh::generate_tube_mesh(coarse_p.refined()), "refined");
  const int damg = std::max(std::abs(b.fluid_amg - a.fluid_amg), std::abs(b.structure_amg - a.structure_amg));
  const bool krylov_up = b.gcr > a.gcr && b.bicgstab > a.bicgstab;
  return {damg <= 3 && krylov_up,
          fmt("AMG change %d cycles (limit 3), Krylov counts %s", damg,
              krylov_up ? "increase" : "do not increase for both fields")};
}

Outcome c9_dn() {
  bool ok = true;
  std::string summary;
  for (Model model : {Model::MooneyRivlin, Model::Artery}) {
    const io::Config c = benchmark(model);
    auto solver = make_solver(desk_mesh(), c);
    std::vector<int> counts;
    double wmin = 1e300, wmax = -1e300, worst_res = 0.0;
    bool all_converged = true;
    try {
      coupling::run_steps(solver, 8, [&](const coupling::FsiSolver&, const coupling::StepReport& r) {
        counts.push_back(r.dn_iterations());
        all_converged = all_converged && r.converged;
        worst_res = std::max(worst_res, r.dn.back().residual);
        double lo = 1e300, hi = -1e300;
        for (const auto& d : r.dn) {
          if (d.omega == 0.0) continue;  // converged iterate, no relaxation applied
          lo = std::min(lo, d.omega);
          hi = std::max(hi, d.omega);
        }
        wmin = std::min(wmin, lo);
        wmax = std::max(wmax, hi);
        note("%s step %d: %d DN iterations, final |r|/sqrt(n) %.2e, omega in [%.3g, %.3g], %.0f s",
             model_name(model), r.step, r.dn_iterations(), r.dn.back().residual, lo, hi, r.time_ms / 1000);
      });
    } catch (const Error& e) {
      note("%s: %s", model_name(model), e.what());
      all_converged = false;
    }
    const bool steps_ok = all_converged && counts.size() == 8 && worst_res < 1e-8;
    const bool omega_ok = wmin > 0.0 && wmax < 1.0;
    double spread = 0.0;
    if (!counts.empty()) {
      const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
      spread = static_cast<double>(*hi) / *lo;
    }
    const bool spread_ok = !counts.empty() && spread <= 2.0;
    ok = ok && steps_ok && omega_ok && spread_ok;
    summary += fmt("%s%s: %zu/8 steps converged, omega in (%.3g, %.3g), DN max/min %.2f", summary.empty() ? "" : "; ",
                   model_name(model), counts.size(), wmin, wmax, spread);
  }
  return {ok, summary + " (limits: all 8, (0, 1), 2)"};
}

Outcome c10_adaptive() {
  static constexpr int kPattern[4] = {1, 1, 2, 5};
  bool newton_ok = true, inner_ok = true, pattern_ok = true;
  for (Model model : {Model::MooneyRivlin, Model::Artery}) {
    const FirstStep fixed = first_step(model, ToleranceMode::Fixed);
    const FirstStep adapt = first_step(model, ToleranceMode::Adaptive);
    if (fixed.report.newton.size() != adapt.report.newton.size())
      throw Error("fixed and adaptive runs differ in shape");
    for (std::size_t i = 0; i < fixed.report.newton.size(); ++i) {
      const auto& f = fixed.report.newton[i];
      const auto& a = adapt.report.newton[i];
      if (f.field != a.field || f.abandoned != a.abandoned) throw Error("fixed and adaptive runs differ in shape");
      const bool n_ok = a.report.iterations() <= f.report.iterations() + 1;
      const bool c_ok = a.report.total_inner() < f.report.total_inner();
      // Tail-aligned: the counts rise where the tolerance tightens, at the
      // end; extra leading Newton steps all run at the loose tolerance.
      bool p_ok = true;
      const int n = a.report.iterations(), len = std::min(4, n);
      for (int j = 0; j < len; ++j)
        p_ok = p_ok && std::abs(a.report.steps[n - len + j].inner_iters - kPattern[4 - len + j]) <= 2;
      newton_ok = newton_ok && n_ok;
      inner_ok = inner_ok && c_ok;
      pattern_ok = pattern_ok && p_ok;
      note("%s DN %d %-9s%s: Newton fixed %d / adaptive %d, inner cycles fixed %d (%s) / adaptive %d (%s)%s",
           model_name(model), f.dn_iter, f.field.c_str(), f.abandoned ? " (abandoned sweep)" : "",
           f.report.iterations(), a.report.iterations(),
           f.report.total_inner(), inner_counts(f.report).c_str(), a.report.total_inner(),
           inner_counts(a.report).c_str(), n_ok && c_ok && p_ok ? "" : "  <-- violates");
    }
  }
  return {newton_ok && inner_ok && pattern_ok,
          fmt("Newton counts within +1: %s; fewer inner cycles: %s; tail of 1,1,2,5 pattern within 2: %s",
              newton_ok ? "yes" : "no", inner_ok ? "yes" : "no", pattern_ok ? "yes" : "no")};
}

Outcome c11_constraints() {
  bool ok = true;
  double worst_s = 0.0, worst_f = 0.0;
  for (Model model : {Model::MooneyRivlin, Model::Artery}) {
    const FirstStep fs = first_step(model, ToleranceMode::Fixed);
    note("%s: structure |kappa R_p| / |M p| = %.2e (pointwise L2 |p + kappa (J-1)| / |p| = %.2e), fluid "
         "continuity residual %.2e",
         model_name(model), fs.constraint_weak, fs.constraint_l2, fs.divergence);
    worst_s = std::max(worst_s, fs.constraint_weak);
    worst_f = std::max(worst_f, fs.divergence);
  }
  const double eps_linear = benchmark(Model::MooneyRivlin).eps_linear;
  ok = worst_s <= 1e-6 && worst_f <= eps_linear;
  return {ok, fmt("structure constraint %.2e (limit 1e-6), fluid continuity %.2e (limit %.0e)", worst_s, worst_f,
                  eps_linear)};
}

Outcome c12_oracle() {
  const auto mesh = mesh::generate_tube_mesh(test::tiny_tube());
  constexpr double kTol = 1e-14;
  double worst = 0.0;
  auto dense = [](const test::LinearSystem& s) {
    const Eigen::MatrixXd A = s.K.to_dense();
    const Eigen::VectorXd x = A.fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(s.rhs.data(), s.rhs.size()));
    return Vec(x.data(), x.data() + x.size());
  };
  auto check = [&](const char* what, const Vec& x, const Vec& ref) {
    const double e = test::rel_diff(x, ref);
    worst = std::max(worst, e);
    note("%-28s relative difference %.2e", what, e);
  };
  {
    const auto s = test::fluid_system(mesh);
    note("fluid system: %ld dofs", static_cast<long>(s.K.rows));
    const Vec ref = dense(s);
    Vec x;
    fluid_gcr(mesh, &x, kTol);
    check("fluid GCR", x, ref);
    const amg::SaddleAmg a(s.K, s.m, fluid_amg());
    x.assign(s.K.rows, 0.0);
    a.solve(s.rhs, x, kTol, 500);
    check("fluid AMG (Braess-Sarazin)", x, ref);
  }
  {
    const auto s = test::structure_system(mesh);
    note("structure system: %ld dofs", static_cast<long>(s.K.rows));
    const Vec ref = dense(s);
    Vec x;
    structure_bicgstab(mesh, structure::StructureParams{}, &x, kTol);
    check("structure BiCGStab", x, ref);
    const amg::SaddleAmg a(s.K, s.m, structure_amg());
    x.assign(s.K.rows, 0.0);
    a.solve(s.rhs, x, kTol, 500);
    check("structure AMG (Vanka)", x, ref);
  }
  return {worst <= 1e-8, fmt("iterative vs dense solutions: %.2e (limit 1e-8)", worst)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fsikit acceptance criteria"};
  std::vector<int> only, known;
  app.add_option("--only", only, "criteria to run (default: all)")->check(CLI::Range(1, 12));
  app.add_option("--known-failure", known, "criteria whose failure does not affect the exit status")
      ->check(CLI::Range(1, 12));
  app.add_option("--configs", g_config_dir, "directory holding the benchmark configurations");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"stress-free reference", c1_stress_free},
      {"constitutive tangents", c2_tangents},
      {"assembled Jacobians", c3_jacobians},
      {"Newton quadratic tail", c4_newton_tail},
      {"AMG coarsening ratio", c5_coarsening},
      {"smoothing-step doubling", c6_smoothing},
      {"incompressibility robustness", c7_kappa},
      {"mesh-independence trend", c8_mesh_independence},
      {"DN coupling", c9_dn},
      {"adaptive tolerance control", c10_adaptive},
      {"constraint residuals", c11_constraints},
      {"oracle equivalence", c12_oracle},
  };
  const std::set<int> selected(only.begin(), only.end()), tolerated(known.begin(), known.end());
  int passed = 0, failed = 0, blocking = 0;
  for (int i = 1; i <= 12; ++i) {
    if (!selected.empty() && !selected.count(i)) continue;
    const auto& [name, run] = criteria[i - 1];
    std::printf("[%2d] %s\n", i, name);
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s: %s [%.0f s]\n", o.pass ? "PASS" : "FAIL", i, name, o.summary.c_str(), sec);
    std::fflush(stdout);
    if (o.pass) {
      ++passed;
    } else {
      ++failed;
      if (!tolerated.count(i)) ++blocking;
    }
  }
  std::printf("%d passed, %d failed\n", passed, failed);
  return blocking > 0 ? 1 : 0;
}
