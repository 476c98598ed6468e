#pragma once

// Newton iteration shared by the fluid and structure sub-problems.
//
// Stopping rule: the M-weighted increment norm e_k = |delta_k|_M must drop
// below eps * e_1 (relative mode) or eps (absolute mode). In relative mode an
// additional floor of 1e-13 |x|_M accepts increments that are already at
// round-off level, which otherwise happens when a warm start is very close.

#include <functional>
#include <string>
#include <vector>

#include "fsikit/fem.hpp"

namespace fsi {

enum class ToleranceMode { Fixed, Adaptive };
enum class NewtonNorm { Relative, Absolute };

struct NewtonOptions {
  double eps = 1e-8;
  int max_iter = 25;
  NewtonNorm norm = NewtonNorm::Relative;
  ToleranceMode tolerance = ToleranceMode::Fixed;
  double eps_linear = 1e-8;  ///< inner tolerance in fixed mode
  int max_halvings = 5;
};

/// Inner tolerance for Newton step k (1-based) from previous increment norms.
/// Adaptive: (e_{k-1} / e_1)^2 clamped to [1e-12, 1e-1]; steps 1 and 2 use 1e-1.
double inner_tolerance(ToleranceMode mode, double eps_fixed, const std::vector<double>& increments);

struct LinearResult {
  int iterations = 0;
  bool converged = true;
  double reduction = 0.0;  ///< achieved relative residual
};

struct NewtonStep {
  int k = 0;
  double norm = 0.0;       ///< e_k
  double inner_tol = 0.0;  ///< requested relative linear residual
  int inner_iters = 0;
  bool inner_converged = true;
};

struct NewtonReport {
  std::vector<NewtonStep> steps;
  bool converged = false;
  int iterations() const { return static_cast<int>(steps.size()); }
  int total_inner() const {
    int s = 0;
    for (const auto& st : steps) s += st.inner_iters;
    return s;
  }
  std::vector<double> norms() const {
    std::vector<double> v;
    for (const auto& st : steps) v.push_back(st.norm);
    return v;
  }
};

/// assemble(x, sys): Jacobian and residual at x (may throw ElementInversion).
using AssembleFn = std::function<void(const Vec& x, fem::BlockSaddleSystem& sys)>;
/// solve(sys, x, rhs, dx, tol): approximately solves sys.K dx = rhs (Dirichlet
/// rows already eliminated in sys.K and rhs) at the current iterate x; dx
/// enters as the initial guess.
using LinearSolveFn = std::function<LinearResult(const fem::BlockSaddleSystem& sys, const Vec& x, const Vec& rhs,
                                                 Vec& dx, double tol)>;

/// Runs Newton from x (in/out). Dirichlet values are imposed on the first
/// increment. Throws ConvergenceError with the increment history on failure.
NewtonReport newton_solve(Vec& x, const fem::DofMap& dofs, const SparseMatrix& scalar_mass,
                          const AssembleFn& assemble, const LinearSolveFn& solve, const NewtonOptions& opt,
                          const std::string& label);

/// Direct sparse LU solve (test oracle and small problems).
LinearResult direct_solve(const SparseMatrix& K, const Vec& rhs, Vec& x);

}  // namespace fsi
