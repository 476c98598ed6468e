#include "fsikit/newton.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "fsikit/kernels.hpp"

namespace fsi {

double inner_tolerance(ToleranceMode mode, double eps_fixed, const std::vector<double>& e) {
  if (mode == ToleranceMode::Fixed) return eps_fixed;
  if (e.size() < 2 || e.front() == 0.0) return 1e-1;
  const double red = e.back() / e.front();
  return std::clamp(red * red, 1e-12, 1e-1);
}

NewtonReport newton_solve(Vec& x, const fem::DofMap& dofs, const SparseMatrix& scalar_mass,
                          const AssembleFn& assemble, const LinearSolveFn& solve, const NewtonOptions& opt,
                          const std::string& label) {
  NewtonReport rep;
  std::vector<double> e;
  fem::BlockSaddleSystem sys;
  sys.m = dofs.m;
  assemble(x, sys);
  const Index n = dofs.size();
  Vec rhs(n), dx(n), dval(n), xt(n);
  for (int k = 1; k <= opt.max_iter; ++k) {
    for (Index i = 0; i < n; ++i) {
      rhs[i] = -sys.r[i];
      dval[i] = dofs.fixed[i] ? dofs.value[i] - x[i] : 0.0;
    }
    fem::apply_dirichlet(sys.K, rhs, dofs.fixed, dval);
    NewtonStep st;
    st.k = k;
    st.inner_tol = inner_tolerance(opt.tolerance, opt.eps_linear, e);
    std::fill(dx.begin(), dx.end(), 0.0);
    const LinearResult lr = solve(sys, x, rhs, dx, st.inner_tol);
    st.inner_iters = lr.iterations;
    st.inner_converged = lr.converged;
    for (Index i = 0; i < n; ++i)
      if (dofs.fixed[i]) dx[i] = dval[i];

    st.norm = fem::saddle_norm(scalar_mass, dx);
    e.push_back(st.norm);
    for (Index i = 0; i < n; ++i) xt[i] = x[i] + dx[i];
    const double floor = 1e-13 * fem::saddle_norm(scalar_mass, xt);
    bool done;
    if (opt.norm == NewtonNorm::Absolute) {
      done = st.norm <= opt.eps;
    } else {
      done = st.norm == 0.0 || st.norm <= floor || (k > 1 && st.norm <= opt.eps * e.front());
    }
    if (done) {
      rep.steps.push_back(st);
      x = xt;
      rep.converged = true;
      return rep;
    }
    // Step halving on element inversion.
    double s = 1.0;
    for (int h = 0;; ++h) {
      try {
        assemble(xt, sys);
        break;
      } catch (const ElementInversion& inv) {
        if (h >= opt.max_halvings) {
          rep.steps.push_back(st);
          throw ConvergenceError(label + ": element inversion persists after " + std::to_string(h) +
                                     " step halvings (" + inv.what() + ")",
                                 rep.norms());
        }
        s *= 0.5;
        for (Index i = 0; i < n; ++i) xt[i] = x[i] + s * dx[i];
      }
    }
    st.norm *= s;
    e.back() = st.norm;
    rep.steps.push_back(st);
    x = xt;
  }
  throw ConvergenceError(label + ": Newton did not converge in " + std::to_string(opt.max_iter) + " iterations",
                         rep.norms());
}

LinearResult direct_solve(const SparseMatrix& K, const Vec& rhs, Vec& x) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(K.nnz());
  for (Index i = 0; i < K.rows; ++i)
    for (Index k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k) t.emplace_back(i, K.col[k], K.val[k]);
  Eigen::SparseMatrix<double> A(K.rows, K.cols);
  A.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw Error("direct solve: factorization failed");
  const Eigen::VectorXd sol = lu.solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), rhs.size()));
  x.assign(sol.data(), sol.data() + sol.size());
  Vec r(K.rows);
  kernels::residual(K, x, rhs, r);
  const double b = kernels::norm2(rhs);
  return {1, true, b > 0 ? kernels::norm2(r) / b : 0.0};
}

}  // namespace fsi
