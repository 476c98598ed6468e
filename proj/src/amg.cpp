#include "fsikit/amg.hpp"

#include <algorithm>
#include <cmath>

#include "fsikit/kernels.hpp"

namespace fsi::amg {

std::vector<Index> Aggregates::sizes() const {
  std::vector<Index> s(count, 0);
  for (Index a : of) ++s[a];
  return s;
}

Aggregates pairwise_aggregation(const SparseMatrix& graph, int passes) {
  const Index n = graph.rows;
  Aggregates agg;
  agg.of.resize(n);
  for (Index i = 0; i < n; ++i) agg.of[i] = i;
  agg.count = n;
  SparseMatrix g = add(graph, graph.transpose());
  for (double& v : g.val) v = std::abs(v);

  for (int pass = 0; pass < passes; ++pass) {
    const Index nc = g.rows;
    std::vector<Index> match(nc, -1);
    Index next = 0;
    for (Index i = 0; i < nc; ++i) {
      if (match[i] >= 0) continue;
      Index best = -1;
      double wbest = 0.0;
      for (Index k = g.row_ptr[i]; k < g.row_ptr[i + 1]; ++k) {
        const Index j = g.col[k];
        if (j == i || match[j] >= 0) continue;
        if (g.val[k] > wbest) {
          wbest = g.val[k];
          best = j;
        }
      }
      match[i] = next;
      if (best >= 0) match[best] = next;
      ++next;
    }
    if (next == nc) break;
    for (Index& a : agg.of) a = match[a];
    agg.count = next;
    if (pass + 1 < passes) {
      g = galerkin(g, match, next);
      // Drop the diagonal so that it never wins a match.
      for (Index i = 0; i < g.rows; ++i)
        for (Index k = g.row_ptr[i]; k < g.row_ptr[i + 1]; ++k)
          if (g.col[k] == i) g.val[k] = 0.0;
    }
  }
  return agg;
}

std::vector<char> trivial_rows(const SparseMatrix& a) {
  std::vector<char> t(a.rows, 1);
  for (Index i = 0; i < a.rows; ++i)
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      if (a.col[k] != i && a.val[k] != 0.0) {
        t[i] = 0;
        break;
      }
  return t;
}

SparseMatrix galerkin(const SparseMatrix& a, std::span<const Index> map, Index coarse_size) {
  TripletBuilder tb(coarse_size, coarse_size);
  tb.reserve(a.nnz());
  std::vector<char> hit(coarse_size, 0);
  for (Index i = 0; i < a.rows; ++i) {
    const Index I = map[i];
    if (I < 0) continue;
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const Index J = map[a.col[k]];
      if (J < 0) continue;
      tb.add(I, J, a.val[k]);
      hit[I] = 1;
    }
  }
  for (Index I = 0; I < coarse_size; ++I)
    if (!hit[I]) tb.add(I, I, 1.0);
  return tb.build();
}

SparseMatrix prolongation(std::span<const Index> map, Index coarse_size) {
  TripletBuilder tb(static_cast<Index>(map.size()), coarse_size);
  for (std::size_t i = 0; i < map.size(); ++i)
    if (map[i] >= 0) tb.add(static_cast<Index>(i), map[i], 1.0);
  return tb.build();
}

namespace {

void restrict_add(std::span<const Index> map, std::span<const double> fine, std::span<double> coarse) {
  std::fill(coarse.begin(), coarse.end(), 0.0);
  for (std::size_t i = 0; i < map.size(); ++i)
    if (map[i] >= 0) coarse[map[i]] += fine[i];
}

void prolong_add(std::span<const Index> map, std::span<const double> coarse, std::span<double> fine) {
  for (std::size_t i = 0; i < map.size(); ++i)
    if (map[i] >= 0) fine[i] += coarse[map[i]];
}

void gauss_seidel(const SparseMatrix& a, std::span<const double> b, std::span<double> x, bool forward) {
  const Index n = a.rows;
  for (Index s = 0; s < n; ++s) {
    const Index i = forward ? s : n - 1 - s;
    double diag = 0.0, sum = b[i];
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const Index j = a.col[k];
      if (j == i)
        diag = a.val[k];
      else
        sum -= a.val[k] * x[j];
    }
    if (diag != 0.0) x[i] = sum / diag;
  }
}

Eigen::PartialPivLU<Eigen::MatrixXd> dense_lu(const SparseMatrix& a) {
  return Eigen::PartialPivLU<Eigen::MatrixXd>(a.to_dense());
}

void dense_solve(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, std::span<const double> b, std::span<double> x) {
  const Eigen::VectorXd s = lu.solve(Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Index>(b.size())));
  std::copy(s.data(), s.data() + s.size(), x.begin());
}

}  // namespace

// ---------------------------------------------------------------------------
// Scalar AMG

ScalarAmg::ScalarAmg(const SparseMatrix& a, const ScalarAmgOptions& opt) : opt_(opt) {
  const Index bs = opt.block;
  if (bs < 1 || a.rows % bs != 0) throw Error("scalar AMG: matrix size is not a multiple of the block size");
  levels_.push_back({a, {}, 0});
  while (levels_.back().a.rows > opt.coarse_size) {
    Level& lv = levels_.back();
    const Index n = lv.a.rows;
    const auto triv = trivial_rows(lv.a);
    lv.map.assign(n, -1);
    Index nc = 0;
    if (bs == 1) {
      const Aggregates agg = pairwise_aggregation(lv.a, opt.passes);
      // Renumber aggregates, skipping trivial rows.
      std::vector<Index> id(agg.count, -1);
      for (Index i = 0; i < n; ++i) {
        if (triv[i]) continue;
        Index& c = id[agg.of[i]];
        if (c < 0) c = nc++;
        lv.map[i] = c;
      }
    } else {
      TripletBuilder tb(n / bs, n / bs);
      for (Index i = 0; i < n; ++i)
        for (Index k = lv.a.row_ptr[i]; k < lv.a.row_ptr[i + 1]; ++k)
          if (i / bs != lv.a.col[k] / bs) tb.add(i / bs, lv.a.col[k] / bs, std::abs(lv.a.val[k]));
      const Aggregates agg = pairwise_aggregation(tb.build(), opt.passes);
      // Coarse dof per (aggregate, component), created only for non-trivial rows.
      std::vector<Index> id(bs * agg.count, -1);
      for (Index i = 0; i < n; ++i) {
        if (triv[i]) continue;
        Index& c = id[bs * agg.of[i / bs] + i % bs];
        if (c < 0) c = nc++;
        lv.map[i] = c;
      }
    }
    if (nc == 0) {
      lv.map.clear();
      break;
    }
    const auto active = static_cast<Index>(std::count(triv.begin(), triv.end(), 0));
    if (static_cast<double>(active) / nc < 1.5)
      throw Error("scalar AMG: coarsening stagnated at level " + std::to_string(levels_.size() - 1) + " (" +
                  std::to_string(active) + " -> " + std::to_string(nc) +
                  " dofs); the matrix graph has too few strong connections");
    lv.next = nc;
    SparseMatrix ac = galerkin(lv.a, lv.map, nc);
    levels_.push_back({std::move(ac), {}, 0});
  }
  coarse_ = dense_lu(levels_.back().a);
}

void ScalarAmg::cycle(int l, std::span<const double> b, std::span<double> x) const {
  const Level& lv = levels_[l];
  if (l + 1 == num_levels()) {
    dense_solve(coarse_, b, x);
    return;
  }
  for (int s = 0; s < opt_.sweeps; ++s) gauss_seidel(lv.a, b, x, true);
  Vec r(lv.a.rows);
  kernels::residual(lv.a, x, b, r);
  Vec rc(lv.next), ec(lv.next, 0.0);
  restrict_add(lv.map, r, rc);
  cycle(l + 1, rc, ec);
  prolong_add(lv.map, ec, x);
  for (int s = 0; s < opt_.sweeps; ++s) gauss_seidel(lv.a, b, x, false);
}

void ScalarAmg::vcycle(std::span<const double> b, std::span<double> x) const { cycle(0, b, x); }

void ScalarAmg::apply(std::span<const double> b, std::span<double> x, int cycles) const {
  std::fill(x.begin(), x.end(), 0.0);
  for (int c = 0; c < cycles; ++c) cycle(0, b, x);
}

// ---------------------------------------------------------------------------
// Saddle-point AMG

SparseMatrix saddle_node_graph(const SparseMatrix& K, Index m) {
  TripletBuilder tb(m, m);
  tb.reserve(K.nnz() / 3);
  for (Index i = 0; i < K.rows; ++i) {
    const bool iv = i < 3 * m;
    const Index ni = iv ? i / 3 : i - 3 * m;
    for (Index k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k) {
      const Index j = K.col[k];
      const bool jv = j < 3 * m;
      if (iv != jv) continue;
      const Index nj = jv ? j / 3 : j - 3 * m;
      if (ni != nj && K.val[k] != 0.0) tb.add(ni, nj, std::abs(K.val[k]));
    }
  }
  return tb.build();
}

SaddleAmg::SaddleAmg(const SparseMatrix& K, Index m, const SaddleAmgOptions& opt) : opt_(opt) {
  if (K.rows != 4 * m) throw Error("saddle AMG: matrix size does not match 4 m");
  Level fine;
  fine.m = m;
  fine.K = K;
  levels_.push_back(std::move(fine));
  build_coarse();
}

void SaddleAmg::refresh(const SparseMatrix& K) {
  if (K.rows != levels_[0].K.rows) throw Error("saddle AMG: refresh with a matrix of different size");
  levels_[0].K = K;
  build_coarse();
}

void SaddleAmg::build_coarse() {
  const bool reuse = levels_.size() > 1;
  const std::size_t old_count = levels_.size();
  for (std::size_t l = 0;; ++l) {
    Level& lv = levels_[l];
    lv.trivial = trivial_rows(lv.K);
    const bool last = reuse ? l + 1 == old_count : lv.K.rows <= opt_.coarse_size;
    if (last) {
      lv.map.clear();
      levels_.resize(l + 1);
      break;
    }
    const Index m = lv.m;
    if (!reuse) {
      const Aggregates agg = pairwise_aggregation(saddle_node_graph(lv.K, m), opt_.passes);
      lv.next_m = agg.count;
      lv.map.assign(4 * m, -1);
      for (Index v = 0; v < m; ++v) {
        for (int c = 0; c < 3; ++c)
          if (!lv.trivial[3 * v + c]) lv.map[3 * v + c] = 3 * agg.of[v] + c;
        if (!lv.trivial[3 * m + v]) lv.map[3 * m + v] = 3 * agg.count + agg.of[v];
      }
      const double ratio = static_cast<double>(m) / agg.count;
      if (ratio < 1.5)
        throw Error("saddle AMG: coarsening stagnated at level " + std::to_string(l) + " (" + std::to_string(m) +
                    " -> " + std::to_string(agg.count) +
                    " vertices); the matrix graph has too few strong connections");
    }
    const Index mc = lv.next_m;
    SparseMatrix kc = galerkin(lv.K, lv.map, 4 * mc);
    for (Index i = 3 * mc; i < 4 * mc; ++i)
      for (Index k = kc.row_ptr[i]; k < kc.row_ptr[i + 1]; ++k)
        if (kc.col[k] >= 3 * mc) kc.val[k] *= opt_.c_scale;
    if (reuse) {
      levels_[l + 1].K = std::move(kc);
    } else {
      Level next;
      next.m = mc;
      next.K = std::move(kc);
      levels_.push_back(std::move(next));
    }
  }
  for (auto& lv : levels_) setup_smoother(lv);
  coarse_ = dense_lu(levels_.back().K);
}

SparseMatrix SaddleAmg::prolongation(int l) const {
  return amg::prolongation(levels_[l].map, 4 * levels_[l].next_m);
}

void SaddleAmg::setup_smoother(Level& lv) const {
  const Index m = lv.m;
  const SparseMatrix& K = lv.K;
  std::vector<Index> u(3 * m), p(m);
  for (Index i = 0; i < 3 * m; ++i) u[i] = i;
  for (Index i = 0; i < m; ++i) p[i] = 3 * m + i;
  if (opt_.smoother == Smoother::BraessSarazin) {
    lv.inv_at.assign(3 * m, 0.0);
    for (Index i = 0; i < 3 * m; ++i) {
      const double d = K.coeff(i, i);
      if (!(d > 0.0)) throw Error("Braess-Sarazin: non-positive velocity diagonal at dof " + std::to_string(i));
      lv.inv_at[i] = 1.0 / (2.0 * d);
    }
    lv.b1t = extract(K, u, p);
    lv.b2 = extract(K, p, u);
    const SparseMatrix kpp = extract(K, p, p);
    // S = B2 At^{-1} B1^T + C with C = -Kpp.
    lv.schur = add(multiply(lv.b2, scale_rows(lv.b1t, lv.inv_at)), kpp, 1.0, -1.0);
    lv.schur_dense = opt_.exact_schur || m <= opt_.coarse_size;
    if (lv.schur_dense)
      lv.schur_lu = dense_lu(lv.schur);
    else
      lv.schur_amg = ScalarAmg(lv.schur, {.coarse_size = opt_.coarse_size, .passes = opt_.passes});
    return;
  }
  // Vanka patches: one pressure dof and the velocity dofs of its B2 row.
  lv.patches.clear();
  lv.patches.reserve(m);
  std::vector<Index> pos(K.rows, -1);
  for (Index v = 0; v < m; ++v) {
    const Index pi = 3 * m + v;
    if (lv.trivial[pi]) continue;
    Patch patch;
    for (Index k = K.row_ptr[pi]; k < K.row_ptr[pi + 1]; ++k) {
      const Index j = K.col[k];
      if (j < 3 * m && !lv.trivial[j]) patch.dofs.push_back(j);
    }
    patch.dofs.push_back(pi);
    const Index n = static_cast<Index>(patch.dofs.size());
    for (Index a = 0; a < n; ++a) pos[patch.dofs[a]] = a;
    Eigen::MatrixXd loc = Eigen::MatrixXd::Zero(n, n);
    for (Index a = 0; a < n; ++a) {
      const Index i = patch.dofs[a];
      for (Index k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k)
        if (pos[K.col[k]] >= 0) loc(a, pos[K.col[k]]) = K.val[k];
    }
    for (Index a = 0; a < n; ++a) pos[patch.dofs[a]] = -1;
    patch.lu.compute(loc);
    const double piv = patch.lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(piv > 1e-14 * loc.cwiseAbs().maxCoeff()))
      throw Error("Vanka: singular local matrix for the patch of pressure dof " + std::to_string(v));
    lv.patches.push_back(std::move(patch));
  }
}

void SaddleAmg::braess_sarazin(const Level& lv, std::span<const double> b, std::span<double> x, int steps) const {
  const Index m = lv.m, nu = 3 * m;
  Vec r(lv.K.rows), du(nu), rs(m), dp(m), t(nu);
  for (int s = 0; s < steps; ++s) {
    kernels::residual(lv.K, x, b, r);
    for (Index i = 0; i < nu; ++i) {
      du[i] = lv.inv_at[i] * r[i];
      x[i] += du[i];
    }
    // rs = r_p - B2 du; S dp = -rs
    lv.b2.multiply(du, rs);
    for (Index i = 0; i < m; ++i) rs[i] = -(r[nu + i] - rs[i]);
    if (lv.schur_dense)
      dense_solve(lv.schur_lu, rs, dp);
    else
      lv.schur_amg.apply(rs, dp, opt_.schur_cycles);
    for (Index i = 0; i < m; ++i) x[nu + i] += dp[i];
    lv.b1t.multiply(dp, t);
    for (Index i = 0; i < nu; ++i) x[i] -= lv.inv_at[i] * t[i];
  }
}

void SaddleAmg::vanka(const Level& lv, std::span<const double> b, std::span<double> x, int steps) const {
  const SparseMatrix& K = lv.K;
  Eigen::VectorXd r, d;
  for (int s = 0; s < steps; ++s) {
    for (const Patch& patch : lv.patches) {
      const Index n = static_cast<Index>(patch.dofs.size());
      r.resize(n);
      for (Index a = 0; a < n; ++a) {
        const Index i = patch.dofs[a];
        double sum = b[i];
        for (Index k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k) sum -= K.val[k] * x[K.col[k]];
        r[a] = sum;
      }
      d = patch.lu.solve(r);
      for (Index a = 0; a < n; ++a) x[patch.dofs[a]] += opt_.omega * d[a];
    }
  }
}

void SaddleAmg::smooth(int level, std::span<const double> b, std::span<double> x, int steps) const {
  const Level& lv = levels_[level];
  for (Index i = 0; i < lv.K.rows; ++i)
    if (lv.trivial[i]) x[i] = b[i] / lv.K.coeff(i, i);
  if (opt_.smoother == Smoother::BraessSarazin)
    braess_sarazin(lv, b, x, steps);
  else
    vanka(lv, b, x, steps);
}

void SaddleAmg::cycle(int l, std::span<const double> b, std::span<double> x) const {
  const Level& lv = levels_[l];
  if (l + 1 == num_levels()) {
    dense_solve(coarse_, b, x);
    return;
  }
  smooth(l, b, x, opt_.steps);
  Vec r(lv.K.rows);
  kernels::residual(lv.K, x, b, r);
  const Index nc = 4 * lv.next_m;
  Vec rc(nc), ec(nc, 0.0);
  restrict_add(lv.map, r, rc);
  cycle(l + 1, rc, ec);
  prolong_add(lv.map, ec, x);
  smooth(l, b, x, opt_.steps);
}

void SaddleAmg::vcycle(std::span<const double> b, std::span<double> x) const { cycle(0, b, x); }

LinearResult SaddleAmg::solve(std::span<const double> b, std::span<double> x, double tol, int max_cycles) const {
  const SparseMatrix& K = levels_[0].K;
  Vec r(K.rows);
  const double nb = kernels::norm2(b);
  if (nb == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return {0, true, 0.0};
  }
  kernels::residual(K, x, b, r);
  double red = kernels::norm2(r) / nb;
  int it = 0;
  while (red > tol && it < max_cycles) {
    cycle(0, b, x);
    ++it;
    kernels::residual(K, x, b, r);
    red = kernels::norm2(r) / nb;
    if (!std::isfinite(red)) break;
  }
  return {it, red <= tol, red};
}

}  // namespace fsi::amg
