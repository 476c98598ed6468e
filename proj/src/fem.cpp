#include "fsikit/fem.hpp"

#include <cmath>
#include <numeric>

#include "fsikit/kernels.hpp"

namespace fsi::fem {

ElementGeometry element_geometry(const std::array<Vec3, 4>& x, Index id) {
  Mat3 J;
  J.col(0) = x[1] - x[0];
  J.col(1) = x[2] - x[0];
  J.col(2) = x[3] - x[0];
  const double det = J.determinant();
  if (!(det > 0.0)) throw ElementInversion(id, "non-positive volume " + std::to_string(det / 6.0));
  ElementGeometry g;
  g.volume = det / 6.0;
  g.h = std::cbrt(6.0 * g.volume);
  // Rows of J^{-1} are the gradients of barycentric coordinates 1..3.
  const Mat3 Jinv = J.inverse();
  for (int a = 1; a < 4; ++a) g.grad[a] = Jinv.row(a - 1).transpose();
  g.grad[0] = -(g.grad[1] + g.grad[2] + g.grad[3]);
  return g;
}

ElementGeometry element_geometry(std::span<const Vec3> coords, const std::array<Index, 4>& tet, Index id) {
  return element_geometry({coords[tet[0]], coords[tet[1]], coords[tet[2]], coords[tet[3]]}, id);
}

std::vector<Index> DofMap::fixed_dofs() const {
  std::vector<Index> d;
  for (Index i = 0; i < size(); ++i)
    if (fixed[i]) d.push_back(i);
  return d;
}

namespace {

std::vector<Index> iota_range(Index b, Index e) {
  std::vector<Index> v(static_cast<std::size_t>(e - b));
  std::iota(v.begin(), v.end(), b);
  return v;
}

}  // namespace

SparseMatrix BlockSaddleSystem::A() const {
  const auto u = iota_range(0, 3 * m);
  return extract(K, u, u);
}

SparseMatrix BlockSaddleSystem::B1() const {
  return extract(K, iota_range(0, 3 * m), iota_range(3 * m, 4 * m)).transpose();
}

SparseMatrix BlockSaddleSystem::B2() const {
  return extract(K, iota_range(3 * m, 4 * m), iota_range(0, 3 * m));
}

SparseMatrix BlockSaddleSystem::C() const {
  SparseMatrix c = extract(K, iota_range(3 * m, 4 * m), iota_range(3 * m, 4 * m));
  for (double& v : c.val) v = -v;
  return c;
}

SparseMatrix compose(const SparseMatrix& a, const SparseMatrix& b1, const SparseMatrix& b2,
                     const SparseMatrix& c) {
  const Index nu = a.rows, np = c.rows;
  TripletBuilder tb(nu + np, nu + np);
  tb.reserve(a.nnz() + 2 * b1.nnz() + c.nnz());
  for (Index i = 0; i < nu; ++i)
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) tb.add(i, a.col[k], a.val[k]);
  for (Index i = 0; i < np; ++i) {
    for (Index k = b1.row_ptr[i]; k < b1.row_ptr[i + 1]; ++k) tb.add(b1.col[k], nu + i, b1.val[k]);
    for (Index k = b2.row_ptr[i]; k < b2.row_ptr[i + 1]; ++k) tb.add(nu + i, b2.col[k], b2.val[k]);
    for (Index k = c.row_ptr[i]; k < c.row_ptr[i + 1]; ++k) tb.add(nu + i, nu + c.col[k], -c.val[k]);
  }
  return tb.build();
}

SparseMatrix vertex_graph(const Tets& tets, Index num_vertices) {
  TripletBuilder tb(num_vertices, num_vertices);
  tb.reserve(tets.size() * 16);
  for (const auto& t : tets)
    for (Index a : t)
      for (Index b : t) tb.add(a, b, 0.0);
  return tb.build();
}

Assembler::Assembler(const Tets& tets, Index num_vertices) : m_(num_vertices), tets_(tets) {
  const SparseMatrix g = vertex_graph(tets, num_vertices);
  const Index m = num_vertices;
  pattern_ = SparseMatrix(4 * m, 4 * m);
  std::vector<Index> nnz_row(4 * m);
  for (Index i = 0; i < m; ++i) {
    const Index deg = g.row_ptr[i + 1] - g.row_ptr[i];
    for (int c = 0; c < 4; ++c) nnz_row[c < 3 ? 3 * i + c : 3 * m + i] = 4 * deg;
  }
  for (Index r = 0; r < 4 * m; ++r) pattern_.row_ptr[r + 1] = pattern_.row_ptr[r] + nnz_row[r];
  pattern_.col.resize(pattern_.row_ptr.back());
  pattern_.val.assign(pattern_.row_ptr.back(), 0.0);
  for (Index r = 0; r < 4 * m; ++r) {
    const Index v = r < 3 * m ? r / 3 : r - 3 * m;
    Index pos = pattern_.row_ptr[r];
    for (Index k = g.row_ptr[v]; k < g.row_ptr[v + 1]; ++k)
      for (int c = 0; c < 3; ++c) pattern_.col[pos++] = 3 * g.col[k] + c;
    for (Index k = g.row_ptr[v]; k < g.row_ptr[v + 1]; ++k) pattern_.col[pos++] = 3 * m + g.col[k];
  }

  auto gdof = [m](const std::array<Index, 4>& t, int l) { return l < 12 ? 3 * t[l / 3] + l % 3 : 3 * m + t[l - 12]; };
  slots_.resize(tets.size() * 256);
  for (std::size_t e = 0; e < tets.size(); ++e) {
    for (int i = 0; i < 16; ++i) {
      const Index gi = gdof(tets[e], i);
      for (int j = 0; j < 16; ++j) {
        const auto pos = pattern_.find(gi, gdof(tets[e], j));
        slots_[e * 256 + i * 16 + j] = static_cast<Index>(pos);
      }
    }
  }
}

void Assembler::scatter(Index e, const LocalMatrix& ke, const LocalVector& re, SparseMatrix* K, Vec& r) const {
  const auto& t = tets_[e];
  for (int i = 0; i < 16; ++i) {
    const Index gi = i < 12 ? 3 * t[i / 3] + i % 3 : 3 * m_ + t[i - 12];
    r[gi] += re[i];
  }
  if (!K) return;
  const Index* s = slots_.data() + static_cast<std::size_t>(e) * 256;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) K->val[s[i * 16 + j]] += ke(i, j);
}

namespace {

template <class Local>
SparseMatrix assemble_scalar(std::span<const Vec3> coords, const Tets& tets, Local&& local) {
  SparseMatrix g = vertex_graph(tets, static_cast<Index>(coords.size()));
  for (std::size_t e = 0; e < tets.size(); ++e) {
    const auto geo = element_geometry(coords, tets[e], static_cast<Index>(e));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) g.val[g.find(tets[e][a], tets[e][b])] += local(geo, a, b);
  }
  return g;
}

}  // namespace

SparseMatrix scalar_mass(std::span<const Vec3> coords, const Tets& tets) {
  return assemble_scalar(coords, tets, [](const ElementGeometry& g, int a, int b) {
    return g.volume / 20.0 * (a == b ? 2.0 : 1.0);
  });
}

SparseMatrix scalar_laplacian(std::span<const Vec3> coords, const Tets& tets) {
  return assemble_scalar(coords, tets, [](const ElementGeometry& g, int a, int b) {
    return g.volume * g.grad[a].dot(g.grad[b]);
  });
}

SparseMatrix vector_mass(const SparseMatrix& s) {
  SparseMatrix v(3 * s.rows, 3 * s.cols);
  for (Index i = 0; i < s.rows; ++i) {
    for (int c = 0; c < 3; ++c) {
      for (Index k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k) {
        v.col.push_back(3 * s.col[k] + c);
        v.val.push_back(s.val[k]);
      }
      v.row_ptr[3 * i + c + 1] = static_cast<Index>(v.col.size());
    }
  }
  return v;
}

MassMatrices mass_matrices(std::span<const Vec3> coords, const Tets& tets) {
  MassMatrices mm;
  mm.M2 = scalar_mass(coords, tets);
  mm.M1 = vector_mass(mm.M2);
  return mm;
}

double weighted_norm(const SparseMatrix& M, std::span<const double> x) {
  Vec y(M.rows);
  M.multiply(x, y);
  const double q = kernels::dot(x, y);
  if (q < 0.0) {
    // Tolerate round-off around zero only.
    if (q > -1e-14 * kernels::dot(x, x)) return 0.0;
    throw Error("weighted_norm: negative quadratic form " + std::to_string(q));
  }
  return std::sqrt(q);
}

double saddle_norm(const SparseMatrix& M, std::span<const double> x) {
  const Index m = M.rows;
  double s = 0.0;
  Vec comp(m), y(m);
  for (int c = 0; c < 4; ++c) {
    for (Index v = 0; v < m; ++v) comp[v] = c < 3 ? x[3 * v + c] : x[3 * m + v];
    M.multiply(comp, y);
    s += kernels::dot(comp, y);
  }
  if (s < 0.0) throw Error("saddle_norm: negative quadratic form");
  return std::sqrt(s);
}

void apply_dirichlet(SparseMatrix& K, Vec& rhs, std::span<const char> fixed, std::span<const double> values) {
  for (Index i = 0; i < K.rows; ++i) {
    for (Index k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k) {
      const Index j = K.col[k];
      if (fixed[i]) {
        K.val[k] = (i == j) ? 1.0 : 0.0;
      } else if (fixed[j]) {
        rhs[i] -= K.val[k] * values[j];
        K.val[k] = 0.0;
      }
    }
  }
  for (Index i = 0; i < K.rows; ++i)
    if (fixed[i]) rhs[i] = values[i];
}

}  // namespace fsi::fem
