#pragma once

// P1 tetrahedral finite elements: element geometry, dof layout, assembly of
// 16x16 element blocks into the global saddle-point matrix, mass matrices.
//
// Global dof layout for a field with m vertices:
//   [u_0x u_0y u_0z u_1x ... u_(m-1)z | p_0 ... p_(m-1)]
// i.e. vector dof (v, c) at 3v + c and pressure dof of v at 3m + v.
// Element-local layout is the same with m = 4: (a, c) at 3a + c, p_a at 12 + a.

#include <algorithm>
#include <array>
#include <exception>
#include <span>
#include <vector>

#include "fsikit/common.hpp"
#include "fsikit/sparse.hpp"

namespace fsi::fem {

using Tets = std::vector<std::array<Index, 4>>;
using LocalMatrix = Eigen::Matrix<double, 16, 16>;
using LocalVector = Eigen::Matrix<double, 16, 1>;

inline constexpr int lv(int a, int c) { return 3 * a + c; }
inline constexpr int lp(int a) { return 12 + a; }

struct ElementGeometry {
  std::array<Vec3, 4> grad;  ///< shape-function gradients, 1/mm
  double volume = 0.0;       ///< mm^3
  double h = 0.0;            ///< (6 volume)^(1/3), mm
};

/// Throws ElementInversion (with the given id) if the volume is not positive.
ElementGeometry element_geometry(const std::array<Vec3, 4>& x, Index id = -1);
ElementGeometry element_geometry(std::span<const Vec3> coords, const std::array<Index, 4>& tet, Index id);

/// Symmetric 4-point rule, degree 2: barycentric points, weights V/4.
inline constexpr double kQuadA = 0.5854101966249685;
inline constexpr double kQuadB = 0.1381966011250105;
inline constexpr std::array<std::array<double, 4>, 4> kQuadPoints{{{kQuadA, kQuadB, kQuadB, kQuadB},
                                                                   {kQuadB, kQuadA, kQuadB, kQuadB},
                                                                   {kQuadB, kQuadB, kQuadA, kQuadB},
                                                                   {kQuadB, kQuadB, kQuadB, kQuadA}}};

struct DofMap {
  Index m = 0;  ///< vertices
  std::vector<char> fixed;
  Vec value;  ///< prescribed values where fixed

  DofMap() = default;
  explicit DofMap(Index num_vertices)
      : m(num_vertices), fixed(static_cast<std::size_t>(4 * num_vertices), 0),
        value(static_cast<std::size_t>(4 * num_vertices), 0.0) {}

  Index size() const { return 4 * m; }
  Index num_vector() const { return 3 * m; }
  Index vel(Index v, int c) const { return 3 * v + c; }
  Index pres(Index v) const { return 3 * m + v; }
  bool is_pressure(Index dof) const { return dof >= 3 * m; }
  Index vertex(Index dof) const { return dof < 3 * m ? dof / 3 : dof - 3 * m; }

  void constrain(Index dof, double v) {
    fixed[dof] = 1;
    value[dof] = v;
  }
  std::vector<Index> fixed_dofs() const;
};

/// K = [A B1^T; B2 -C] with residual r = [r1; r2]. Newton solves K delta = -r.
struct BlockSaddleSystem {
  Index m = 0;
  SparseMatrix K;
  Vec r;

  SparseMatrix A() const;
  SparseMatrix B1() const;
  SparseMatrix B2() const;
  SparseMatrix C() const;
  std::span<const double> r1() const { return {r.data(), static_cast<std::size_t>(3 * m)}; }
  std::span<const double> r2() const { return {r.data() + 3 * m, static_cast<std::size_t>(m)}; }
};

/// Monolithic matrix from blocks (inverse of the accessors above).
SparseMatrix compose(const SparseMatrix& a, const SparseMatrix& b1, const SparseMatrix& b2,
                     const SparseMatrix& c);

/// Sorted vertex adjacency (including the diagonal) of a tet mesh.
SparseMatrix vertex_graph(const Tets& tets, Index num_vertices);

/// Assembles element blocks into a fixed CSR pattern.
///
/// Element contributions are evaluated in parallel and scattered serially in
/// element order, so results are bitwise identical for any thread count.
class Assembler {
 public:
  Assembler() = default;
  Assembler(const Tets& tets, Index num_vertices);

  Index num_vertices() const { return m_; }
  const SparseMatrix& pattern() const { return pattern_; }

  /// kernel(e, K_e, r_e, need_matrix) fills the local block and residual.
  template <class Kernel>
  void assemble(Kernel&& kernel, SparseMatrix* K, Vec& r) const;

  /// Kernels that return only residual entries (K_e ignored).
  template <class Kernel>
  Vec residual(Kernel&& kernel) const {
    Vec r;
    assemble(kernel, nullptr, r);
    return r;
  }

 private:
  static constexpr Index kChunk = 2048;
  void scatter(Index e, const LocalMatrix& ke, const LocalVector& re, SparseMatrix* K, Vec& r) const;

  Index m_ = 0;
  Tets tets_;
  SparseMatrix pattern_;
  std::vector<Index> slots_;  // 256 positions per element, row-major local order
};

template <class Kernel>
void Assembler::assemble(Kernel&& kernel, SparseMatrix* K, Vec& r) const {
  const Index ne = static_cast<Index>(tets_.size());
  if (K) {
    if (K->rows != pattern_.rows || K->nnz() != pattern_.nnz()) *K = pattern_;
    std::fill(K->val.begin(), K->val.end(), 0.0);
  }
  r.assign(static_cast<std::size_t>(4 * m_), 0.0);
  std::vector<LocalMatrix> kb(kChunk);
  std::vector<LocalVector> rb(kChunk);
  std::vector<char> bad(kChunk);
  for (Index start = 0; start < ne; start += kChunk) {
    const Index n = std::min(kChunk, ne - start);
    // Exceptions cannot cross the parallel region; capture the first one.
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 64)
    for (Index i = 0; i < n; ++i) {
      try {
        kb[i].setZero();
        rb[i].setZero();
        kernel(start + i, kb[i], rb[i], K != nullptr);
        bad[i] = !(rb[i].allFinite() && (!K || kb[i].allFinite()));
      } catch (...) {
#pragma omp critical(fsikit_assembly_error)
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    for (Index i = 0; i < n; ++i) {
      if (bad[i]) throw Error("non-finite element contribution in element " + std::to_string(start + i));
      scatter(start + i, kb[i], rb[i], K, r);
    }
  }
}

/// Scalar P1 mass matrix: V/20 (1 + delta_ij) per element.
SparseMatrix scalar_mass(std::span<const Vec3> coords, const Tets& tets);
/// Scalar P1 stiffness matrix: V grad_i . grad_j per element.
SparseMatrix scalar_laplacian(std::span<const Vec3> coords, const Tets& tets);
/// Block-diagonal vector mass for the 3v+c layout.
SparseMatrix vector_mass(const SparseMatrix& scalar);

struct MassMatrices {
  SparseMatrix M1;  ///< 3m x 3m vector mass
  SparseMatrix M2;  ///< m x m pressure mass
};
MassMatrices mass_matrices(std::span<const Vec3> coords, const Tets& tets);

/// sqrt(x^T M x); throws if the quadratic form is negative.
double weighted_norm(const SparseMatrix& M, std::span<const double> x);
/// Norm of a saddle vector [x_u; x_p] under diag(M1, M2) given the scalar mass.
double saddle_norm(const SparseMatrix& scalar_mass, std::span<const double> x);

/// In-place Dirichlet elimination: constrained rows and columns become
/// identity, rhs of free rows is corrected by the eliminated columns and
/// constrained rhs entries are set to the given values. Idempotent.
void apply_dirichlet(SparseMatrix& K, Vec& rhs, std::span<const char> fixed, std::span<const double> values);

}  // namespace fsi::fem
