#pragma once

#include <span>
#include <vector>

#include "fsikit/common.hpp"

namespace fsi {

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row and no entry is
/// stored twice. Explicit zeros are allowed (the assembled patterns keep
/// them so that values can be refreshed in place).
struct SparseMatrix {
  Index rows = 0;
  Index cols = 0;
  std::vector<Index> row_ptr{0};
  std::vector<Index> col;
  std::vector<double> val;

  SparseMatrix() = default;
  SparseMatrix(Index r, Index c) : rows(r), cols(c), row_ptr(static_cast<std::size_t>(r) + 1, 0) {}

  std::size_t nnz() const { return col.size(); }

  /// Value at (i, j), zero when not stored. Binary search in the row.
  double coeff(Index i, Index j) const;
  /// Position of (i, j) in col/val or -1.
  std::ptrdiff_t find(Index i, Index j) const;

  /// y = A x (OpenMP parallel over rows).
  void multiply(std::span<const double> x, std::span<double> y) const;
  Vec operator*(std::span<const double> x) const;
  /// y = A^T x.
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

  Vec diagonal() const;
  SparseMatrix transpose() const;
  Eigen::MatrixXd to_dense() const;

  /// Throws if the structural invariants are violated.
  void check_structure() const;

  static SparseMatrix identity(Index n);
};

/// Accumulates (i, j, v) triplets; duplicates are summed on build.
class TripletBuilder {
 public:
  TripletBuilder(Index rows, Index cols) : rows_(rows), cols_(cols) {}
  void add(Index i, Index j, double v) { entries_.push_back({i, j, v}); }
  void reserve(std::size_t n) { entries_.reserve(n); }
  /// Builds the CSR matrix. Entries that sum to zero are kept unless
  /// drop_zeros is set.
  SparseMatrix build(bool drop_zeros = false) const;

 private:
  struct Entry {
    Index i, j;
    double v;
  };
  Index rows_, cols_;
  std::vector<Entry> entries_;
};

/// C = A * B.
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
/// alpha * A + beta * B.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0, double beta = 1.0);
/// Scales row i by d[i].
SparseMatrix scale_rows(const SparseMatrix& a, std::span<const double> d);
SparseMatrix from_dense(const Eigen::MatrixXd& m, double drop_tol = 0.0);
/// Submatrix with the given rows and columns (index lists must be sorted).
SparseMatrix extract(const SparseMatrix& a, std::span<const Index> rows, std::span<const Index> cols);
/// Infinity norm (max absolute row sum).
double norm_inf(const SparseMatrix& a);

}  // namespace fsi
