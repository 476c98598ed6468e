#include "fsikit/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fsikit/kernels.hpp"

namespace fsi {

std::ptrdiff_t SparseMatrix::find(Index i, Index j) const {
  const auto b = col.begin() + row_ptr[i];
  const auto e = col.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return -1;
  return it - col.begin();
}

double SparseMatrix::coeff(Index i, Index j) const {
  const auto k = find(i, j);
  return k < 0 ? 0.0 : val[k];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  kernels::spmv(*this, x, y);
}

Vec SparseMatrix::operator*(std::span<const double> x) const {
  Vec y(rows);
  multiply(x, y);
  return y;
}

void SparseMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (Index i = 0; i < rows; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) y[col[k]] += val[k] * xi;
  }
}

Vec SparseMatrix::diagonal() const {
  Vec d(std::min(rows, cols), 0.0);
  for (Index i = 0; i < static_cast<Index>(d.size()); ++i) d[i] = coeff(i, i);
  return d;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols, rows);
  std::vector<Index> count(cols + 1, 0);
  for (Index c : col) ++count[c + 1];
  std::partial_sum(count.begin(), count.end(), t.row_ptr.begin());
  t.col.resize(nnz());
  t.val.resize(nnz());
  std::vector<Index> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (Index i = 0; i < rows; ++i) {
    for (Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const Index pos = next[col[k]]++;
      t.col[pos] = i;
      t.val[pos] = val[k];
    }
  }
  return t;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) m(i, col[k]) += val[k];
  return m;
}

void SparseMatrix::check_structure() const {
  if (row_ptr.size() != static_cast<std::size_t>(rows) + 1 || row_ptr.front() != 0)
    throw Error("sparse matrix: bad row pointer array");
  if (col.size() != val.size() || static_cast<std::size_t>(row_ptr.back()) != col.size())
    throw Error("sparse matrix: column/value arrays do not match row pointers");
  for (Index i = 0; i < rows; ++i) {
    if (row_ptr[i + 1] < row_ptr[i]) throw Error("sparse matrix: decreasing row offsets");
    for (Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col[k] < 0 || col[k] >= cols) throw Error("sparse matrix: column index out of range");
      if (k > row_ptr[i] && col[k] <= col[k - 1])
        throw Error("sparse matrix: columns not strictly increasing in row " + std::to_string(i));
    }
  }
}

SparseMatrix SparseMatrix::identity(Index n) {
  SparseMatrix m(n, n);
  m.col.resize(n);
  m.val.assign(n, 1.0);
  for (Index i = 0; i < n; ++i) {
    m.row_ptr[i + 1] = i + 1;
    m.col[i] = i;
  }
  return m;
}

SparseMatrix TripletBuilder::build(bool drop_zeros) const {
  SparseMatrix m(rows_, cols_);
  std::vector<Index> count(rows_ + 1, 0);
  for (const auto& e : entries_) ++count[e.i + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<Index> order(entries_.size());
  {
    std::vector<Index> next(count.begin(), count.end() - 1);
    for (Index k = 0; k < static_cast<Index>(entries_.size()); ++k) order[next[entries_[k].i]++] = k;
  }
  m.col.reserve(entries_.size());
  m.val.reserve(entries_.size());
  std::vector<std::pair<Index, double>> row;
  for (Index i = 0; i < rows_; ++i) {
    row.clear();
    for (Index p = count[i]; p < count[i + 1]; ++p) {
      const auto& e = entries_[order[p]];
      row.emplace_back(e.j, e.v);
    }
    std::stable_sort(row.begin(), row.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t k = 0;
    while (k < row.size()) {
      const Index j = row[k].first;
      double s = 0.0;
      while (k < row.size() && row[k].first == j) s += row[k++].second;
      if (drop_zeros && s == 0.0) continue;
      m.col.push_back(j);
      m.val.push_back(s);
    }
    m.row_ptr[i + 1] = static_cast<Index>(m.col.size());
  }
  return m;
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols != b.rows) throw Error("sparse multiply: dimension mismatch");
  SparseMatrix c(a.rows, b.cols);
  std::vector<double> acc(b.cols, 0.0);
  std::vector<Index> marker(b.cols, -1);
  std::vector<Index> cols;
  for (Index i = 0; i < a.rows; ++i) {
    cols.clear();
    for (Index ka = a.row_ptr[i]; ka < a.row_ptr[i + 1]; ++ka) {
      const Index k = a.col[ka];
      const double av = a.val[ka];
      for (Index kb = b.row_ptr[k]; kb < b.row_ptr[k + 1]; ++kb) {
        const Index j = b.col[kb];
        if (marker[j] != i) {
          marker[j] = i;
          acc[j] = 0.0;
          cols.push_back(j);
        }
        acc[j] += av * b.val[kb];
      }
    }
    std::sort(cols.begin(), cols.end());
    for (Index j : cols) {
      c.col.push_back(j);
      c.val.push_back(acc[j]);
    }
    c.row_ptr[i + 1] = static_cast<Index>(c.col.size());
  }
  return c;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  if (a.rows != b.rows || a.cols != b.cols) throw Error("sparse add: dimension mismatch");
  SparseMatrix c(a.rows, a.cols);
  c.col.reserve(a.nnz() + b.nnz());
  c.val.reserve(a.nnz() + b.nnz());
  for (Index i = 0; i < a.rows; ++i) {
    Index ka = a.row_ptr[i], kb = b.row_ptr[i];
    const Index ea = a.row_ptr[i + 1], eb = b.row_ptr[i + 1];
    while (ka < ea || kb < eb) {
      if (kb >= eb || (ka < ea && a.col[ka] < b.col[kb])) {
        c.col.push_back(a.col[ka]);
        c.val.push_back(alpha * a.val[ka++]);
      } else if (ka >= ea || b.col[kb] < a.col[ka]) {
        c.col.push_back(b.col[kb]);
        c.val.push_back(beta * b.val[kb++]);
      } else {
        c.col.push_back(a.col[ka]);
        c.val.push_back(alpha * a.val[ka++] + beta * b.val[kb++]);
      }
    }
    c.row_ptr[i + 1] = static_cast<Index>(c.col.size());
  }
  return c;
}

SparseMatrix scale_rows(const SparseMatrix& a, std::span<const double> d) {
  SparseMatrix c = a;
  for (Index i = 0; i < a.rows; ++i)
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) c.val[k] *= d[i];
  return c;
}

SparseMatrix from_dense(const Eigen::MatrixXd& m, double drop_tol) {
  SparseMatrix s(static_cast<Index>(m.rows()), static_cast<Index>(m.cols()));
  for (Index i = 0; i < s.rows; ++i) {
    for (Index j = 0; j < s.cols; ++j) {
      if (std::abs(m(i, j)) > drop_tol) {
        s.col.push_back(j);
        s.val.push_back(m(i, j));
      }
    }
    s.row_ptr[i + 1] = static_cast<Index>(s.col.size());
  }
  return s;
}

SparseMatrix extract(const SparseMatrix& a, std::span<const Index> rows, std::span<const Index> cols) {
  std::vector<Index> cmap(a.cols, -1);
  for (Index k = 0; k < static_cast<Index>(cols.size()); ++k) cmap[cols[k]] = k;
  SparseMatrix s(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (Index r = 0; r < s.rows; ++r) {
    const Index i = rows[r];
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const Index j = cmap[a.col[k]];
      if (j >= 0) {
        s.col.push_back(j);
        s.val.push_back(a.val[k]);
      }
    }
    s.row_ptr[r + 1] = static_cast<Index>(s.col.size());
  }
  return s;
}

double norm_inf(const SparseMatrix& a) {
  double m = 0.0;
  for (Index i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += std::abs(a.val[k]);
    m = std::max(m, s);
  }
  return m;
}

}  // namespace fsi
