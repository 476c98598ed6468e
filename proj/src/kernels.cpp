#include "fsikit/kernels.hpp"

#include <cmath>
#include <vector>

namespace fsi::kernels {

namespace {

constexpr std::ptrdiff_t kParallelThreshold = 8192;

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  if (nchunks <= 1) return reference::dot(x, y);
  std::vector<double> partial(nchunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
    const std::size_t b = static_cast<std::size_t>(c) * kChunk;
    const std::size_t e = std::min(n, b + kChunk);
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += x[i] * y[i];
    partial[c] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby(std::span<const double> x, double b, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

void scale(double a, std::span<double> x) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) x[i] *= a;
}

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  const std::ptrdiff_t n = a.rows;
#pragma omp parallel for schedule(static) if (n > kParallelThreshold / 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.val[k] * x[a.col[k]];
    y[i] = s;
  }
}

void residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b,
              std::span<double> r) {
  const std::ptrdiff_t n = a.rows;
#pragma omp parallel for schedule(static) if (n > kParallelThreshold / 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double s = b[i];
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s -= a.val[k] * x[a.col[k]];
    r[i] = s;
  }
}

namespace reference {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  for (Index i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.val[k] * x[a.col[k]];
    y[i] = s;
  }
}

void residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b,
              std::span<double> r) {
  for (Index i = 0; i < a.rows; ++i) {
    double s = b[i];
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s -= a.val[k] * x[a.col[k]];
    r[i] = s;
  }
}

}  // namespace reference
}  // namespace fsi::kernels
