#pragma once

// Data-parallel vector and matrix kernels.
//
// The functions in fsi::kernels use OpenMP and are what the solvers call.
// fsi::kernels::reference holds plain serial loops with the same contracts;
// they are kept for the test suite and the benchmark target.
//
// Reductions are split into fixed-size chunks whose partial sums are added
// in chunk order, so results do not depend on the thread count.

#include <span>

#include "fsikit/sparse.hpp"

namespace fsi::kernels {

inline constexpr std::size_t kChunk = 4096;

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
/// y = x + b * y
void xpby(std::span<const double> x, double b, std::span<double> y);
void scale(double a, std::span<double> x);
/// y = A x
void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
/// r = b - A x
void residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b,
              std::span<double> r);

namespace reference {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y);
void residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b,
              std::span<double> r);
}  // namespace reference

}  // namespace fsi::kernels
