// Parallel kernels vs the serial reference loops.
//
//   ./bench_kernels --benchmark_filter=Spmv
//   OMP_NUM_THREADS=4 ./bench_kernels

#include <benchmark/benchmark.h>

#include <random>

#include "fsikit/kernels.hpp"
#include "fsikit/mesh.hpp"
#include "fsikit/fem.hpp"

namespace {

using namespace fsi;

Vec random_vec(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1, 1);
  Vec v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

const SparseMatrix& tube_matrix() {
  static const SparseMatrix k = [] {
    const auto m = mesh::generate_tube_mesh(mesh::TubeParams{});
    const auto s = mesh::structure_submesh(m);
    fem::Assembler as(s.tets, s.num_vertices());
    SparseMatrix a = as.pattern();
    for (std::size_t i = 0; i < a.val.size(); ++i) a.val[i] = 1.0 / (1.0 + static_cast<double>(i % 7));
    return a;
  }();
  return k;
}

void BM_Dot(benchmark::State& st) {
  const Vec x = random_vec(st.range(0), 1), y = random_vec(st.range(0), 2);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::dot(x, y));
}
void BM_DotReference(benchmark::State& st) {
  const Vec x = random_vec(st.range(0), 1), y = random_vec(st.range(0), 2);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::reference::dot(x, y));
}
void BM_Axpy(benchmark::State& st) {
  const Vec x = random_vec(st.range(0), 1);
  Vec y = random_vec(st.range(0), 2);
  for (auto _ : st) {
    kernels::axpy(1e-3, x, y);
    benchmark::ClobberMemory();
  }
}
void BM_AxpyReference(benchmark::State& st) {
  const Vec x = random_vec(st.range(0), 1);
  Vec y = random_vec(st.range(0), 2);
  for (auto _ : st) {
    kernels::reference::axpy(1e-3, x, y);
    benchmark::ClobberMemory();
  }
}
void BM_Spmv(benchmark::State& st) {
  const auto& a = tube_matrix();
  const Vec x = random_vec(a.cols, 3);
  Vec y(a.rows);
  for (auto _ : st) {
    kernels::spmv(a, x, y);
    benchmark::ClobberMemory();
  }
  st.counters["nnz"] = static_cast<double>(a.nnz());
}
void BM_SpmvReference(benchmark::State& st) {
  const auto& a = tube_matrix();
  const Vec x = random_vec(a.cols, 3);
  Vec y(a.rows);
  for (auto _ : st) {
    kernels::reference::spmv(a, x, y);
    benchmark::ClobberMemory();
  }
}

BENCHMARK(BM_Dot)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_DotReference)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Axpy)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_AxpyReference)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Spmv);
BENCHMARK(BM_SpmvReference);

}  // namespace

BENCHMARK_MAIN();
