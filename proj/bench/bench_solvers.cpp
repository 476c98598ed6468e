// Assembly and AMG costs on the desk-scale tube (first Newton step systems).
//
//   ./bench_solvers --benchmark_filter=Vanka

#include <benchmark/benchmark.h>

#include "fsikit/amg.hpp"
#include "systems.hpp"

namespace {

using namespace fsi;

const mesh::Mesh& tube() {
  static const mesh::Mesh m = mesh::generate_tube_mesh(mesh::TubeParams{});
  return m;
}

const test::LinearSystem& fluid_system() {
  static const auto s = test::fluid_system(tube());
  return s;
}

const test::LinearSystem& structure_system() {
  static const auto s = test::structure_system(tube());
  return s;
}

amg::SaddleAmgOptions options(bool fluid) {
  if (fluid) return {.smoother = amg::Smoother::BraessSarazin, .steps = 8};
  return {.smoother = amg::Smoother::Vanka, .steps = 12, .omega = 0.78};
}

void BM_FluidAssembly(benchmark::State& st) {
  fluid::FluidProblem fp(mesh::fluid_submesh(tube()), fluid::FluidParams{});
  const Index m = fp.num_vertices();
  const Vec x(4 * m, 0.0), uo(3 * m, 0.0);
  fem::BlockSaddleSystem sys;
  for (auto _ : st) fp.assemble(x, uo, Vec3(0.0, 0.0, 1.332), sys);
}

void BM_StructureAssembly(benchmark::State& st) {
  structure::StructureProblem sp(mesh::structure_submesh(tube()), {});
  const Index m = sp.num_vertices();
  const Vec x(4 * m, 0.0), load = test::pressure_load(sp.mesh(), 1.332);
  const auto hist = structure::NewmarkState::zero(m);
  fem::BlockSaddleSystem sys;
  for (auto _ : st) sp.assemble(x, hist, load, sys);
}

void BM_AmgSetup(benchmark::State& st) {
  const bool fluid = st.range(0) == 0;
  const auto& s = fluid ? fluid_system() : structure_system();
  for (auto _ : st) benchmark::DoNotOptimize(amg::SaddleAmg(s.K, s.m, options(fluid)));
  st.SetLabel(fluid ? "fluid, Braess-Sarazin" : "structure, Vanka");
}

void BM_AmgRefresh(benchmark::State& st) {
  const bool fluid = st.range(0) == 0;
  const auto& s = fluid ? fluid_system() : structure_system();
  amg::SaddleAmg a(s.K, s.m, options(fluid));
  for (auto _ : st) a.refresh(s.K);
  st.SetLabel(fluid ? "fluid, Braess-Sarazin" : "structure, Vanka");
}

void BM_AmgVcycle(benchmark::State& st) {
  const bool fluid = st.range(0) == 0;
  const auto& s = fluid ? fluid_system() : structure_system();
  const amg::SaddleAmg a(s.K, s.m, options(fluid));
  Vec x(s.K.rows, 0.0);
  for (auto _ : st) {
    a.vcycle(s.rhs, x);
    benchmark::ClobberMemory();
  }
  st.SetLabel(fluid ? "fluid, Braess-Sarazin" : "structure, Vanka");
}

BENCHMARK(BM_FluidAssembly)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StructureAssembly)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AmgSetup)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AmgRefresh)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AmgVcycle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
