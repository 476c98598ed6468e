#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fsikit/amg.hpp"
#include "fsikit/fem.hpp"
#include "fsikit/kernels.hpp"
#include "systems.hpp"

using namespace fsi;
using amg::SaddleAmg;
using amg::SaddleAmgOptions;
using amg::Smoother;

namespace {

// Random saddle system [A B^T; B' -C] with m nodes: A diagonally dominant,
// B' a perturbation of B, C symmetric positive definite.
SparseMatrix random_saddle(Index m, test::Gen& g) {
  const Index nu = 3 * m;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nu, nu), B(m, nu), C(m, m);
  for (Index i = 0; i < nu; ++i) {
    for (Index j = 0; j < nu; ++j) A(i, j) = 0.3 * g.uniform();
    A(i, i) = 4.0 + g.uniform(0.0, 1.0);
  }
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < nu; ++j) B(i, j) = g.uniform();
  Eigen::MatrixXd L(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) L(i, j) = 0.3 * g.uniform();
  C = L * L.transpose() + 0.5 * Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd B2 = B;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < nu; ++j) B2(i, j) += 0.05 * g.uniform();
  Eigen::MatrixXd K(4 * m, 4 * m);
  K << A, B.transpose(), B2, -C;
  return from_dense(K);
}

double rel_residual(const SparseMatrix& K, const Vec& x, const Vec& b) {
  Vec r(b.size());
  kernels::residual(K, x, b, r);
  return kernels::norm2(r) / kernels::norm2(b);
}

SparseMatrix laplacian_with_dirichlet(const mesh::SubMesh& s, std::span<const Index> fixed_vertices) {
  SparseMatrix L = fem::scalar_laplacian(s.coords, s.tets);
  std::vector<char> fixed(L.rows, 0);
  for (Index v : fixed_vertices) fixed[v] = 1;
  Vec rhs(L.rows, 0.0), val(L.rows, 0.0);
  fem::apply_dirichlet(L, rhs, fixed, val);
  return L;
}

}  // namespace

TEST_CASE("pairwise aggregation partitions the nodes into groups of at most 2^passes") {
  const auto mesh = mesh::generate_tube_mesh(test::small_tube());
  const auto s = mesh::fluid_submesh(mesh);
  const SparseMatrix L = fem::scalar_laplacian(s.coords, s.tets);
  for (int passes : {1, 2, 3}) {
    const auto agg = amg::pairwise_aggregation(L, passes);
    REQUIRE(agg.of.size() == static_cast<std::size_t>(L.rows));
    const auto sizes = agg.sizes();
    CHECK(*std::min_element(sizes.begin(), sizes.end()) >= 1);
    CHECK(*std::max_element(sizes.begin(), sizes.end()) <= (1 << passes));
    CHECK(static_cast<double>(L.rows) / agg.count > 0.6 * (1 << passes));
  }
}

TEST_CASE("prolongation columns partition the fine dofs") {
  test::Gen g(31);
  const auto mesh = mesh::generate_tube_mesh(test::small_tube());
  const auto sys = test::structure_system(mesh);
  SaddleAmg amg(sys.K, sys.m, {.smoother = Smoother::Vanka});
  REQUIRE(amg.num_levels() >= 2);
  for (int l = 0; l + 1 < amg.num_levels(); ++l) {
    const SparseMatrix P = amg.prolongation(l);
    for (Index i = 0; i < P.rows; ++i) CHECK(P.row_ptr[i + 1] - P.row_ptr[i] <= 1);
    const Eigen::MatrixXd PtP = multiply(P.transpose(), P).to_dense();
    const Eigen::MatrixXd off = PtP - Eigen::MatrixXd(PtP.diagonal().asDiagonal());
    CHECK(off.norm() == 0.0);
    for (Index I = 0; I < PtP.rows(); ++I) {
      const double d = PtP(I, I);
      CHECK(d == std::round(d));
      // Coarse dofs without fine members (all-Dirichlet aggregates) are unit rows.
      if (d == 0.0) CHECK(amg.matrix(l + 1).coeff(I, I) == 1.0);
    }
  }
}

TEST_CASE("coarse operators are Galerkin products plus the declared pressure scaling") {
  auto tp = test::small_tube();
  tp.n_axial = 12;
  tp.n_circ = 16;
  const auto mesh = mesh::generate_tube_mesh(tp);
  const auto sys = test::fluid_system(mesh);
  SaddleAmg amg(sys.K, sys.m, {.coarse_size = 100});
  REQUIRE(amg.num_levels() >= 3);
  for (int l = 0; l + 1 < amg.num_levels(); ++l) {
    const SparseMatrix P = amg.prolongation(l);
    const SparseMatrix ptkp = multiply(P.transpose(), multiply(amg.matrix(l), P));
    const Index mc = amg.nodes(l + 1);
    Eigen::MatrixXd expected = ptkp.to_dense();
    expected.bottomRightCorner(mc, mc) *= 4.0;
    for (Index I = 0; I < expected.rows(); ++I)
      if (expected.row(I).isZero()) expected(I, I) = 1.0;
    const Eigen::MatrixXd diff = amg.matrix(l + 1).to_dense() - expected;
    CHECK(diff.cwiseAbs().maxCoeff() <= 1e-13 * expected.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("tiny systems give a single level solved directly") {
  test::Gen g(32);
  const SparseMatrix K = random_saddle(10, g);
  SaddleAmg amg(K, 10, {});
  CHECK(amg.num_levels() == 1);
  const Vec b = g.vec(40);
  Vec x(40, 0.0);
  const auto res = amg.solve(b, x, 1e-12, 5);
  CHECK(res.iterations == 1);
  CHECK(rel_residual(K, x, b) <= 1e-12);
}

TEST_CASE("zero right-hand side keeps a zero iterate") {
  const auto mesh = mesh::generate_tube_mesh(test::tiny_tube());
  const auto sys = test::fluid_system(mesh);
  SaddleAmg amg(sys.K, sys.m, {.coarse_size = 100});
  Vec b(sys.K.rows, 0.0), x(sys.K.rows, 0.0);
  amg.vcycle(b, x);
  CHECK(kernels::norm2(x) == 0.0);
}

TEST_CASE("smoothers leave the exact solution unchanged") {
  test::Gen g(33);
  const Index m = 8;
  const SparseMatrix K = random_saddle(m, g);
  const Vec xs = g.vec(4 * m);
  const Vec b = K * std::span<const double>(xs);
  for (Smoother sm : {Smoother::BraessSarazin, Smoother::Vanka}) {
    SaddleAmg amg(K, m, {.smoother = sm, .omega = 0.7});
    Vec x = xs;
    amg.smooth(0, b, x, 3);
    CHECK(test::rel_diff(x, xs) <= 1e-12);
  }
}

TEST_CASE("Braess-Sarazin sweep equals a Richardson step with the Uzawa preconditioner") {
  test::Gen g(34);
  const Index m = 8, nu = 3 * m;
  const SparseMatrix K = random_saddle(m, g);
  const Eigen::MatrixXd Kd = K.to_dense();
  SaddleAmg amg(K, m, {.smoother = Smoother::BraessSarazin, .exact_schur = true});
  const Vec b = g.vec(4 * m), x0 = g.vec(4 * m);
  Vec x = x0;
  amg.smooth(0, b, x, 1);
  // P_F = [At B1^T; B2 -C] with At = 2 diag(A); one step is x0 + P_F^{-1}(b - K x0).
  Eigen::MatrixXd PF = Kd;
  PF.topLeftCorner(nu, nu) = (2.0 * Kd.topLeftCorner(nu, nu).diagonal()).asDiagonal();
  const Eigen::VectorXd x0e = Eigen::Map<const Eigen::VectorXd>(x0.data(), 4 * m);
  const Eigen::VectorXd be = Eigen::Map<const Eigen::VectorXd>(b.data(), 4 * m);
  const Eigen::VectorXd expected = x0e + PF.partialPivLu().solve(be - Kd * x0e);
  CHECK((Eigen::Map<const Eigen::VectorXd>(x.data(), 4 * m) - expected).norm() <= 1e-12 * expected.norm());
}

TEST_CASE("Vanka on a single patch with omega 1 is an exact solve") {
  test::Gen g(35);
  const SparseMatrix K = random_saddle(1, g);
  SaddleAmg amg(K, 1, {.smoother = Smoother::Vanka, .omega = 1.0});
  const Vec b = g.vec(4);
  Vec x(4, 0.0);
  amg.smooth(0, b, x, 1);
  CHECK(rel_residual(K, x, b) <= 1e-14);
}

TEST_CASE("Vanka sweep does not depend on the order of decoupled patches") {
  test::Gen g(36);
  // Two decoupled nodes: each patch touches only its own dofs.
  const SparseMatrix k0 = random_saddle(1, g), k1 = random_saddle(1, g);
  auto embed = [](const SparseMatrix& a, const SparseMatrix& b) {
    // Layout [u0 u1 p0 p1].
    TripletBuilder tb(8, 8);
    auto put = [&](const SparseMatrix& k, Index node) {
      auto map = [&](Index i) { return i < 3 ? 3 * node + i : 6 + node; };
      for (Index i = 0; i < 4; ++i)
        for (Index kk = k.row_ptr[i]; kk < k.row_ptr[i + 1]; ++kk) tb.add(map(i), map(k.col[kk]), k.val[kk]);
    };
    put(a, 0);
    put(b, 1);
    return tb.build();
  };
  const SparseMatrix K01 = embed(k0, k1), K10 = embed(k1, k0);
  const Vec b = g.vec(8);
  auto swap_nodes = [](const Vec& v) { return Vec{v[3], v[4], v[5], v[0], v[1], v[2], v[7], v[6]}; };
  SaddleAmg a01(K01, 2, {.smoother = Smoother::Vanka, .omega = 0.8});
  SaddleAmg a10(K10, 2, {.smoother = Smoother::Vanka, .omega = 0.8});
  Vec x01(8, 0.0), x10(8, 0.0);
  a01.smooth(0, b, x01, 1);
  a10.smooth(0, swap_nodes(b), x10, 1);
  CHECK(test::rel_diff(swap_nodes(x10), x01) <= 1e-15);
}

TEST_CASE("two-level V-cycle is a contraction") {
  const auto mesh = mesh::generate_tube_mesh(test::tiny_tube());
  const auto sys = test::fluid_system(mesh);
  SaddleAmg amg(sys.K, sys.m, {.steps = 4, .coarse_size = sys.K.rows / 4});
  REQUIRE(amg.num_levels() == 2);
  test::Gen g(37);
  Vec e = g.vec(sys.K.rows), zero(sys.K.rows, 0.0);
  double rho = 0.0;
  for (int it = 0; it < 40; ++it) {
    const double n0 = kernels::norm2(e);
    amg.vcycle(zero, e);
    rho = kernels::norm2(e) / n0;
    kernels::scale(1.0 / kernels::norm2(e), e);
  }
  MESSAGE("two-level contraction estimate ", rho);
  CHECK(rho < 1.0);
}

TEST_CASE("saddle AMG solves the fluid and structure Jacobians") {
  const auto mesh = mesh::generate_tube_mesh(test::small_tube());
  {
    const auto sys = test::fluid_system(mesh);
    SaddleAmg amg(sys.K, sys.m, {.smoother = Smoother::BraessSarazin, .steps = 8});
    Vec x(sys.K.rows, 0.0);
    const auto res = amg.solve(sys.rhs, x, 1e-8, 60);
    MESSAGE("fluid: levels ", amg.num_levels(), " cycles ", res.iterations);
    CHECK(res.converged);
    CHECK(rel_residual(sys.K, x, sys.rhs) <= 1e-8);
  }
  {
    const auto sys = test::structure_system(mesh);
    SaddleAmg amg(sys.K, sys.m, {.smoother = Smoother::Vanka, .steps = 12, .omega = 0.78});
    Vec x(sys.K.rows, 0.0);
    const auto res = amg.solve(sys.rhs, x, 1e-8, 60);
    MESSAGE("structure: levels ", amg.num_levels(), " cycles ", res.iterations);
    CHECK(res.converged);
  }
}

TEST_CASE("refresh keeps aggregates and matches a fresh build with the same maps") {
  const auto mesh = mesh::generate_tube_mesh(test::small_tube());
  const auto sys = test::structure_system(mesh);
  SaddleAmg amg(sys.K, sys.m, {.smoother = Smoother::Vanka});
  SparseMatrix K2 = sys.K;
  for (double& v : K2.val) v *= 2.0;
  const int levels = amg.num_levels();
  amg.refresh(K2);
  CHECK(amg.num_levels() == levels);
  const Eigen::MatrixXd c1 = amg.matrix(levels - 1).to_dense();
  SaddleAmg fresh(K2, sys.m, {.smoother = Smoother::Vanka});
  CHECK((fresh.matrix(levels - 1).to_dense() - c1).norm() <= 1e-12 * c1.norm());
}

TEST_CASE("scalar AMG on a Dirichlet Laplacian converges independently of the start") {
  const auto mesh = mesh::generate_tube_mesh(test::small_tube());
  const auto s = mesh::fluid_submesh(mesh);
  const auto fixed = s.boundary_vertices(mesh::BoundaryTag::Interface);
  const SparseMatrix L = laplacian_with_dirichlet(s, fixed);
  amg::ScalarAmg amg(L, {.coarse_size = 50});
  CHECK(amg.num_levels() >= 2);
  test::Gen g(38);
  const Vec b = g.vec(L.rows);
  Vec x(L.rows, 0.0);
  int cycles = 0;
  while (rel_residual(L, x, b) > 1e-8 && cycles < 100) {
    amg.vcycle(b, x);
    ++cycles;
  }
  MESSAGE("scalar AMG cycles ", cycles);
  CHECK(cycles < 100);
  // apply() is linear in b.
  const Vec b2 = g.vec(L.rows);
  Vec y1(L.rows), y2(L.rows), y3(L.rows), comb(L.rows);
  for (Index i = 0; i < L.rows; ++i) comb[i] = 2.0 * b[i] + b2[i];
  amg.apply(b, y1, 2);
  amg.apply(b2, y2, 2);
  amg.apply(comb, y3, 2);
  for (Index i = 0; i < L.rows; ++i) y1[i] = 2.0 * y1[i] + y2[i];
  CHECK(test::rel_diff(y3, y1) <= 1e-12);
}
