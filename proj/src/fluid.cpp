#include "fsikit/fluid.hpp"

#include <cmath>

namespace fsi::fluid {

using fem::kQuadPoints;
using fem::lp;
using fem::lv;

FluidProblem::FluidProblem(const mesh::SubMesh& sub, const FluidParams& p, const FluidOptions& opt)
    : sub_(sub), p_(p), opt_(opt), dofs_(sub.num_vertices()), asm_(sub.tets, sub.num_vertices()) {
  if (!(p.rho > 0 && p.mu > 0 && p.dt > 0)) throw Error("invalid fluid parameters");
  iface_ = sub_.boundary_vertices(mesh::BoundaryTag::Interface);
  for (const auto& b : sub_.boundary)
    if (b.tag == mesh::BoundaryTag::Inlet) inlet_.push_back(b.v);
  set_motion(sub_.coords, Vec(3 * sub_.num_vertices(), 0.0));
}

void FluidProblem::set_motion(const std::vector<Vec3>& coords, const Vec& w) {
  std::vector<fem::ElementGeometry> geo(sub_.num_tets());
  for (Index e = 0; e < sub_.num_tets(); ++e) geo[e] = fem::element_geometry(coords, sub_.tets[e], e);
  geo_ = std::move(geo);
  coords_ = coords;
  w_ = w;
  for (Index v : iface_)
    for (int c = 0; c < 3; ++c) dofs_.constrain(dofs_.vel(v, c), w[3 * v + c]);
  mass_ = fem::scalar_mass(coords_, sub_.tets);
}

double FluidProblem::tau(Index e, const Vec& x) const {
  if (!opt_.stabilization) return 0.0;
  const auto& t = sub_.tets[e];
  const double h = geo_[e].h, rho = p_.rho;
  Vec3 ac = Vec3::Zero();
  if (opt_.convection)
    for (Index v : t)
      for (int c = 0; c < 3; ++c) ac[c] += 0.25 * (x[3 * v + c] - w_[3 * v + c]);
  const double s1 = 2 * rho / p_.dt, s2 = 2 * rho * ac.norm() / h, s3 = 4 * p_.mu / (h * h);
  return 1.0 / std::sqrt(s1 * s1 + s2 * s2 + s3 * s3);
}

template <bool kMatrix>
void FluidProblem::element(Index e, const Vec& x, const Vec& u_old, fem::LocalMatrix& K,
                           fem::LocalVector& r) const {
  const auto& t = sub_.tets[e];
  const auto& g = geo_[e];
  const Index m = sub_.num_vertices();
  const double V = g.volume, rho = p_.rho, mu = p_.mu, idt = 1.0 / p_.dt, h = g.h;
  const double wq = V / 4.0;
  const bool conv = opt_.convection;

  std::array<Vec3, 4> u, uo, adv;
  Mat3 gradU = Mat3::Zero();
  Vec3 gradp = Vec3::Zero(), ac = Vec3::Zero();
  double pbar = 0.0;
  for (int a = 0; a < 4; ++a) {
    const Index v = t[a];
    u[a] = Vec3(x[3 * v], x[3 * v + 1], x[3 * v + 2]);
    uo[a] = Vec3(u_old[3 * v], u_old[3 * v + 1], u_old[3 * v + 2]);
    adv[a] = conv ? Vec3(u[a] - Vec3(w_[3 * v], w_[3 * v + 1], w_[3 * v + 2])) : Vec3::Zero();
    gradU += u[a] * g.grad[a].transpose();
    gradp += x[3 * m + v] * g.grad[a];
    ac += 0.25 * adv[a];
    pbar += 0.25 * x[3 * m + v];
  }
  double tau = 0.0, dtau_coef = 0.0;
  if (opt_.stabilization) {
    const double s1 = 2 * rho * idt, s2 = 2 * rho * ac.norm() / h, s3 = 4 * mu / (h * h);
    tau = 1.0 / std::sqrt(s1 * s1 + s2 * s2 + s3 * s3);
    // d tau / d a_c = -tau^3 (2 rho / h)^2 a_c
    if (conv) dtau_coef = -tau * tau * tau * (2 * rho / h) * (2 * rho / h);
  }

  std::array<Vec3, 4> uq, aq, rM;
  Vec3 rM_sum = Vec3::Zero();
  for (int q = 0; q < 4; ++q) {
    const auto& l = kQuadPoints[q];
    uq[q] = aq[q] = Vec3::Zero();
    Vec3 uoq = Vec3::Zero();
    for (int a = 0; a < 4; ++a) {
      uq[q] += l[a] * u[a];
      uoq += l[a] * uo[a];
      aq[q] += l[a] * adv[a];
    }
    rM[q] = rho * idt * (uq[q] - uoq) + rho * gradU * aq[q] + gradp;
    rM_sum += wq * rM[q];
  }
  const Mat3 visc = mu * (gradU + gradU.transpose());
  const double div = gradU.trace();

  for (int A = 0; A < 4; ++A) {
    Vec3 r1 = V * visc * g.grad[A] - V * pbar * g.grad[A];
    for (int q = 0; q < 4; ++q) {
      const double lA = kQuadPoints[q][A];
      r1 += wq * (rho * idt * lA * uq[q] + rho * lA * (gradU * aq[q]) +
                  tau * rho * aq[q].dot(g.grad[A]) * rM[q]);
    }
    // History part of the inertia term: -rho/dt (u_old, v).
    for (int q = 0; q < 4; ++q) {
      Vec3 uoq = Vec3::Zero();
      for (int a = 0; a < 4; ++a) uoq += kQuadPoints[q][a] * uo[a];
      r1 -= wq * rho * idt * kQuadPoints[q][A] * uoq;
    }
    for (int i = 0; i < 3; ++i) r[lv(A, i)] = r1[i];
    r[lp(A)] = -div * V / 4.0 - tau * g.grad[A].dot(rM_sum);
  }
  if constexpr (!kMatrix) return;

  for (int b = 0; b < 4; ++b) {
    for (int j = 0; j < 3; ++j) {
      const int col = lv(b, j);
      const double dtau = dtau_coef * ac[j] / 4.0;
      Vec3 drM_sum = Vec3::Zero();
      std::array<Vec3, 4> drM;
      for (int q = 0; q < 4; ++q) {
        const double lb = kQuadPoints[q][b];
        drM[q] = Vec3::Zero();
        drM[q][j] += rho * idt * lb + rho * g.grad[b].dot(aq[q]);
        if (conv) drM[q] += rho * lb * gradU.col(j);
        drM_sum += wq * drM[q];
      }
      for (int A = 0; A < 4; ++A) {
        Vec3 k = Vec3::Zero();
        for (int q = 0; q < 4; ++q) {
          const double lA = kQuadPoints[q][A], lb = kQuadPoints[q][b];
          Vec3 dconv = Vec3::Zero();
          dconv[j] += rho * g.grad[b].dot(aq[q]);
          if (conv) dconv += rho * lb * gradU.col(j);
          const double adG = aq[q].dot(g.grad[A]);
          const double dadG = conv ? lb * g.grad[A][j] : 0.0;
          k += wq * (lA * dconv + rho * (dtau * adG * rM[q] + tau * dadG * rM[q] + tau * adG * drM[q]));
          k[j] += wq * rho * idt * lA * lb;
        }
        k += V * mu * (g.grad[b].dot(g.grad[A]) * Vec3::Unit(j) + g.grad[b] * g.grad[A][j]);
        for (int i = 0; i < 3; ++i) K(lv(A, i), col) = k[i];
        K(lp(A), col) = -V / 4.0 * g.grad[b][j] - dtau * g.grad[A].dot(rM_sum) - tau * g.grad[A].dot(drM_sum);
      }
    }
  }
  for (int b = 0; b < 4; ++b) {
    for (int A = 0; A < 4; ++A) {
      double supg = 0.0;
      for (int q = 0; q < 4; ++q) supg += wq * tau * rho * aq[q].dot(g.grad[A]);
      for (int i = 0; i < 3; ++i) K(lv(A, i), lp(b)) = -V / 4.0 * g.grad[A][i] + supg * g.grad[b][i];
      K(lp(A), lp(b)) = -tau * V * g.grad[A].dot(g.grad[b]);
    }
  }
}

void FluidProblem::add_inlet(const Vec3& g_in, Vec& r) const {
  for (const auto& tri : inlet_) {
    const Vec3& a = coords_[tri[0]];
    const double area = 0.5 * (coords_[tri[1]] - a).cross(coords_[tri[2]] - a).norm();
    for (Index v : tri)
      for (int c = 0; c < 3; ++c) r[3 * v + c] -= g_in[c] * area / 3.0;
  }
}

void FluidProblem::assemble(const Vec& x, const Vec& u_old, const Vec3& g_in, fem::BlockSaddleSystem& sys) const {
  sys.m = num_vertices();
  asm_.assemble(
      [&](Index e, fem::LocalMatrix& K, fem::LocalVector& r, bool need) {
        if (need)
          element<true>(e, x, u_old, K, r);
        else
          element<false>(e, x, u_old, K, r);
      },
      &sys.K, sys.r);
  add_inlet(g_in, sys.r);
}

Vec FluidProblem::residual(const Vec& x, const Vec& u_old, const Vec3& g_in) const {
  Vec r = asm_.residual([&](Index e, fem::LocalMatrix& K, fem::LocalVector& re, bool) {
    element<false>(e, x, u_old, K, re);
  });
  add_inlet(g_in, r);
  return r;
}

NewtonReport FluidProblem::solve(Vec& x, const Vec& u_old, const Vec3& g_in, const LinearSolveFn& linear,
                                 const NewtonOptions& opt) const {
  return newton_solve(
      x, dofs_, mass_, [&](const Vec& xs, fem::BlockSaddleSystem& sys) { assemble(xs, u_old, g_in, sys); }, linear,
      opt, "fluid");
}

SparseMatrix FluidProblem::pressure_laplacian() const { return fem::scalar_laplacian(coords_, sub_.tets); }

SparseMatrix FluidProblem::convection_matrix(const Vec& x) const {
  SparseMatrix c = fem::vertex_graph(sub_.tets, num_vertices());
  for (Index e = 0; e < sub_.num_tets(); ++e) {
    const auto& t = sub_.tets[e];
    const auto& g = geo_[e];
    std::array<Vec3, 4> adv;
    for (int a = 0; a < 4; ++a)
      for (int k = 0; k < 3; ++k) adv[a][k] = x[3 * t[a] + k] - w_[3 * t[a] + k];
    for (int i = 0; i < 4; ++i) {
      // int phi_i (a . grad phi_j) with a linear: (sum_b M_ib a_b) . grad phi_j
      Vec3 ma = Vec3::Zero();
      for (int b = 0; b < 4; ++b) ma += g.volume / 20.0 * (i == b ? 2.0 : 1.0) * adv[b];
      for (int j = 0; j < 4; ++j) c.val[c.find(t[i], t[j])] += ma.dot(g.grad[j]);
    }
  }
  return c;
}

}  // namespace fsi::fluid
