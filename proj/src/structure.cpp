#include "fsikit/structure.hpp"

#include <cmath>

#include "fsikit/kernels.hpp"

namespace fsi::structure {

using fem::lp;
using fem::lv;

NewmarkState newmark_advance(const NewmarkState& old, const Vec& d_new, double beta, double gamma, double dt) {
  NewmarkState s;
  s.d = d_new;
  s.a.resize(d_new.size());
  s.v.resize(d_new.size());
  for (std::size_t i = 0; i < d_new.size(); ++i) {
    s.a[i] = (d_new[i] - old.d[i]) / (beta * dt * dt) - old.v[i] / (beta * dt) -
             (1.0 - 2.0 * beta) / (2.0 * beta) * old.a[i];
    s.v[i] = old.v[i] + dt * ((1.0 - gamma) * old.a[i] + gamma * s.a[i]);
  }
  return s;
}

StructureProblem::StructureProblem(const mesh::SubMesh& sub, const StructureParams& p)
    : sub_(sub), p_(p), dofs_(sub.num_vertices()), asm_(sub.tets, sub.num_vertices()) {
  if (!(p.rho > 0 && p.kappa > 0 && p.dt > 0 && p.beta > 0 && p.beta <= 1 && p.gamma >= 0 && p.gamma <= 1))
    throw Error("invalid structure parameters");
  for (Index v : sub_.boundary_vertices(mesh::BoundaryTag::SolidEnds))
    for (int c = 0; c < 3; ++c) dofs_.constrain(dofs_.vel(v, c), 0.0);
  mass_ = fem::scalar_mass(sub_.coords, sub_.tets);

  const Index ne = sub_.num_tets();
  geo_.resize(ne);
  tau_.resize(ne);
  mat_index_.resize(ne);
  if (p.model == Model::MooneyRivlin) mat_.push_back(materials::Material::mooney_rivlin(p.mr));
  for (Index e = 0; e < ne; ++e) {
    geo_[e] = fem::element_geometry(sub_.coords, sub_.tets[e], e);
    if (p.model == Model::Artery) {
      Vec3 c = Vec3::Zero();
      for (Index v : sub_.tets[e]) c += 0.25 * sub_.coords[v];
      const auto& layer = sub_.region[e] == mesh::Region::Adventitia ? p.adventitia : p.media;
      const auto [a1, a2] = materials::fiber_directions(materials::fiber_frame(c), layer.alpha);
      mat_index_[e] = static_cast<Index>(mat_.size());
      mat_.push_back(materials::Material::artery(layer, a1, a2));
    }
    tau_[e] = geo_[e].h * geo_[e].h / (4.0 * material(e).shear_modulus());
  }
}

Vec StructureProblem::newmark_rhs(const NewmarkState& h) const {
  const double b = p_.beta, dt = p_.dt, rho = p_.rho;
  Vec rs(h.d.size());
  for (std::size_t i = 0; i < rs.size(); ++i)
    rs[i] = rho / (b * dt * dt) * h.d[i] + rho / (b * dt) * h.v[i] + rho * (1.0 - 2.0 * b) / (2.0 * b) * h.a[i];
  return rs;
}

namespace {

Eigen::Matrix<double, 6, 1> strain_voigt(const Mat3& dC) {
  Eigen::Matrix<double, 6, 1> g;
  g << dC(0, 0), dC(1, 1), dC(2, 2), 2 * dC(1, 2), 2 * dC(0, 2), 2 * dC(0, 1);
  return g;
}

double mass_entry(double V, int a, int b) { return V / 20.0 * (a == b ? 2.0 : 1.0); }

}  // namespace

template <bool kMatrix>
void StructureProblem::element(Index e, const Vec& x, const Vec& rs, fem::LocalMatrix& K, fem::LocalVector& r,
                               const AssemblyOptions& opt) const {
  const auto& t = sub_.tets[e];
  const auto& g = geo_[e];
  const auto& mat = material(e);
  const Index m = sub_.num_vertices();
  const double V = g.volume, c = p_.rho / (p_.beta * p_.dt * p_.dt), tau = tau_[e];
  const double ik = 1.0 / p_.kappa;

  std::array<Vec3, 4> d, rsn;
  std::array<double, 4> p;
  Mat3 H = Mat3::Zero();
  Vec3 gradp = Vec3::Zero(), mean_d = Vec3::Zero(), mean_rs = Vec3::Zero();
  double pbar = 0.0;
  for (int a = 0; a < 4; ++a) {
    d[a] = Vec3(x[3 * t[a]], x[3 * t[a] + 1], x[3 * t[a] + 2]);
    rsn[a] = Vec3(rs[3 * t[a]], rs[3 * t[a] + 1], rs[3 * t[a] + 2]);
    p[a] = x[3 * m + t[a]];
    H += d[a] * g.grad[a].transpose();
    gradp += p[a] * g.grad[a];
    mean_d += 0.25 * d[a];
    mean_rs += 0.25 * rsn[a];
    pbar += 0.25 * p[a];
  }
  const Mat3 F = Mat3::Identity() + H;
  const double J = F.determinant();
  if (!(J > 0.0)) throw ElementInversion(e, "det F = " + std::to_string(J) + " in structure element");
  const Mat3 C = F.transpose() * F;
  const Mat3 FiT = F.inverse().transpose();
  const Mat3 JFiT = J * FiT;
  const Mat3 Sd = mat.stress(C);
  const Mat3 FS = F * Sd;

  // Strong momentum residual (without the inertia history) enters W_s as
  // s = r_s - c d - J F^{-T} grad p + div(F S').
  Vec3 s = mean_rs - c * mean_d - JFiT * gradp;
  if (opt.include_div_stress) {
    // d/dX_j (F S') = (dF/dX_j) S' + F dS'/dX_j with dF/dX_j = sum_a d_a (Hess phi_a)_j.
    // Linear shape functions have zero Hessians, so dF/dX_j (and dC/dX_j) vanish.
    const Mat3 hess_phi = Mat3::Zero();
    Vec3 div = Vec3::Zero();
    for (int j = 0; j < 3; ++j) {
      Mat3 dF = Mat3::Zero();
      for (int a = 0; a < 4; ++a) dF += d[a] * hess_phi.row(j);
      const Mat3 dC = dF.transpose() * F + F.transpose() * dF;
      const Mat3 dS = mat.stress_derivative(C, dC);
      div += (dF * Sd + F * dS).col(j);
    }
    s += div;
  }

  std::array<Vec3, 4> FiTG, JFiTG;
  for (int a = 0; a < 4; ++a) {
    FiTG[a] = FiT * g.grad[a];
    JFiTG[a] = J * FiTG[a];
  }
  for (int A = 0; A < 4; ++A) {
    Vec3 inert = Vec3::Zero();
    for (int b = 0; b < 4; ++b) inert += mass_entry(V, A, b) * (c * d[b] - rsn[b]);
    const Vec3 r1 = inert + V * (FS * g.grad[A]) - V * pbar * JFiTG[A];
    for (int i = 0; i < 3; ++i) r[lv(A, i)] = r1[i];
    double mp = 0.0;
    for (int b = 0; b < 4; ++b) mp += mass_entry(V, A, b) * p[b];
    r[lp(A)] = -(J - 1.0) * V / 4.0 - ik * mp + tau * V * s.dot(FiTG[A]);
  }
  if constexpr (!kMatrix) return;

  const materials::Voigt6 D = mat.tangent(C);
  for (int b = 0; b < 4; ++b) {
    for (int j = 0; j < 3; ++j) {
      Mat3 G = Mat3::Zero();
      G.row(j) = g.grad[b].transpose();
      const Mat3 dC = G.transpose() * F + F.transpose() * G;
      const Mat3 dS = materials::from_voigt(D * strain_voigt(dC));
      const Mat3 dFS = G * Sd + F * dS;
      const double dJ = J * FiT.row(j).dot(g.grad[b]);
      const Mat3 dFiT = -FiT * G.transpose() * FiT;
      const Mat3 dJFiT = dJ * FiT + J * dFiT;
      Vec3 ds = -dJFiT * gradp;
      ds[j] -= c / 4.0;
      const int col = lv(b, j);
      for (int A = 0; A < 4; ++A) {
        const Vec3 k1 = V * (dFS * g.grad[A]) - V * pbar * (dJFiT * g.grad[A]);
        for (int i = 0; i < 3; ++i) K(lv(A, i), col) = k1[i];
        K(lv(A, j), col) += c * mass_entry(V, A, b);
        K(lp(A), col) = -V / 4.0 * dJ + tau * V * (ds.dot(FiTG[A]) + s.dot(dFiT * g.grad[A]));
      }
    }
  }
  for (int b = 0; b < 4; ++b) {
    for (int A = 0; A < 4; ++A) {
      for (int i = 0; i < 3; ++i) K(lv(A, i), lp(b)) = -V / 4.0 * JFiTG[A][i];
      K(lp(A), lp(b)) = -ik * mass_entry(V, A, b) - tau * V * JFiTG[b].dot(FiTG[A]);
    }
  }
}

void StructureProblem::assemble(const Vec& x, const NewmarkState& hist, const Vec& load, fem::BlockSaddleSystem& sys,
                                const AssemblyOptions& opt) const {
  const Vec rs = newmark_rhs(hist);
  sys.m = num_vertices();
  asm_.assemble(
      [&](Index e, fem::LocalMatrix& K, fem::LocalVector& r, bool need) {
        if (need)
          element<true>(e, x, rs, K, r, opt);
        else
          element<false>(e, x, rs, K, r, opt);
      },
      &sys.K, sys.r);
  for (std::size_t i = 0; i < load.size(); ++i) sys.r[i] -= load[i];
}

Vec StructureProblem::residual(const Vec& x, const NewmarkState& hist, const Vec& load,
                               const AssemblyOptions& opt) const {
  const Vec rs = newmark_rhs(hist);
  Vec r = asm_.residual(
      [&](Index e, fem::LocalMatrix& K, fem::LocalVector& re, bool) { element<false>(e, x, rs, K, re, opt); });
  for (std::size_t i = 0; i < load.size(); ++i) r[i] -= load[i];
  return r;
}

NewtonReport StructureProblem::solve(Vec& x, const NewmarkState& hist, const Vec& load, const LinearSolveFn& linear,
                                     const NewtonOptions& opt) const {
  return newton_solve(
      x, dofs_, mass_, [&](const Vec& xs, fem::BlockSaddleSystem& sys) { assemble(xs, hist, load, sys); }, linear,
      opt, "structure");
}

double StructureProblem::constraint_residual(const Vec& x, const NewmarkState& hist) const {
  const Index m = num_vertices();
  const Vec r = residual(x, hist, Vec(3 * m, 0.0));
  const Vec p(x.begin() + 3 * m, x.end());
  const Vec mp = mass_ * std::span<const double>(p);
  double num = 0.0;
  for (Index v = 0; v < m; ++v) num += (p_.kappa * r[3 * m + v]) * (p_.kappa * r[3 * m + v]);
  const double den = kernels::norm2(mp);
  return den > 0 ? std::sqrt(num) / den : std::sqrt(num);
}

double StructureProblem::constraint_l2(const Vec& x) const {
  const Index m = num_vertices();
  double num = 0.0, den = 0.0;
  for (Index e = 0; e < sub_.num_tets(); ++e) {
    const auto& t = sub_.tets[e];
    const auto& g = geo_[e];
    Mat3 H = Mat3::Zero();
    std::array<double, 4> p;
    double pbar = 0.0;
    for (int a = 0; a < 4; ++a) {
      H += Vec3(x[3 * t[a]], x[3 * t[a] + 1], x[3 * t[a] + 2]) * g.grad[a].transpose();
      p[a] = x[3 * m + t[a]];
      pbar += 0.25 * p[a];
    }
    const double cst = p_.kappa * ((Mat3::Identity() + H).determinant() - 1.0);
    double pmp = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) pmp += p[a] * mass_entry(g.volume, a, b) * p[b];
    num += pmp + 2.0 * cst * g.volume * pbar + cst * cst * g.volume;
    den += pmp;
  }
  return den > 0 ? std::sqrt(std::max(num, 0.0) / den) : std::sqrt(std::max(num, 0.0));
}

}  // namespace fsi::structure
