#include "fsikit/materials.hpp"

#include <cmath>
#include <numbers>

namespace fsi::materials {

namespace {

constexpr double kExpGuard = 50.0;

double ddot(const Mat3& a, const Mat3& b) { return (a.array() * b.array()).sum(); }

void check_exponent(double k2, double j) {
  if (k2 * (j - 1) * (j - 1) > kExpGuard)
    throw Error("fiber exponent k2 (J_i - 1)^2 exceeds " + std::to_string(kExpGuard) +
                "; reduce the load step");
}

}  // namespace

Kinematics kinematics(const Mat3& grad_d, const Vec3* a01, const Vec3* a02) {
  Kinematics k;
  k.F = Mat3::Identity() + grad_d;
  k.J = k.F.determinant();
  if (!(k.J > 0.0)) throw ElementInversion(-1, "det F = " + std::to_string(k.J));
  k.C = k.F.transpose() * k.F;
  k.Cinv = k.C.inverse();
  k.I1 = k.C.trace();
  k.I2 = 0.5 * (k.I1 * k.I1 - (k.C * k.C).trace());
  k.I3 = k.C.determinant();
  k.J1 = k.I1 * std::pow(k.I3, -1.0 / 3.0);
  k.J2 = k.I2 * std::pow(k.I3, -2.0 / 3.0);
  if (a01 && a02) {
    const double q = std::pow(k.I3, -1.0 / 3.0);
    k.J4 = q * a01->dot(k.C * *a01);
    k.J6 = q * a02->dot(k.C * *a02);
  }
  return k;
}

FiberFrame fiber_frame(const Vec3& x) {
  const double r = std::hypot(x.x(), x.y());
  if (!(r > 0.0)) throw Error("fiber frame undefined on the tube axis");
  FiberFrame f;
  f.e_axial = Vec3(0, 0, 1);
  f.e_rad = Vec3(x.x() / r, x.y() / r, 0);
  f.e_circ = f.e_axial.cross(f.e_rad);
  return f;
}

std::pair<Vec3, Vec3> fiber_directions(const FiberFrame& f, double alpha_deg) {
  const double a = alpha_deg * std::numbers::pi / 180.0;
  return {std::cos(a) * f.e_circ + std::sin(a) * f.e_axial, std::cos(a) * f.e_circ - std::sin(a) * f.e_axial};
}

Material Material::mooney_rivlin(const MooneyRivlinParams& p) {
  if (!(p.c10 > 0 && p.c01 > 0)) throw Error("Mooney-Rivlin parameters must be positive");
  Material m;
  m.c10_ = p.c10;
  m.c01_ = p.c01;
  m.mu_ = p.shear_modulus();
  return m;
}

Material Material::artery(const ArteryLayerParams& p, const Vec3& a01, const Vec3& a02) {
  if (!(p.c10 > 0 && p.k1 > 0 && p.k2 > 0)) throw Error("artery parameters must be positive");
  Material m;
  m.c10_ = p.c10;
  m.k1_ = p.k1;
  m.k2_ = p.k2;
  m.mu_ = p.shear_modulus();
  m.fibers_ = true;
  m.A1_ = a01 * a01.transpose();
  m.A2_ = a02 * a02.transpose();
  return m;
}

double Material::energy(const Mat3& C) const {
  const double I1 = C.trace();
  const double I2 = 0.5 * (I1 * I1 - (C * C).trace());
  const double I3 = C.determinant();
  double psi = 0.5 * c10_ * (I1 * std::pow(I3, -1.0 / 3.0) - 3.0) + 0.5 * c01_ * (I2 * std::pow(I3, -2.0 / 3.0) - 3.0);
  if (fibers_) {
    for (const Mat3* A : {&A1_, &A2_}) {
      const double j = std::pow(I3, -1.0 / 3.0) * ddot(*A, C);
      if (j > 1.0) {
        check_exponent(k2_, j);
        psi += k1_ / (2.0 * k2_) * (std::exp(k2_ * (j - 1) * (j - 1)) - 1.0);
      }
    }
  }
  return psi;
}

Mat3 Material::stress(const Mat3& C) const {
  const Mat3 I = Mat3::Identity();
  const Mat3 Ci = C.inverse();
  const double I1 = C.trace();
  const double I2 = 0.5 * (I1 * I1 - (C * C).trace());
  const double I3 = C.determinant();
  const double q = std::pow(I3, -1.0 / 3.0), q2 = q * q;
  Mat3 S = c10_ * q * (I - I1 / 3.0 * Ci);
  if (c01_ != 0.0) S += c01_ * q2 * (I1 * I - C - 2.0 / 3.0 * I2 * Ci);
  if (fibers_) {
    for (const Mat3* A : {&A1_, &A2_}) {
      const double ac = ddot(*A, C);
      const double j = q * ac;
      if (j <= 1.0) continue;
      check_exponent(k2_, j);
      const double g = 2.0 * k1_ * std::exp(k2_ * (j - 1) * (j - 1)) * (j - 1);
      S += g * q * (*A - ac / 3.0 * Ci);
    }
  }
  return S;
}

Mat3 Material::stress_derivative(const Mat3& C, const Mat3& dC) const {
  const Mat3 I = Mat3::Identity();
  const Mat3 Ci = C.inverse();
  const Mat3 dCi = -Ci * dC * Ci;
  const double I1 = C.trace();
  const double I2 = 0.5 * (I1 * I1 - (C * C).trace());
  const double I3 = C.determinant();
  const double dI1 = dC.trace();
  const double dI2 = ddot(I1 * I - C, dC);
  const double ci_dc = ddot(Ci, dC);
  const double q = std::pow(I3, -1.0 / 3.0), q2 = q * q;
  const double dq = -q * ci_dc / 3.0, dq2 = -2.0 / 3.0 * q2 * ci_dc;

  Mat3 dS = c10_ * (dq * (I - I1 / 3.0 * Ci) + q * (-dI1 / 3.0 * Ci - I1 / 3.0 * dCi));
  if (c01_ != 0.0)
    dS += c01_ * (dq2 * (I1 * I - C - 2.0 / 3.0 * I2 * Ci) +
                  q2 * (dI1 * I - dC - 2.0 / 3.0 * dI2 * Ci - 2.0 / 3.0 * I2 * dCi));
  if (fibers_) {
    for (const Mat3* A : {&A1_, &A2_}) {
      const double ac = ddot(*A, C);
      const double j = q * ac;
      if (j <= 1.0) continue;
      check_exponent(k2_, j);
      const double e = std::exp(k2_ * (j - 1) * (j - 1));
      const double g = 2.0 * k1_ * e * (j - 1);
      const double dg = 2.0 * k1_ * e * (1.0 + 2.0 * k2_ * (j - 1) * (j - 1));
      const Mat3 dJdC = q * (*A - ac / 3.0 * Ci);
      const Mat3 d_dJdC = dq * (*A - ac / 3.0 * Ci) + q * (-ddot(*A, dC) / 3.0 * Ci - ac / 3.0 * dCi);
      dS += dg * ddot(dJdC, dC) * dJdC + g * d_dJdC;
    }
  }
  return dS;
}

Eigen::Matrix<double, 6, 1> to_voigt(const Mat3& S) {
  Eigen::Matrix<double, 6, 1> v;
  v << S(0, 0), S(1, 1), S(2, 2), S(1, 2), S(0, 2), S(0, 1);
  return v;
}

Mat3 from_voigt(const Eigen::Matrix<double, 6, 1>& v) {
  Mat3 S;
  S << v[0], v[5], v[4], v[5], v[1], v[3], v[4], v[3], v[2];
  return S;
}

Voigt6 Material::tangent(const Mat3& C) const {
  static constexpr int kI[6] = {0, 1, 2, 1, 0, 0};
  static constexpr int kJ[6] = {0, 1, 2, 2, 2, 1};
  Voigt6 D;
  for (int c = 0; c < 6; ++c) {
    Mat3 E = Mat3::Zero();
    if (kI[c] == kJ[c]) {
      E(kI[c], kJ[c]) = 1.0;
    } else {
      E(kI[c], kJ[c]) = 0.5;
      E(kJ[c], kI[c]) = 0.5;
    }
    D.col(c) = to_voigt(stress_derivative(C, E));
  }
  return D;
}

StressState pk2(const Material& mat, const Mat3& F, double p) {
  const double J = F.determinant();
  if (!(J > 0.0)) throw ElementInversion(-1, "det F = " + std::to_string(J));
  const Mat3 C = F.transpose() * F;
  StressState s;
  s.S_dev = mat.stress(C);
  s.S = s.S_dev - p * J * C.inverse();
  return s;
}

Mat3 pressure_tangent(const Mat3& F) {
  const Mat3 C = F.transpose() * F;
  return -F.determinant() * C.inverse();
}

}  // namespace fsi::materials
