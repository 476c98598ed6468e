#pragma once

// Hyperelastic constitutive laws in the mixed form S = S' - p J C^{-1}.
//
// S' is the isochoric (plus fiber) part 2 dPsi/dC of the modified invariants
// J1 = I1 I3^{-1/3}, J2 = I2 I3^{-2/3}, J4/J6 = I3^{-1/3} a0.C a0. The
// volumetric part of the energy, kappa/2 (J-1)^2, enters only through p.

#include <optional>

#include "fsikit/common.hpp"

namespace fsi::materials {

using Voigt6 = Eigen::Matrix<double, 6, 6>;

struct MooneyRivlinParams {
  double c10 = 3.0;  // kPa
  double c01 = 0.3;  // kPa
  double shear_modulus() const { return 2.0 * (c10 + c01); }
};

struct ArteryLayerParams {
  double c10 = 3.0;     // kPa
  double k1 = 2.3632;   // kPa
  double k2 = 0.8393;   // -
  double alpha = 29.0;  // degrees between fibers and the circumferential direction
  double shear_modulus() const { return 2.0 * (c10 + k1 / (2.0 * k2)); }
};

struct Kinematics {
  Mat3 F, C, Cinv;
  double J = 1, I1 = 3, I2 = 3, I3 = 1, J1 = 3, J2 = 3;
  std::optional<double> J4, J6;
};

/// F = I + grad_d. Fiber invariants are filled when both directions are
/// given. Throws ElementInversion(-1) when det F <= 0.
Kinematics kinematics(const Mat3& grad_d, const Vec3* a01 = nullptr, const Vec3* a02 = nullptr);

/// Orthonormal (radial, circumferential, axial) triad at a point off the z axis.
struct FiberFrame {
  Vec3 e_rad, e_circ, e_axial;
};
FiberFrame fiber_frame(const Vec3& centroid);
/// Global fiber directions a01 = cos(a) e_circ + sin(a) e_axial and a02 with -sin(a).
std::pair<Vec3, Vec3> fiber_directions(const FiberFrame& f, double alpha_deg);

class Material {
 public:
  static Material mooney_rivlin(const MooneyRivlinParams& p);
  static Material artery(const ArteryLayerParams& p, const Vec3& a01, const Vec3& a02);

  /// Deviatoric strain energy (without kappa/2 (J-1)^2).
  double energy(const Mat3& C) const;
  /// S' = 2 dPsi/dC.
  Mat3 stress(const Mat3& C) const;
  /// Directional derivative dS'[dC] for symmetric dC.
  Mat3 stress_derivative(const Mat3& C, const Mat3& dC) const;
  /// dS' = D gamma with gamma = (dC11, dC22, dC33, 2dC23, 2dC13, 2dC12) and
  /// dS' ordered (11, 22, 33, 23, 13, 12).
  Voigt6 tangent(const Mat3& C) const;

  /// Linearized shear modulus, used by the stabilization parameter.
  double shear_modulus() const { return mu_; }
  bool has_fibers() const { return fibers_; }

 private:
  double c10_ = 0, c01_ = 0, k1_ = 0, k2_ = 0, mu_ = 0;
  bool fibers_ = false;
  Mat3 A1_ = Mat3::Zero(), A2_ = Mat3::Zero();
};

/// Full PK2 stress S = S' - p J C^{-1} for F and pressure p.
struct StressState {
  Mat3 S, S_dev;
};
StressState pk2(const Material& mat, const Mat3& F, double p);

/// dS/dp = -J C^{-1}.
Mat3 pressure_tangent(const Mat3& F);

/// Voigt helpers (ordering 11, 22, 33, 23, 13, 12).
Eigen::Matrix<double, 6, 1> to_voigt(const Mat3& S);
Mat3 from_voigt(const Eigen::Matrix<double, 6, 1>& v);

}  // namespace fsi::materials
