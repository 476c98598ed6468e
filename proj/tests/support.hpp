#pragma once

// Shared helpers for the unit tests: seeded generators and small meshes.

#include <random>

#include "fsikit/mesh.hpp"
#include "fsikit/sparse.hpp"

namespace fsi::test {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a = -1.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

  Vec vec(Index n, double a = -1.0, double b = 1.0) {
    Vec v(n);
    for (auto& x : v) x = uniform(a, b);
    return v;
  }

  Mat3 mat3(double scale) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = uniform(-scale, scale);
    return m;
  }

  /// Random sparse matrix with about `per_row` off-diagonal entries per row
  /// and a diagonal shifted by `shift` (makes it diagonally dominant).
  SparseMatrix sparse(Index n, int per_row, double shift) {
    TripletBuilder tb(n, n);
    for (Index i = 0; i < n; ++i) {
      tb.add(i, i, shift + uniform(0.0, 1.0));
      for (int k = 0; k < per_row; ++k) tb.add(i, integer(0, n - 1), uniform());
    }
    return tb.build();
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline mesh::TubeParams tiny_tube() {
  mesh::TubeParams p;
  p.n_axial = 4;
  p.n_circ = 8;
  p.n_radial_fluid = 1;
  p.n_radial_layer = 1;
  return p;
}

/// Small but not minimal tube used by assembly and solver tests.
inline mesh::TubeParams small_tube() {
  mesh::TubeParams p;
  p.length = 4.0;
  p.n_axial = 6;
  p.n_circ = 12;
  p.n_radial_fluid = 2;
  p.n_radial_layer = 1;
  return p;
}

inline double rel_diff(const Vec& a, const Vec& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

}  // namespace fsi::test
