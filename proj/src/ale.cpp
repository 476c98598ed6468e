#include "fsikit/ale.hpp"

#include <algorithm>
#include <cmath>

#include "fsikit/fem.hpp"
#include "fsikit/kernels.hpp"
#include "fsikit/linsolve.hpp"

namespace fsi::ale {

HarmonicExtension::HarmonicExtension(const mesh::SubMesh& s, double tol)
    : m_(s.num_vertices()), tol_(tol), iface_(s.boundary_vertices(mesh::BoundaryTag::Interface)) {
  fixed_.assign(m_, 0);
  for (auto tag : {mesh::BoundaryTag::Interface, mesh::BoundaryTag::Inlet, mesh::BoundaryTag::Outlet})
    for (Index v : s.boundary_vertices(tag)) fixed_[v] = 1;
  for (Index v = 0; v < m_; ++v)
    if (fixed_[v]) boundary_.push_back(v);
  lap_ = fem::scalar_laplacian(s.coords, s.tets);
  a_ = lap_;
  Vec dummy(m_, 0.0);
  fem::apply_dirichlet(a_, dummy, fixed_, Vec(m_, 0.0));
  amg_ = amg::ScalarAmg(a_);
}

Vec HarmonicExtension::extend(std::span<const double> data) const {
  if (static_cast<Index>(data.size()) != 3 * m_) throw Error("harmonic extension: data must have 3 entries per vertex");
  for (Index v : boundary_)
    for (int c = 0; c < 3; ++c)
      if (!std::isfinite(data[3 * v + c]))
        throw Error("harmonic extension: non-finite boundary value at vertex " + std::to_string(v));
  Vec out(3 * m_, 0.0);
  std::string failure;
#pragma omp parallel for schedule(static, 1)
  for (int c = 0; c < 3; ++c) {
    Vec g(m_, 0.0), b(m_, 0.0), x(m_, 0.0);
    for (Index v : boundary_) g[v] = data[3 * v + c];
    // Lift the boundary data: b = -L g on free rows, g on fixed rows.
    lap_.multiply(g, b);
    for (Index v = 0; v < m_; ++v) b[v] = fixed_[v] ? g[v] : -b[v];
    x = g;
    const auto rep = linsolve::pcg(
        a_, b, x, [&](std::span<const double> r, std::span<double> z) { amg_.apply(r, z, 1); },
        {.tol = tol_, .max_it = 500});
    if (!rep.converged) {
#pragma omp critical
      failure = "harmonic extension: CG stalled at relative residual " + std::to_string(rep.reduction);
    }
    for (Index v = 0; v < m_; ++v) out[3 * v + c] = fixed_[v] ? g[v] : x[v];
  }
  if (!failure.empty()) throw Error(failure);
  return out;
}

Vec HarmonicExtension::extend_interface(std::span<const double> d_iface) const {
  if (d_iface.size() != 3 * iface_.size()) throw Error("harmonic extension: interface data size mismatch");
  Vec data(3 * m_, 0.0);
  for (std::size_t i = 0; i < iface_.size(); ++i)
    for (int c = 0; c < 3; ++c) data[3 * iface_[i] + c] = d_iface[3 * i + c];
  return extend(data);
}

std::vector<Vec3> move_mesh(std::span<const Vec3> reference, const std::vector<std::array<Index, 4>>& tets,
                            std::span<const double> d, MeshQuality* quality) {
  if (d.size() != 3 * reference.size()) throw Error("move_mesh: displacement size mismatch");
  std::vector<Vec3> x(reference.begin(), reference.end());
  for (std::size_t v = 0; v < x.size(); ++v) {
    const Vec3 dv(d[3 * v], d[3 * v + 1], d[3 * v + 2]);
    if (!dv.allFinite()) throw Error("move_mesh: non-finite displacement at vertex " + std::to_string(v));
    x[v] += dv;
  }
  MeshQuality q{1e300, 0.0};
  for (std::size_t e = 0; e < tets.size(); ++e) {
    const auto& t = tets[e];
    const double v0 = mesh::signed_volume(reference[t[0]], reference[t[1]], reference[t[2]], reference[t[3]]);
    const double v1 = mesh::signed_volume(x[t[0]], x[t[1]], x[t[2]], x[t[3]]);
    if (!(v1 > 0.0))
      throw ElementInversion(static_cast<Index>(e), "inverted by the mesh motion (volume " + std::to_string(v1) + ")");
    q.min_volume_ratio = std::min(q.min_volume_ratio, v1 / v0);
    q.max_volume_ratio = std::max(q.max_volume_ratio, v1 / v0);
  }
  if (tets.empty()) q = {};
  if (quality) *quality = q;
  return x;
}

}  // namespace fsi::ale
