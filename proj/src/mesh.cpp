#include "fsikit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_map>

namespace fsi::mesh {

std::string_view to_string(Region r) {
  switch (r) {
    case Region::Fluid: return "fluid";
    case Region::Media: return "media";
    case Region::Adventitia: return "adventitia";
  }
  return "?";
}

std::string_view to_string(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::Inlet: return "inlet";
    case BoundaryTag::Outlet: return "outlet";
    case BoundaryTag::Interface: return "interface";
    case BoundaryTag::SolidEnds: return "solid_ends";
    case BoundaryTag::OuterWall: return "outer_wall";
  }
  return "?";
}

Region parse_region(std::string_view s) {
  if (s == "fluid") return Region::Fluid;
  if (s == "media") return Region::Media;
  if (s == "adventitia") return Region::Adventitia;
  throw Error("unknown region '" + std::string(s) + "'");
}

BoundaryTag parse_boundary_tag(std::string_view s) {
  if (s == "inlet") return BoundaryTag::Inlet;
  if (s == "outlet") return BoundaryTag::Outlet;
  if (s == "interface") return BoundaryTag::Interface;
  if (s == "solid_ends") return BoundaryTag::SolidEnds;
  if (s == "outer_wall") return BoundaryTag::OuterWall;
  throw Error("unknown boundary tag '" + std::string(s) + "'");
}

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

double tet_quality(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const double vol = std::abs(signed_volume(a, b, c, d));
  const double area = 0.5 * ((b - a).cross(c - a).norm() + (b - a).cross(d - a).norm() +
                             (c - a).cross(d - a).norm() + (c - b).cross(d - b).norm());
  if (vol == 0.0 || area == 0.0) return 0.0;
  const double inradius = 3.0 * vol / area;
  // Circumradius from |a_len^2 (b x c) + ...| / (12 V) with edges from vertex a.
  const Vec3 u = b - a, v = c - a, w = d - a;
  const Vec3 num = u.squaredNorm() * v.cross(w) + v.squaredNorm() * w.cross(u) + w.squaredNorm() * u.cross(v);
  const double circumradius = num.norm() / (12.0 * vol);
  return 3.0 * inradius / circumradius;
}

double Mesh::signed_volume(Index t) const {
  const auto& v = tets[t].v;
  return mesh::signed_volume(vertices[v[0]], vertices[v[1]], vertices[v[2]], vertices[v[3]]);
}

double Mesh::region_volume(Region r) const {
  double s = 0.0;
  for (Index t = 0; t < num_tets(); ++t)
    if (tets[t].region == r) s += signed_volume(t);
  return s;
}

double min_quality(const Mesh& m) {
  double q = std::numeric_limits<double>::infinity();
  for (const auto& t : m.tets)
    q = std::min(q, tet_quality(m.vertices[t.v[0]], m.vertices[t.v[1]], m.vertices[t.v[2]],
                                m.vertices[t.v[3]]));
  return q;
}

bool Mesh::operator==(const Mesh& o) const {
  if (vertices.size() != o.vertices.size()) return false;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] != o.vertices[i]) return false;
  return tets == o.tets && boundary == o.boundary;
}

namespace {

using FaceKey = std::array<Index, 3>;

FaceKey sorted_face(Index a, Index b, Index c) {
  FaceKey f{a, b, c};
  std::sort(f.begin(), f.end());
  return f;
}

constexpr std::array<std::array<int, 3>, 4> kTetFaces{{{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}}};

/// Face -> list of (tet, local face) that contain it.
std::map<FaceKey, std::vector<Index>> face_owners(const Mesh& m) {
  std::map<FaceKey, std::vector<Index>> owners;
  for (Index t = 0; t < m.num_tets(); ++t) {
    const auto& v = m.tets[t].v;
    for (const auto& f : kTetFaces) owners[sorted_face(v[f[0]], v[f[1]], v[f[2]])].push_back(t);
  }
  return owners;
}

}  // namespace

void Mesh::validate() const {
  const Index nv = num_vertices();
  for (Index t = 0; t < num_tets(); ++t) {
    for (Index v : tets[t].v)
      if (v < 0 || v >= nv) throw MeshError("tet " + std::to_string(t) + " references vertex out of range");
    if (!(signed_volume(t) > 0.0))
      throw MeshError("positive-volume check failed: tet " + std::to_string(t) + " has volume " +
                      std::to_string(signed_volume(t)));
  }
  const auto owners = face_owners(*this);
  std::vector<Region> tri_region(boundary.size());
  for (std::size_t b = 0; b < boundary.size(); ++b) {
    const auto& tri = boundary[b];
    for (Index v : tri.v)
      if (v < 0 || v >= nv)
        throw MeshError("boundary triangle " + std::to_string(b) + " references vertex out of range");
    const auto it = owners.find(sorted_face(tri.v[0], tri.v[1], tri.v[2]));
    if (it == owners.end() || it->second.size() != 1)
      throw MeshError("boundary-face check failed: boundary triangle " + std::to_string(b) +
                      " is not a face of exactly one tet");
    tri_region[b] = tets[it->second.front()].region;
  }

  // Interface: every fluid-side triangle has a coincident structure-side one.
  const InterfaceMap imap = build_interface_map(*this);
  std::unordered_map<Index, Index> f2s;
  for (auto [f, s] : imap.pairs) f2s[f] = s;
  std::set<FaceKey> structure_iface;
  std::size_t n_fluid_iface = 0;
  for (std::size_t b = 0; b < boundary.size(); ++b) {
    if (boundary[b].tag != BoundaryTag::Interface) continue;
    if (is_structure(tri_region[b])) {
      structure_iface.insert(sorted_face(boundary[b].v[0], boundary[b].v[1], boundary[b].v[2]));
    } else {
      ++n_fluid_iface;
    }
  }
  if (n_fluid_iface != structure_iface.size())
    throw MeshError("interface check failed: fluid and structure sides have different triangle counts");
  for (std::size_t b = 0; b < boundary.size(); ++b) {
    if (boundary[b].tag != BoundaryTag::Interface || is_structure(tri_region[b])) continue;
    std::array<Index, 3> mapped{};
    for (int k = 0; k < 3; ++k) {
      const auto it = f2s.find(boundary[b].v[k]);
      if (it == f2s.end()) throw MeshError("interface check failed: unpaired fluid interface vertex");
      mapped[k] = it->second;
    }
    if (!structure_iface.contains(sorted_face(mapped[0], mapped[1], mapped[2])))
      throw MeshError("interface check failed: fluid interface triangle " + std::to_string(b) +
                      " has no coincident structure triangle");
  }

  // Layer tags: media touches the interface, adventitia touches the outer wall.
  bool media_iface = false, adv_outer = false, any_media = false, any_adv = false;
  for (std::size_t b = 0; b < boundary.size(); ++b) {
    if (tri_region[b] == Region::Media && boundary[b].tag == BoundaryTag::Interface) media_iface = true;
    if (tri_region[b] == Region::Adventitia && boundary[b].tag == BoundaryTag::OuterWall) adv_outer = true;
  }
  for (const auto& t : tets) {
    any_media |= t.region == Region::Media;
    any_adv |= t.region == Region::Adventitia;
  }
  if (any_media && !media_iface) throw MeshError("layer check failed: media does not touch the interface");
  if (any_adv && !adv_outer) throw MeshError("layer check failed: adventitia does not touch the outer wall");
}

TubeParams TubeParams::refined() const {
  TubeParams r = *this;
  r.n_axial *= 2;
  r.n_circ *= 2;
  r.n_radial_fluid *= 2;
  r.n_radial_layer *= 2;
  return r;
}

namespace {

struct Ring {
  std::vector<Index> ids;  // 2D point ids
  int count() const { return static_cast<int>(ids.size()); }
};

double area_preserving_scale(int n) {
  const double pi = std::numbers::pi;
  return std::sqrt(2.0 * pi / (n * std::sin(2.0 * pi / n)));
}

/// Triangulates the strip between two concentric rings (points at uniform
/// angles starting at zero) by merging their angular sequences.
void triangulate_strip(const Ring& inner, const Ring& outer, std::vector<std::array<Index, 3>>& tris) {
  const int na = inner.count(), nb = outer.count();
  int i = 0, j = 0;
  while (i < na || j < nb) {
    const double ta = static_cast<double>(i + 1) / na;
    const double tb = static_cast<double>(j + 1) / nb;
    if (j >= nb || (i < na && ta <= tb)) {
      tris.push_back({inner.ids[i % na], inner.ids[(i + 1) % na], outer.ids[j % nb]});
      ++i;
    } else {
      tris.push_back({inner.ids[i % na], outer.ids[(j + 1) % nb], outer.ids[j % nb]});
      ++j;
    }
  }
}

constexpr std::array<std::array<int, 6>, 6> kPrismRotation{{
    {0, 1, 2, 3, 4, 5},
    {1, 2, 0, 4, 5, 3},
    {2, 0, 1, 5, 3, 4},
    {3, 5, 4, 0, 2, 1},
    {4, 3, 5, 1, 0, 2},
    {5, 4, 3, 2, 1, 0},
}};

/// Splits a prism (v0 v1 v2 bottom, v3 v4 v5 on top of them) into three tets
/// so that every quadrilateral face is cut through its vertex of smallest key.
/// This makes the split conforming between neighbouring prisms.
std::array<std::array<Index, 4>, 3> split_prism(const std::array<Index, 6>& v,
                                                const std::vector<Index>& key) {
  int kmin = 0;
  for (int k = 1; k < 6; ++k)
    if (key[v[k]] < key[v[kmin]]) kmin = k;
  std::array<Index, 6> w{};
  for (int k = 0; k < 6; ++k) w[k] = v[kPrismRotation[kmin][k]];
  if (std::min(key[w[1]], key[w[5]]) < std::min(key[w[2]], key[w[4]])) {
    return {{{w[0], w[1], w[2], w[5]}, {w[0], w[1], w[5], w[4]}, {w[0], w[4], w[5], w[3]}}};
  }
  return {{{w[0], w[1], w[2], w[4]}, {w[0], w[4], w[2], w[5]}, {w[0], w[4], w[5], w[3]}}};
}

}  // namespace

Mesh generate_tube_mesh(const TubeParams& p) {
  if (!(p.radius > 0 && p.length > 0 && p.media_thickness > 0 && p.adventitia_thickness > 0))
    throw MeshError("tube dimensions must be positive");
  if (p.n_circ < 8) throw MeshError("n_circ must be at least 8");
  if (p.n_axial < 4) throw MeshError("n_axial must be at least 4");
  if (p.n_radial_fluid < 1 || p.n_radial_layer < 1) throw MeshError("radial counts must be at least 1");

  const double two_pi = 2.0 * std::numbers::pi;
  // 2D points of the cross-section, fluid first then structure.
  std::vector<Eigen::Vector2d> pts2;
  auto add_ring = [&](double radius, int n) {
    Ring ring;
    const double s = area_preserving_scale(n);
    for (int j = 0; j < n; ++j) {
      const double th = two_pi * j / n;
      ring.ids.push_back(static_cast<Index>(pts2.size()));
      pts2.emplace_back(radius * s * std::cos(th), radius * s * std::sin(th));
    }
    return ring;
  };

  std::vector<std::array<Index, 3>> fluid_tris;
  const Index center = 0;
  pts2.emplace_back(0.0, 0.0);
  std::vector<Ring> fluid_rings;
  for (int k = 1; k <= p.n_radial_fluid; ++k) {
    const bool outer = k == p.n_radial_fluid;
    const double r = outer ? p.radius : p.radius * k / p.n_radial_fluid;
    int n = outer ? p.n_circ
                  : static_cast<int>(std::lround(static_cast<double>(p.n_circ) * k / p.n_radial_fluid));
    n = std::max(n, 6);
    fluid_rings.push_back(add_ring(r, n));
  }
  {
    const Ring& r1 = fluid_rings.front();
    for (int j = 0; j < r1.count(); ++j)
      fluid_tris.push_back({center, r1.ids[j], r1.ids[(j + 1) % r1.count()]});
    for (std::size_t k = 1; k < fluid_rings.size(); ++k)
      triangulate_strip(fluid_rings[k - 1], fluid_rings[k], fluid_tris);
  }
  const Index n_fluid2 = static_cast<Index>(pts2.size());

  std::vector<Ring> solid_rings;
  std::vector<double> solid_radius;
  solid_rings.push_back(add_ring(p.radius, p.n_circ));
  solid_radius.push_back(p.radius);
  for (int k = 1; k <= p.n_radial_layer; ++k) {
    const double r = p.radius + p.media_thickness * k / p.n_radial_layer;
    solid_rings.push_back(add_ring(r, p.n_circ));
    solid_radius.push_back(r);
  }
  for (int k = 1; k <= p.n_radial_layer; ++k) {
    const double r = p.radius + p.media_thickness + p.adventitia_thickness * k / p.n_radial_layer;
    solid_rings.push_back(add_ring(r, p.n_circ));
    solid_radius.push_back(r);
  }
  std::vector<std::array<Index, 3>> solid_tris;
  std::vector<Region> solid_tri_region;
  for (std::size_t k = 1; k < solid_rings.size(); ++k) {
    const std::size_t before = solid_tris.size();
    triangulate_strip(solid_rings[k - 1], solid_rings[k], solid_tris);
    const Region reg = static_cast<int>(k) <= p.n_radial_layer ? Region::Media : Region::Adventitia;
    solid_tri_region.insert(solid_tri_region.end(), solid_tris.size() - before, reg);
  }
  const Index n2 = static_cast<Index>(pts2.size());
  const Index n_solid2 = n2 - n_fluid2;

  // 3D vertices: fluid block (station-major), then structure block.
  const int ns = p.n_axial + 1;
  Mesh m;
  m.vertices.reserve(static_cast<std::size_t>(n2) * ns);
  auto zs = [&](int s) { return s == p.n_axial ? p.length : p.length * s / p.n_axial; };
  auto fluid_vid = [&](int s, Index q) { return static_cast<Index>(s * n_fluid2 + q); };
  auto solid_vid = [&](int s, Index q) {
    return static_cast<Index>(ns * n_fluid2 + s * n_solid2 + (q - n_fluid2));
  };
  for (int s = 0; s < ns; ++s)
    for (Index q = 0; q < n_fluid2; ++q) m.vertices.emplace_back(pts2[q].x(), pts2[q].y(), zs(s));
  for (int s = 0; s < ns; ++s)
    for (Index q = n_fluid2; q < n2; ++q) m.vertices.emplace_back(pts2[q].x(), pts2[q].y(), zs(s));

  // Split keys: interface copies share the key of their fluid twin.
  std::vector<Index> key(m.vertices.size());
  for (Index i = 0; i < static_cast<Index>(key.size()); ++i) key[i] = i;
  const Ring& f_outer = fluid_rings.back();
  const Ring& s_inner = solid_rings.front();
  for (int s = 0; s < ns; ++s)
    for (int j = 0; j < p.n_circ; ++j) key[solid_vid(s, s_inner.ids[j])] = fluid_vid(s, f_outer.ids[j]);

  auto emit_prisms = [&](const std::vector<std::array<Index, 3>>& tris, auto&& vid, auto&& region_of) {
    for (int s = 0; s < p.n_axial; ++s) {
      for (std::size_t t = 0; t < tris.size(); ++t) {
        const auto& tr = tris[t];
        const std::array<Index, 6> pr{vid(s, tr[0]), vid(s, tr[1]), vid(s, tr[2]),
                                      vid(s + 1, tr[0]), vid(s + 1, tr[1]), vid(s + 1, tr[2])};
        for (auto tv : split_prism(pr, key)) {
          Tet tet{tv, region_of(t)};
          const double vol = signed_volume(m.vertices[tv[0]], m.vertices[tv[1]], m.vertices[tv[2]],
                                           m.vertices[tv[3]]);
          if (vol < 0) std::swap(tet.v[2], tet.v[3]);
          if (std::abs(vol) <= 1e-14 * std::pow(p.radius, 3))
            throw MeshError("parameters produce a degenerate (zero-volume) tet");
          m.tets.push_back(tet);
        }
      }
    }
  };
  emit_prisms(fluid_tris, fluid_vid, [](std::size_t) { return Region::Fluid; });
  emit_prisms(solid_tris, solid_vid, [&](std::size_t t) { return solid_tri_region[t]; });

  // Boundary faces: faces owned by exactly one tet, tagged geometrically.
  const double r_outer = p.radius + p.media_thickness + p.adventitia_thickness;
  const double eps = 1e-9 * std::max(p.radius, p.length);
  auto on_radius = [&](Index v, double r) {
    const auto& x = m.vertices[v];
    return std::abs(std::hypot(x.x(), x.y()) - r * area_preserving_scale(p.n_circ)) < eps;
  };
  const auto owners = face_owners(m);
  for (const auto& [face, ts] : owners) {
    if (ts.size() != 1) continue;
    const Tet& tet = m.tets[ts.front()];
    // Recover the outward-oriented vertex order from the owning tet.
    std::array<Index, 3> tri{};
    for (const auto& f : kTetFaces) {
      if (sorted_face(tet.v[f[0]], tet.v[f[1]], tet.v[f[2]]) == face) {
        tri = {tet.v[f[0]], tet.v[f[1]], tet.v[f[2]]};
        break;
      }
    }
    auto all = [&](auto&& pred) { return pred(tri[0]) && pred(tri[1]) && pred(tri[2]); };
    const bool z0 = all([&](Index v) { return m.vertices[v].z() == 0.0; });
    const bool zl = all([&](Index v) { return m.vertices[v].z() == p.length; });
    BoundaryTag tag;
    if (tet.region == Region::Fluid) {
      if (z0) tag = BoundaryTag::Inlet;
      else if (zl) tag = BoundaryTag::Outlet;
      else if (all([&](Index v) { return on_radius(v, p.radius); })) tag = BoundaryTag::Interface;
      else throw MeshError("unclassified fluid boundary face");
    } else {
      if (z0 || zl) tag = BoundaryTag::SolidEnds;
      else if (all([&](Index v) { return on_radius(v, p.radius); })) tag = BoundaryTag::Interface;
      else if (all([&](Index v) { return on_radius(v, r_outer); })) tag = BoundaryTag::OuterWall;
      else throw MeshError("unclassified structure boundary face");
    }
    m.boundary.push_back({tri, tag});
  }
  std::sort(m.boundary.begin(), m.boundary.end(), [](const BoundaryTri& a, const BoundaryTri& b) {
    if (a.tag != b.tag) return a.tag < b.tag;
    return a.v < b.v;
  });
  return m;
}

void save_mesh(const Mesh& m, std::ostream& os) {
  os << "fsimesh 1\n";
  os << "vertices " << m.vertices.size() << "\n";
  os << std::setprecision(17);
  for (const auto& x : m.vertices) os << x.x() << ' ' << x.y() << ' ' << x.z() << '\n';
  os << "tets " << m.tets.size() << "\n";
  for (const auto& t : m.tets)
    os << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << t.v[3] << ' ' << to_string(t.region) << '\n';
  os << "btris " << m.boundary.size() << "\n";
  for (const auto& b : m.boundary)
    os << b.v[0] << ' ' << b.v[1] << ' ' << b.v[2] << ' ' << to_string(b.tag) << '\n';
}

void save_mesh(const Mesh& m, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  save_mesh(m, os);
  if (!os) throw Error("write failed: " + path.string());
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}
  /// Next non-empty line as a string stream; throws at end of input.
  std::istringstream next(const char* expect) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
    }
    throw ParseError(std::string("unexpected end of file, expected ") + expect, line_no_ + 1);
  }
  int line() const { return line_no_; }

 private:
  std::istream& is_;
  int line_no_ = 0;
};

template <class... T>
void read_fields(std::istringstream& ss, int line, const char* what, T&... out) {
  ((ss >> out), ...);
  std::string extra;
  if (!ss || (ss >> extra)) throw ParseError(std::string("malformed ") + what, line);
}

std::size_t read_count(LineReader& rd, const char* keyword) {
  auto ss = rd.next(keyword);
  std::string kw;
  long long n = -1;
  read_fields(ss, rd.line(), keyword, kw, n);
  if (kw != keyword || n < 0) throw ParseError(std::string("expected '") + keyword + " <count>'", rd.line());
  return static_cast<std::size_t>(n);
}

}  // namespace

Mesh load_mesh(std::istream& is) {
  LineReader rd(is);
  {
    auto ss = rd.next("header");
    std::string magic;
    int version = 0;
    read_fields(ss, rd.line(), "header", magic, version);
    if (magic != "fsimesh" || version != 1) throw ParseError("expected header 'fsimesh 1'", rd.line());
  }
  Mesh m;
  const std::size_t nv = read_count(rd, "vertices");
  m.vertices.resize(nv);
  for (auto& x : m.vertices) {
    auto ss = rd.next("vertex");
    double a, b, c;
    read_fields(ss, rd.line(), "vertex line", a, b, c);
    x = Vec3(a, b, c);
  }
  const std::size_t nt = read_count(rd, "tets");
  m.tets.resize(nt);
  for (auto& t : m.tets) {
    auto ss = rd.next("tet");
    long long v[4];
    std::string region;
    read_fields(ss, rd.line(), "tet line", v[0], v[1], v[2], v[3], region);
    for (int k = 0; k < 4; ++k) {
      if (v[k] < 0 || v[k] >= static_cast<long long>(nv))
        throw ParseError("tet references vertex id " + std::to_string(v[k]) + " out of range", rd.line());
      t.v[k] = static_cast<Index>(v[k]);
    }
    try {
      t.region = parse_region(region);
    } catch (const Error& e) {
      throw ParseError(e.what(), rd.line());
    }
  }
  const std::size_t nb = read_count(rd, "btris");
  m.boundary.resize(nb);
  for (auto& b : m.boundary) {
    auto ss = rd.next("btri");
    long long v[3];
    std::string tag;
    read_fields(ss, rd.line(), "btri line", v[0], v[1], v[2], tag);
    for (int k = 0; k < 3; ++k) {
      if (v[k] < 0 || v[k] >= static_cast<long long>(nv))
        throw ParseError("boundary triangle references vertex id " + std::to_string(v[k]) + " out of range",
                         rd.line());
      b.v[k] = static_cast<Index>(v[k]);
    }
    try {
      b.tag = parse_boundary_tag(tag);
    } catch (const Error& e) {
      throw ParseError(e.what(), rd.line());
    }
  }
  m.validate();
  return m;
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  return load_mesh(is);
}

InterfaceMap build_interface_map(const Mesh& m, double tol) {
  // Vertex -> region side via the tets that own the interface triangles.
  const auto owners = face_owners(m);
  std::set<Index> fluid_side, solid_side;
  for (const auto& b : m.boundary) {
    if (b.tag != BoundaryTag::Interface) continue;
    const auto it = owners.find(sorted_face(b.v[0], b.v[1], b.v[2]));
    if (it == owners.end()) throw MeshError("interface triangle is not a tet face");
    auto& side = is_structure(m.tets[it->second.front()].region) ? solid_side : fluid_side;
    side.insert(b.v.begin(), b.v.end());
  }
  // Lexicographic sort of structure vertices, then binary search by x.
  std::vector<Index> solid(solid_side.begin(), solid_side.end());
  std::sort(solid.begin(), solid.end(), [&](Index a, Index b) {
    const auto &xa = m.vertices[a], &xb = m.vertices[b];
    return std::tie(xa.x(), xa.y(), xa.z()) < std::tie(xb.x(), xb.y(), xb.z());
  });
  std::vector<char> used(m.vertices.size(), 0);
  InterfaceMap map;
  for (Index f : fluid_side) {
    const Vec3& x = m.vertices[f];
    auto lo = std::lower_bound(solid.begin(), solid.end(), x.x() - tol,
                               [&](Index a, double v) { return m.vertices[a].x() < v; });
    Index match = -1;
    for (auto it = lo; it != solid.end() && m.vertices[*it].x() <= x.x() + tol; ++it) {
      if ((m.vertices[*it] - x).norm() <= tol) {
        match = *it;
        break;
      }
    }
    if (match < 0 || used[match]) {
      std::ostringstream os;
      os << std::setprecision(17) << "unmatched interface vertex " << f << " at (" << x.x() << ", " << x.y()
         << ", " << x.z() << ")";
      throw MeshError(os.str());
    }
    used[match] = 1;
    map.pairs.emplace_back(f, match);
  }
  if (map.pairs.size() != solid.size()) {
    for (Index s : solid) {
      if (used[s]) continue;
      const Vec3& x = m.vertices[s];
      std::ostringstream os;
      os << std::setprecision(17) << "unmatched interface vertex " << s << " at (" << x.x() << ", " << x.y()
         << ", " << x.z() << ")";
      throw MeshError(os.str());
    }
  }
  return map;
}

std::vector<Index> SubMesh::boundary_vertices(BoundaryTag tag) const {
  std::set<Index> s;
  for (const auto& b : boundary)
    if (b.tag == tag) s.insert(b.v.begin(), b.v.end());
  return {s.begin(), s.end()};
}

double SubMesh::volume() const {
  double v = 0.0;
  for (const auto& t : tets) v += signed_volume(coords[t[0]], coords[t[1]], coords[t[2]], coords[t[3]]);
  return v;
}

namespace {

SubMesh make_submesh(const Mesh& m, bool structure) {
  SubMesh s;
  s.local_vertex.assign(m.vertices.size(), -1);
  for (Index t = 0; t < m.num_tets(); ++t) {
    if (is_structure(m.tets[t].region) != structure) continue;
    for (Index v : m.tets[t].v) s.local_vertex[v] = 0;
  }
  for (Index v = 0; v < m.num_vertices(); ++v) {
    if (s.local_vertex[v] < 0) continue;
    s.local_vertex[v] = static_cast<Index>(s.global_vertex.size());
    s.global_vertex.push_back(v);
    s.coords.push_back(m.vertices[v]);
  }
  for (Index t = 0; t < m.num_tets(); ++t) {
    const auto& tet = m.tets[t];
    if (is_structure(tet.region) != structure) continue;
    s.tets.push_back({s.local_vertex[tet.v[0]], s.local_vertex[tet.v[1]], s.local_vertex[tet.v[2]],
                      s.local_vertex[tet.v[3]]});
    s.global_tet.push_back(t);
    s.region.push_back(tet.region);
  }
  for (const auto& b : m.boundary) {
    if (s.local_vertex[b.v[0]] < 0 || s.local_vertex[b.v[1]] < 0 || s.local_vertex[b.v[2]] < 0) continue;
    s.boundary.push_back({{s.local_vertex[b.v[0]], s.local_vertex[b.v[1]], s.local_vertex[b.v[2]]}, b.tag});
  }
  return s;
}

}  // namespace

SubMesh fluid_submesh(const Mesh& m) { return make_submesh(m, false); }
SubMesh structure_submesh(const Mesh& m) { return make_submesh(m, true); }

}  // namespace fsi::mesh
