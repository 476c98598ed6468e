#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

#include "fsikit/common.hpp"

namespace fsi::mesh {

enum class Region : std::uint8_t { Fluid, Media, Adventitia };
enum class BoundaryTag : std::uint8_t { Inlet, Outlet, Interface, SolidEnds, OuterWall };

std::string_view to_string(Region r);
std::string_view to_string(BoundaryTag t);
Region parse_region(std::string_view s);
BoundaryTag parse_boundary_tag(std::string_view s);

inline bool is_structure(Region r) { return r != Region::Fluid; }

struct Tet {
  std::array<Index, 4> v;
  Region region;
  bool operator==(const Tet&) const = default;
};

struct BoundaryTri {
  std::array<Index, 3> v;
  BoundaryTag tag;
  bool operator==(const BoundaryTri&) const = default;
};

/// Tagged tetrahedral mesh of the whole FSI domain, coordinates in mm.
///
/// Fluid and structure own separate vertex copies on the interface; the two
/// copies coincide geometrically and are paired by build_interface_map().
/// Immutable after construction by convention; share it read-only.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Tet> tets;
  std::vector<BoundaryTri> boundary;

  Index num_vertices() const { return static_cast<Index>(vertices.size()); }
  Index num_tets() const { return static_cast<Index>(tets.size()); }
  double signed_volume(Index t) const;
  double region_volume(Region r) const;

  /// Checks every structural invariant; throws MeshError naming the
  /// failing check.
  void validate() const;

  bool operator==(const Mesh& o) const;
};

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);
/// Normalized quality 3 * inradius / circumradius (1 for a regular tet).
double tet_quality(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);
double min_quality(const Mesh& m);

struct TubeParams {
  double radius = 1.43;
  double length = 18.0;
  double media_thickness = 0.26;
  double adventitia_thickness = 0.13;
  int n_axial = 54;
  int n_circ = 24;
  int n_radial_fluid = 2;
  int n_radial_layer = 1;

  /// Every count multiplied by two.
  TubeParams refined() const;
};

/// Structured tube: a polygonal disk (fluid) inside two annular layers
/// (media, adventitia), extruded along z and split into tetrahedra.
///
/// Ring radii are scaled so that every n-gon has the area of its circle,
/// which makes region volumes exact for any n_circ.
Mesh generate_tube_mesh(const TubeParams& p);

void save_mesh(const Mesh& m, std::ostream& os);
void save_mesh(const Mesh& m, const std::filesystem::path& path);
Mesh load_mesh(std::istream& is);
Mesh load_mesh(const std::filesystem::path& path);

/// Pairs of (fluid vertex id, structure vertex id) on the interface,
/// sorted by fluid vertex id.
struct InterfaceMap {
  std::vector<std::pair<Index, Index>> pairs;
  Index size() const { return static_cast<Index>(pairs.size()); }
};

InterfaceMap build_interface_map(const Mesh& m, double tol = 1e-12);

/// A region subset of the mesh with its own compact vertex numbering.
struct SubMesh {
  std::vector<Index> global_vertex;    ///< local -> global vertex id
  std::vector<Index> local_vertex;     ///< global -> local id, -1 if absent
  std::vector<Vec3> coords;
  std::vector<std::array<Index, 4>> tets;
  std::vector<Index> global_tet;
  std::vector<Region> region;
  std::vector<BoundaryTri> boundary;   ///< local vertex ids

  Index num_vertices() const { return static_cast<Index>(coords.size()); }
  Index num_tets() const { return static_cast<Index>(tets.size()); }
  /// Local vertex ids touched by a boundary tag, sorted.
  std::vector<Index> boundary_vertices(BoundaryTag tag) const;
  double volume() const;
};

SubMesh fluid_submesh(const Mesh& m);
SubMesh structure_submesh(const Mesh& m);

}  // namespace fsi::mesh
