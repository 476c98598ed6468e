#include "fsikit/output.hpp"

#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <sstream>

namespace fsi::io {

namespace {

constexpr int kVtkTetra = 10;

std::string e9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

void expect(std::istream& is, const std::string& word) {
  std::string w;
  if (!(is >> w) || w != word) throw Error("VTK: expected '" + word + "', got '" + w + "'");
}

}  // namespace

void write_vtk(std::ostream& os, std::span<const Vec3> points, std::span<const std::array<Index, 4>> tets,
               std::span<const PointField> fields, const std::string& title) {
  const std::size_t n = points.size();
  for (const auto& f : fields)
    if ((f.components != 1 && f.components != 3) || f.values.size() != f.components * n)
      throw Error("VTK: field '" + f.name + "' does not match the point count");
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << n << " double\n";
  for (const auto& p : points) os << e9(p.x()) << ' ' << e9(p.y()) << ' ' << e9(p.z()) << '\n';
  os << "CELLS " << tets.size() << ' ' << 5 * tets.size() << '\n';
  for (const auto& t : tets) os << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  os << "CELL_TYPES " << tets.size() << '\n';
  for (std::size_t i = 0; i < tets.size(); ++i) os << kVtkTetra << '\n';
  if (fields.empty()) return;
  os << "POINT_DATA " << n << '\n';
  for (const auto& f : fields) {
    if (f.components == 3)
      os << "VECTORS " << f.name << " double\n";
    else
      os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < f.components; ++c) os << (c ? " " : "") << e9(f.values[f.components * i + c]);
      os << '\n';
    }
  }
}

void write_vtk(const std::filesystem::path& path, std::span<const Vec3> points,
               std::span<const std::array<Index, 4>> tets, std::span<const PointField> fields,
               const std::string& title) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  write_vtk(f, points, tets, fields, title);
  if (!f) throw Error("write failed: " + path.string());
}

const PointField* VtkData::field(const std::string& name) const {
  for (const auto& f : fields)
    if (f.name == name) return &f;
  return nullptr;
}

VtkData read_vtk(std::istream& is) {
  VtkData d;
  std::string line;
  std::getline(is, line);
  if (line.rfind("# vtk DataFile", 0) != 0) throw Error("VTK: missing header");
  std::getline(is, line);  // title
  expect(is, "ASCII");
  expect(is, "DATASET");
  expect(is, "UNSTRUCTURED_GRID");
  expect(is, "POINTS");
  std::size_t n = 0, nc = 0, size = 0;
  std::string type;
  is >> n >> type;
  d.points.resize(n);
  for (auto& p : d.points) is >> p.x() >> p.y() >> p.z();
  expect(is, "CELLS");
  is >> nc >> size;
  d.tets.resize(nc);
  for (auto& t : d.tets) {
    int k = 0;
    is >> k;
    if (k != 4) throw Error("VTK: only tetrahedra are supported");
    is >> t[0] >> t[1] >> t[2] >> t[3];
  }
  expect(is, "CELL_TYPES");
  is >> nc;
  d.cell_types.resize(nc);
  for (int& c : d.cell_types) is >> c;
  std::string w;
  if (!(is >> w)) return d;
  if (w != "POINT_DATA") throw Error("VTK: unexpected section " + w);
  is >> n;
  while (is >> w) {
    PointField f;
    if (w == "VECTORS") {
      f.components = 3;
      is >> f.name >> type;
    } else if (w == "SCALARS") {
      int k = 0;
      is >> f.name >> type >> k;
      expect(is, "LOOKUP_TABLE");
      is >> type;
    } else {
      throw Error("VTK: unexpected section " + w);
    }
    f.values.resize(f.components * n);
    for (double& v : f.values) is >> v;
    d.fields.push_back(std::move(f));
  }
  if (!is.eof()) throw Error("VTK: malformed data");
  return d;
}

VtkData read_vtk(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read " + path.string());
  return read_vtk(f);
}

std::vector<PointField> snapshot_fields(const mesh::Mesh& mesh, const coupling::FsiSolver& s) {
  const std::size_t n = mesh.vertices.size();
  PointField vel{"velocity", 3, Vec(3 * n, 0.0)}, pf{"fluid_pressure", 1, Vec(n, 0.0)},
      disp{"displacement", 3, Vec(3 * n, 0.0)}, ps{"solid_pressure", 1, Vec(n, 0.0)};
  const auto& fm = s.fluid_mesh();
  const Index mf = fm.num_vertices();
  for (Index v = 0; v < mf; ++v) {
    const Index g = fm.global_vertex[v];
    for (int c = 0; c < 3; ++c) {
      vel.values[3 * g + c] = s.fluid_state()[3 * v + c];
      disp.values[3 * g + c] = s.fluid_displacement()[3 * v + c];
    }
    pf.values[g] = s.fluid_state()[3 * mf + v];
  }
  const auto& sm = s.structure_mesh();
  const Index ms = sm.num_vertices();
  for (Index v = 0; v < ms; ++v) {
    const Index g = sm.global_vertex[v];
    for (int c = 0; c < 3; ++c) disp.values[3 * g + c] = s.structure_state()[3 * v + c];
    ps.values[g] = s.structure_state()[3 * ms + v];
  }
  return {vel, pf, disp, ps};
}

RunLog::RunLog(const std::filesystem::path& dir) {
  dn_.open(dir / "dn_log.csv");
  newton_.open(dir / "newton_log.csv");
  if (!dn_ || !newton_) throw Error("cannot create logs in " + dir.string());
  dn_ << kDnLogHeader << '\n';
  newton_ << kNewtonLogHeader << '\n';
  dn_ << std::setprecision(9);
  newton_ << std::setprecision(9);
}

void RunLog::append(const coupling::StepReport& rep) {
  for (const auto& d : rep.dn) dn_ << rep.step << ',' << d.k << ',' << d.residual << ',' << d.omega << '\n';
  for (const auto& n : rep.newton)
    for (const auto& st : n.report.steps)
      newton_ << rep.step << ',' << n.dn_iter << ',' << n.field << ',' << st.k << ',' << st.norm << ','
              << st.inner_tol << ',' << st.inner_iters << '\n';
  flush();
}

void RunLog::flush() {
  dn_.flush();
  newton_.flush();
}

std::filesystem::path resolve_output_dir(const std::string& cli_out, const Config& c) {
  if (!cli_out.empty()) return cli_out;
  if (!c.output_dir.empty()) return c.output_dir;
  if (const char* env = std::getenv("FSIKIT_OUT"); env && *env) return env;
  return "fsikit_out";
}

RunSummary run_simulation(const Config& c, const std::filesystem::path& out, std::ostream& progress) {
  std::filesystem::create_directories(out);
  const mesh::Mesh mesh = mesh::generate_tube_mesh(tube_params(c));
  coupling::FsiSolver solver(mesh, fluid_params(c), structure_params(c), inlet_pulse(c), solver_settings(c),
                             coupling_options(c));
  progress << "mesh: " << mesh.num_vertices() << " vertices, " << mesh.num_tets() << " tets; fluid "
           << solver.fluid_mesh().num_vertices() << " / structure " << solver.structure_mesh().num_vertices()
           << " vertices, " << solver.num_interface() << " interface pairs\n";
  RunLog log(out);
  RunSummary sum;
  try {
    for (int n = 1; n <= c.n_steps; ++n) {
      sum.steps.push_back(solver.step());
      const auto& rep = sum.steps.back();
      log.append(rep);
      progress << "step " << rep.step << "  t = " << rep.time << " ms  DN iterations " << rep.dn_iterations()
               << "  (" << std::fixed << std::setprecision(1) << rep.time_ms / 1000.0 << " s)\n"
               << std::defaultfloat << std::setprecision(6);
      if (n % c.output_every == 0) {
        char name[32];
        std::snprintf(name, sizeof name, "step_%04d.vtk", n);
        const auto fields = snapshot_fields(mesh, solver);
        std::vector<std::array<Index, 4>> tets;
        tets.reserve(mesh.tets.size());
        for (const auto& t : mesh.tets) tets.push_back(t.v);
        write_vtk(out / name, mesh.vertices, tets, fields, "fsikit step " + std::to_string(n));
        ++sum.snapshots;
      }
    }
  } catch (...) {
    log.flush();
    throw;
  }
  return sum;
}

}  // namespace fsi::io
