#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fsikit/config.hpp"
#include "fsikit/output.hpp"
#include "support.hpp"

using namespace fsi;

namespace {

const std::filesystem::path kSource = FSIKIT_SOURCE_DIR;

io::Config parse(const std::string& text) {
  std::istringstream is(text);
  return io::parse_config(is);
}

const char* const kMinimal = R"(
[geometry]
[fluid]
[structure]
model = mooney_rivlin
c10 = 3
c01 = 0.3
[solver]
)";

std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("fsikit_test_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("shipped artery configuration") {
  const auto c = io::load_config(kSource / "configs/benchmark_artery.cfg");
  CHECK(c.model == structure::Model::Artery);
  CHECK(c.media_c10 == 3.0);
  CHECK(c.adventitia_c10 == 0.3);
  CHECK(c.media_alpha == 29.0);
  CHECK(c.adventitia_alpha == 62.0);
  CHECK(c.kappa == 1e5);
  CHECK(c.pulse_duration == 0.125);
  CHECK(c.vanka_omega == 0.86);
  const auto sp = io::structure_params(c);
  CHECK(sp.media.k1 == 2.3632);
  CHECK(sp.adventitia.k2 == 0.7112);
}

TEST_CASE("shipped Mooney-Rivlin configuration matches the benchmark defaults") {
  auto c = io::load_config(kSource / "configs/benchmark_mooney_rivlin.cfg");
  CHECK(c.tolerance_mode == ToleranceMode::Adaptive);
  c.tolerance_mode = ToleranceMode::Fixed;
  CHECK(c == io::benchmark_config(structure::Model::MooneyRivlin));
  CHECK(io::fluid_params(c).mu == doctest::Approx(3.5e-3));
}

TEST_CASE("config errors name the problem and the line") {
  CHECK_THROWS_WITH_AS(parse(""), "missing [geometry]", ConfigError);
  std::string bad = kMinimal;
  bad += "kappa = -1\n";
  CHECK_THROWS_AS(parse(bad), ParseError);  // kappa sits in [structure], not [solver]

  std::string text = std::string(kMinimal).replace(std::string(kMinimal).find("c01"), 0, "kappa = -1\n");
  try {
    parse(text);
    FAIL("accepted a negative bulk modulus");
  } catch (const ParseError& e) {
    CHECK(e.line() == 7);  // kMinimal opens with an empty line
    CHECK(std::string(e.what()).find("kappa") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(parse(std::string(kMinimal) + "frobnicate = 2\n"),
                       doctest::Contains("unknown key 'frobnicate'"), ParseError);
  CHECK_THROWS_WITH_AS(parse(std::string(kMinimal) + "dt = fast\n"), doctest::Contains("dt"), ParseError);
  CHECK_THROWS_WITH_AS(parse(std::string(kMinimal) + "tolerance_mode = sometimes\n"),
                       doctest::Contains("adaptive"), ParseError);
  std::string no_c01 = kMinimal;
  no_c01.erase(no_c01.find("c01 = 0.3\n"), 10);
  CHECK_THROWS_WITH_AS(parse(no_c01), doctest::Contains("c01"), ConfigError);
  std::string foreign = kMinimal;
  foreign.insert(foreign.find("c01"), "media_k1 = 2\n");
  CHECK_THROWS_WITH_AS(parse(foreign), doctest::Contains("not a parameter of model"), ParseError);
  CHECK_THROWS_AS(parse(std::string(kMinimal) + "[solver]\n"), ParseError);
}

TEST_CASE("config print/parse round trip") {
  for (auto model : {structure::Model::MooneyRivlin, structure::Model::Artery})
    CHECK(parse(io::print_config(io::benchmark_config(model))) == io::benchmark_config(model));
  test::Gen g(61);
  for (int k = 0; k < 20; ++k) {
    const bool artery = k % 2;
    auto c = io::benchmark_config(artery ? structure::Model::Artery : structure::Model::MooneyRivlin);
    c.radius = g.uniform(0.5, 3.0);
    c.mu_poise = g.uniform(0.01, 0.1);
    // Only the keys of the chosen model are printed.
    if (artery)
      c.media_alpha = g.uniform(0.0, 90.0);
    else
      c.c01 = g.uniform(0.0, 1.0);
    c.kappa = std::exp(g.uniform(1.0, 20.0));
    c.n_axial = g.integer(1, 100);
    c.eps_linear = g.uniform(1e-12, 1e-2);
    c.tolerance_mode = k % 3 ? ToleranceMode::Adaptive : ToleranceMode::Fixed;
    c.structure_solver = k % 4 ? coupling::LinearSolverKind::Krylov : coupling::LinearSolverKind::Amg;
    c.output_dir = k % 5 ? "" : "results/run" + std::to_string(k);
    CHECK(parse(io::print_config(c)) == c);
  }
}

TEST_CASE("VTK: single tetrahedron with zero fields") {
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const std::vector<std::array<Index, 4>> tets{{0, 1, 2, 3}};
  const std::vector<io::PointField> fields{{"velocity", 3, Vec(12, 0.0)}, {"fluid_pressure", 1, Vec(4, 0.0)}};
  std::stringstream ss;
  io::write_vtk(ss, pts, tets, fields);
  const std::string text = ss.str();
  CHECK(text.find("POINTS 4 double") != std::string::npos);
  CHECK(text.find("CELLS 1 5") != std::string::npos);
  CHECK(text.find("0.000000000e+00 0.000000000e+00 1.000000000e+00") != std::string::npos);
  const auto d = io::read_vtk(ss);
  CHECK(d.points == pts);
  CHECK(d.tets == tets);
  CHECK(d.cell_types == std::vector<int>{10});
  REQUIRE(d.field("velocity"));
  CHECK(d.field("velocity")->components == 3);
  CHECK(d.field("fluid_pressure")->values == Vec(4, 0.0));
}

TEST_CASE("VTK: coordinates survive a write/read round trip to printed precision") {
  const auto mesh = mesh::generate_tube_mesh(test::tiny_tube());
  std::vector<std::array<Index, 4>> tets;
  for (const auto& t : mesh.tets) tets.push_back(t.v);
  std::stringstream ss;
  io::write_vtk(ss, mesh.vertices, tets, {});
  const auto d = io::read_vtk(ss);
  REQUIRE(d.points.size() == mesh.vertices.size());
  for (std::size_t i = 0; i < d.points.size(); ++i)
    CHECK((d.points[i] - mesh.vertices[i]).norm() <= 1e-9 * (1.0 + mesh.vertices[i].norm()));
  CHECK(d.tets == tets);
}

TEST_CASE("VTK: field size mismatch is rejected") {
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const std::vector<std::array<Index, 4>> tets{{0, 1, 2, 3}};
  const std::vector<io::PointField> fields{{"velocity", 3, Vec(9, 0.0)}};
  std::stringstream ss;
  CHECK_THROWS_AS(io::write_vtk(ss, pts, tets, fields), Error);
  CHECK_THROWS_AS(io::write_vtk("/nonexistent/dir/x.vtk", pts, tets, {}), Error);
}

TEST_CASE("output directory precedence") {
  io::Config c;
  ::unsetenv("FSIKIT_OUT");
  CHECK(io::resolve_output_dir("", c) == "fsikit_out");
  ::setenv("FSIKIT_OUT", "/tmp/env_out", 1);
  CHECK(io::resolve_output_dir("", c) == "/tmp/env_out");
  c.output_dir = "cfg_out";
  CHECK(io::resolve_output_dir("", c) == "cfg_out");
  CHECK(io::resolve_output_dir("cli_out", c) == "cli_out");
  ::unsetenv("FSIKIT_OUT");
}

TEST_CASE("zero-pulse run writes a snapshot of zeros and logs with the fixed headers") {
  const auto c = io::load_config(kSource / "tests/data/zero_pulse.cfg");
  const auto dir = scratch_dir("zero_pulse");
  std::ostringstream progress;
  const auto sum = io::run_simulation(c, dir, progress);
  CHECK(sum.steps.size() == 1);
  CHECK(sum.snapshots == 1);
  const auto d = io::read_vtk(dir / "step_0001.vtk");
  for (const char* name : {"velocity", "fluid_pressure", "displacement", "solid_pressure"}) {
    REQUIRE(d.field(name));
    for (double v : d.field(name)->values) CHECK(v == 0.0);
  }
  std::ifstream dn(dir / "dn_log.csv"), nw(dir / "newton_log.csv");
  std::string h1, h2, row;
  std::getline(dn, h1);
  std::getline(nw, h2);
  CHECK(h1 == "step,dn_iter,interface_residual,aitken_omega");
  CHECK(h2 == "step,dn_iter,field,newton_iter,outer_norm,inner_tol,inner_iters");
  std::getline(dn, row);
  CHECK(row == "1,1,0,0");
}
