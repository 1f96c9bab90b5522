#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "cloak/geometry.hpp"

using namespace cloak::geometry;

namespace {

GeometrySpec circle_spec() {
  GeometrySpec spec;
  spec.outer = Shape::circle(1.0);
  spec.cavity = Shape::circle(0.5);
  return spec;
}

double analytic_region_area(const GeometrySpec& spec, Region r) {
  switch (r) {
    case Region::Shell: return spec.outer.area() - spec.cavity.area();
    case Region::Lossy: return spec.cavity.area() - (spec.core ? spec.core->area() : 0.0);
    case Region::Core: return spec.core ? spec.core->area() : 0.0;
    default: return 0.0;
  }
}

void check_region_areas(const Mesh& mesh, const GeometrySpec& spec, double h) {
  for (Region r : {Region::Shell, Region::Lossy, Region::Core}) {
    const double expect = analytic_region_area(spec, r);
    if (expect == 0.0) continue;
    if (!mesh.has_region(r)) continue;
    const double got = mesh.region_area(r);
    CHECK(std::abs(got - expect) / expect <= 5.0 * h * h);
  }
}

void check_centroid_tags(const Mesh& mesh, const GeometrySpec& spec) {
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto c = mesh.centroid(t);
    Region analytic;
    if (spec.core && spec.core->contains(c)) analytic = Region::Core;
    else if (spec.cavity.contains(c)) analytic = Region::Lossy;
    else if (spec.outer.contains(c)) analytic = Region::Shell;
    else if (std::max(std::abs(c.x()), std::abs(c.y())) < spec.box_halfwidth) analytic = Region::Exterior;
    else analytic = Region::Pml;
    CAPTURE(t);
    CHECK(mesh.triangles[t].region == analytic);
  }
}

}  // namespace

TEST_CASE("mesh: circle annulus area") {
  const double h = 0.1;
  const auto mesh = generate_mesh(circle_spec(), h);
  mesh.check();
  const double shell = mesh.region_area(Region::Shell);
  CHECK(std::abs(shell - M_PI * (1.0 - 0.25)) / (M_PI * 0.75) <= 5.0 * h * h);
  check_region_areas(mesh, circle_spec(), h);
  check_centroid_tags(mesh, circle_spec());
}

TEST_CASE("mesh: square shell area") {
  GeometrySpec spec;
  spec.outer = Shape::square(1.0);
  spec.cavity = Shape::square(0.5);
  const double h = 0.1;
  const auto mesh = generate_mesh(spec, h);
  const double shell = mesh.region_area(Region::Shell);
  CHECK(std::abs(shell - 3.0) / 3.0 <= 5.0 * h * h);
  check_centroid_tags(mesh, spec);
  // Square corners must be mesh nodes.
  for (const Vec2 corner : {Vec2(1, 1), Vec2(1, -1), Vec2(-1, 1), Vec2(-1, -1)}) {
    bool found = false;
    for (const auto& p : mesh.nodes) found |= (p - corner).norm() < 1e-14;
    CHECK(found);
  }
}

TEST_CASE("mesh: ellipse shell area") {
  GeometrySpec spec;
  spec.outer = Shape::ellipse(1.0, 1.2);
  spec.cavity = Shape::ellipse(0.5, 0.6);
  const double h = 0.1;
  const auto mesh = generate_mesh(spec, h);
  const double expect = M_PI * (1.2 - 0.3);  // pi(ab - a'b')
  CHECK(std::abs(mesh.region_area(Region::Shell) - expect) / expect <= 5.0 * h * h);
  check_centroid_tags(mesh, spec);
}

TEST_CASE("mesh: quality and boundary fidelity across h") {
  for (double h : {0.2, 0.1, 0.05}) {
    CAPTURE(h);
    const auto mesh = generate_mesh(circle_spec(), h);
    CHECK(mesh.min_angle_deg() >= 20.0);
    // Every dOmega node sits on the unit circle to 1e-10 * diameter.
    for (const auto& e : mesh.boundary_edges) {
      if (e.tag != BoundaryTag::DOmega) continue;
      CHECK(std::abs(mesh.nodes[e.a].norm() - 1.0) < 1e-10 * 2.0);
    }
  }
}

TEST_CASE("mesh: quality for ellipse and square geometries") {
  GeometrySpec ell;
  ell.outer = Shape::ellipse(1.0, 1.2);
  ell.cavity = Shape::ellipse(0.5, 0.6);
  GeometrySpec sq;
  sq.outer = Shape::square(1.0);
  sq.cavity = Shape::square(0.5);
  for (double h : {0.2, 0.1, 0.05}) {
    CAPTURE(h);
    CHECK(generate_mesh(ell, h).min_angle_deg() >= 20.0);
    CHECK(generate_mesh(sq, h).min_angle_deg() >= 20.0);
  }
}

TEST_CASE("mesh: boundary length converges at O(h^2)") {
  const double perimeter = 2.0 * M_PI;
  double prev_err = 0.0;
  int step = 0;
  for (double h : {0.2, 0.1, 0.05}) {
    const auto mesh = generate_mesh(circle_spec(), h);
    const double err = std::abs(mesh.boundary_length(BoundaryTag::DOmega) - perimeter);
    if (step > 0) CHECK(prev_err / err >= 3.0);
    prev_err = err;
    ++step;
  }
}

TEST_CASE("mesh: exterior mesh with PML collar") {
  GeometrySpec spec = circle_spec();
  MeshOptions opts;
  opts.include_exterior = true;
  const double h = 0.15;
  const auto mesh = generate_mesh(spec, h, opts);
  mesh.check();
  CHECK(mesh.has_region(Region::Exterior));
  CHECK(mesh.has_region(Region::Pml));
  CHECK(mesh.has_region(Region::Lossy));
  check_centroid_tags(mesh, spec);
  const double pml_area = 4.0 * (2.8 * 2.8 - 2.2 * 2.2);
  CHECK(std::abs(mesh.region_area(Region::Pml) - pml_area) / pml_area <= 5.0 * h * h);
  CHECK(mesh.min_angle_deg() >= 20.0);

  SUBCASE("idealized variant excludes the cavity") {
    opts.exclude_cavity = true;
    const auto cavity_mesh = generate_mesh(spec, h, opts);
    cavity_mesh.check();
    CHECK(!cavity_mesh.has_region(Region::Lossy));
    // dD stays tagged: it is the physical boundary of the excluded cavity.
    bool has_dd = false;
    for (const auto& e : cavity_mesh.boundary_edges) has_dd |= (e.tag == BoundaryTag::DD);
    CHECK(has_dd);
  }
}

TEST_CASE("mesh: three-layer lossy geometry with core") {
  GeometrySpec spec = circle_spec();
  spec.core = Shape::circle(0.3);
  MeshOptions opts;
  opts.include_exterior = true;
  const auto mesh = generate_mesh(spec, 0.1, opts);
  CHECK(mesh.has_region(Region::Core));
  check_region_areas(mesh, spec, 0.1);
  check_centroid_tags(mesh, spec);
  CHECK(mesh.min_angle_deg() >= 20.0);
}

TEST_CASE("mesh: generation errors") {
  GeometrySpec bad = circle_spec();
  bad.cavity = Shape::circle(1.5);  // cavity outside outer
  CHECK_THROWS_AS(generate_mesh(bad, 0.1), std::invalid_argument);

  GeometrySpec spec = circle_spec();
  CHECK_THROWS_AS(generate_mesh(spec, 0.6), std::invalid_argument);  // h > clearance
  CHECK_THROWS_AS(generate_mesh(spec, -0.1), std::invalid_argument);

  GeometrySpec tight = circle_spec();
  tight.outer = Shape::circle(2.0);  // Gamma radius 1.8 must clear Omega
  MeshOptions opts;
  opts.include_exterior = true;
  CHECK_THROWS_AS(generate_mesh(tight, 0.1, opts), std::invalid_argument);
}

TEST_CASE("mesh: export/import round trip") {
  const auto mesh = generate_mesh(circle_spec(), 0.2);
  const auto path = std::filesystem::temp_directory_path() / "cloak_mesh_roundtrip.txt";
  export_mesh(mesh, path.string());
  const auto back = import_mesh(path.string());
  REQUIRE(back.nodes.size() == mesh.nodes.size());
  REQUIRE(back.triangles.size() == mesh.triangles.size());
  REQUIRE(back.boundary_edges.size() == mesh.boundary_edges.size());
  for (size_t i = 0; i < mesh.nodes.size(); ++i) {
    CHECK(back.nodes[i].x() == mesh.nodes[i].x());  // bit-exact
    CHECK(back.nodes[i].y() == mesh.nodes[i].y());
  }
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    CHECK(back.triangles[i].v == mesh.triangles[i].v);
    CHECK(back.triangles[i].region == mesh.triangles[i].region);
  }
  for (size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
    CHECK(back.boundary_edges[i].a == mesh.boundary_edges[i].a);
    CHECK(back.boundary_edges[i].b == mesh.boundary_edges[i].b);
    CHECK(back.boundary_edges[i].tag == mesh.boundary_edges[i].tag);
  }
  std::filesystem::remove(path);
}

TEST_CASE("mesh: import rejects malformed files") {
  namespace fs = std::filesystem;
  const auto path = fs::temp_directory_path() / "cloak_mesh_bad.txt";
  {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    std::fputs("nodes 2 triangles 1 edges 0\n0 0\n1 0\n0 1 5 shell\n", f);
    std::fclose(f);
  }
  CHECK_THROWS(import_mesh(path.string()));  // node index 5 beyond count
  {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    std::fputs("vertices 1 triangles 0 edges 0\n0 0\n", f);
    std::fclose(f);
  }
  CHECK_THROWS(import_mesh(path.string()));  // bad header keyword
  fs::remove(path);
}

TEST_CASE("mesh: imported generated mesh passes invariants") {
  const auto mesh = generate_mesh(circle_spec(), 0.2);
  const auto path = std::filesystem::temp_directory_path() / "cloak_mesh_inv.txt";
  export_mesh(mesh, path.string());
  const auto back = import_mesh(path.string());
  back.check();
  CHECK(back.min_angle_deg() >= 20.0);
  std::filesystem::remove(path);
}

TEST_CASE("locate_point: vertex, centroid, outside") {
  const auto mesh = generate_mesh(circle_spec(), 0.2);
  const MeshLocator locator(mesh);

  // Centroid of a known triangle.
  const auto c = mesh.centroid(7);
  const auto hit = locator.locate(c);
  REQUIRE(hit.has_value());
  Vec2 rec = Vec2::Zero();
  for (int k = 0; k < 3; ++k) rec += hit->bary[k] * mesh.nodes[mesh.triangles[hit->triangle].v[k]];
  CHECK((rec - c).norm() < 1e-10 * 2.0);
  double bsum = hit->bary[0] + hit->bary[1] + hit->bary[2];
  CHECK(bsum == doctest::Approx(1.0).epsilon(1e-12));
  if (hit->triangle == 7) {
    for (int k = 0; k < 3; ++k) CHECK(hit->bary[k] == doctest::Approx(1.0 / 3).epsilon(1e-9));
  }

  // A vertex: some barycentric weight is 1 up to permutation.
  const Vec2 vx = mesh.nodes[mesh.triangles[3].v[0]];
  const auto vhit = locator.locate(vx);
  REQUIRE(vhit.has_value());
  CHECK(*std::max_element(vhit->bary.begin(), vhit->bary.end()) == doctest::Approx(1.0).epsilon(1e-9));

  // Far outside.
  CHECK(!locator.locate(Vec2(10.0, 0.0)).has_value());
  CHECK(!locate_point(mesh, Vec2(10.0, 0.0)).has_value());
}
