#pragma once

// Conforming triangular meshes of the nested cloak geometries: an optional
// core Sigma inside the cavity D inside the shell boundary Omega, optionally
// embedded in a square computational box with a PML collar.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cloak::geometry {

using Vec2 = Eigen::Vector2d;

enum class ShapeKind { Circle, Ellipse, Square };

struct Shape {
  ShapeKind kind = ShapeKind::Circle;
  double a = 1.0;  // circle: radius; ellipse: x semi-axis; square: halfwidth
  double b = 1.0;  // ellipse: y semi-axis (unused otherwise)

  static Shape circle(double r) { return {ShapeKind::Circle, r, r}; }
  static Shape ellipse(double ax, double ay) { return {ShapeKind::Ellipse, ax, ay}; }
  static Shape square(double halfwidth) { return {ShapeKind::Square, halfwidth, halfwidth}; }

  bool contains(const Vec2& p) const;
  // Signed "level" < 0 inside; approximate distance units near the curve.
  double boundary_distance(const Vec2& p) const;
  double circumradius() const;
  double area() const;
  double perimeter() const;
  // Boundary point at parameter t in [0,1), CCW. Circle/ellipse use the
  // angular parameter, squares the perimeter-arclength parameter with
  // corners at t = 0, 1/4, 1/2, 3/4.
  Vec2 point_at(double t) const;
  // Number of boundary samples resolving the curve at target edge length h
  // (with curvature guards; multiples of 4 for squares so corners are nodes).
  int sample_count(double h) const;
};

struct GeometrySpec {
  Shape outer = Shape::circle(1.0);   // Omega
  Shape cavity = Shape::circle(0.5);  // D
  std::optional<Shape> core;          // Sigma
  double box_halfwidth = 2.2;         // physical box for scattering runs
  double pml_thickness = 0.6;

  // Throws std::invalid_argument on nesting violations (strict clearance
  // between consecutive curves, positive sizes, Gamma radius 1.8 inside the
  // physical box when `with_exterior`).
  void validate(bool with_exterior) const;
  // Smallest gap between consecutive interfaces, used by the h-separation check.
  double min_feature_size(bool with_exterior) const;
};

enum class Region { Core, Lossy, Shell, Exterior, Pml };
enum class BoundaryTag { DSigma, DD, DOmega, Box };

const char* to_string(Region r);
const char* to_string(BoundaryTag t);
Region region_from_string(const std::string& s);
BoundaryTag boundary_tag_from_string(const std::string& s);

struct Mesh {
  struct Triangle {
    std::array<int, 3> v{};  // CCW
    Region region = Region::Shell;
  };
  struct BoundaryEdge {
    int a = 0, b = 0;  // directed CCW around the curve it discretizes
    BoundaryTag tag = BoundaryTag::DOmega;
  };

  std::vector<Vec2> nodes;
  std::vector<Triangle> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  double h = 0.0;

  double signed_area(int t) const;
  Vec2 centroid(int t) const;
  double min_angle_deg() const;
  double region_area(Region r) const;
  double boundary_length(BoundaryTag tag) const;
  bool has_region(Region r) const;

  // Structural sanity: positive areas, indices in range, edge conformity
  // (every edge shared by at most two triangles, consistently oriented).
  void check() const;
};

struct MeshOptions {
  bool include_exterior = false;  // add box + PML collar around Omega
  bool exclude_cavity = false;    // drop the inside of D (idealized cavity runs)
};

Mesh generate_mesh(const GeometrySpec& spec, double h, const MeshOptions& opts = {});

Mesh import_mesh(const std::string& path);
void export_mesh(const Mesh& mesh, const std::string& path);

struct PointLocation {
  int triangle = -1;
  std::array<double, 3> bary{};
};

// Grid-bucketed point location over an immutable mesh.
class MeshLocator {
 public:
  explicit MeshLocator(const Mesh& mesh);

  // Containing triangle with barycentric coordinates clamped to [0,1] and
  // renormalized; nullopt if x is outside the mesh (tolerance 1e-9 relative).
  std::optional<PointLocation> locate(const Vec2& x) const;

  // Best triangle when x may sit just outside the polygonal boundary (used
  // for sampling analytic curves); accepts barycentric violations up to
  // `max_violation` in length units.
  std::optional<PointLocation> locate_near(const Vec2& x, double max_violation) const;

 private:
  const Mesh* mesh_;
  Vec2 lo_, hi_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
  std::array<double, 3> barycentric(int t, const Vec2& x) const;
};

std::optional<PointLocation> locate_point(const Mesh& mesh, const Vec2& x);

}  // namespace cloak::geometry
