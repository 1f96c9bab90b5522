#include "cloak/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "delaunay.hpp"

namespace cloak::geometry {
namespace {

constexpr double kPi = 3.14159265358979323846;

double splitmix_unit(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  x = x ^ (x >> 31);
  return (static_cast<double>(x >> 11) / 9007199254740992.0) * 2.0 - 1.0;
}

uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

}  // namespace

bool Shape::contains(const Vec2& p) const {
  switch (kind) {
    case ShapeKind::Circle:
      return p.squaredNorm() < a * a;
    case ShapeKind::Ellipse: {
      const double u = p.x() / a, v = p.y() / b;
      return u * u + v * v < 1.0;
    }
    case ShapeKind::Square:
      return std::max(std::abs(p.x()), std::abs(p.y())) < a;
  }
  return false;
}

double Shape::boundary_distance(const Vec2& p) const {
  switch (kind) {
    case ShapeKind::Circle:
      return p.norm() - a;
    case ShapeKind::Ellipse: {
      const double u = p.x() / a, v = p.y() / b;
      const double phi = u * u + v * v - 1.0;
      const Vec2 grad(2.0 * p.x() / (a * a), 2.0 * p.y() / (b * b));
      const double g = std::max(grad.norm(), 2.0 / std::max(a, b) * 0.2);
      return phi / g;
    }
    case ShapeKind::Square:
      return std::max(std::abs(p.x()), std::abs(p.y())) - a;
  }
  return 0.0;
}

double Shape::circumradius() const {
  switch (kind) {
    case ShapeKind::Circle:
      return a;
    case ShapeKind::Ellipse:
      return std::max(a, b);
    case ShapeKind::Square:
      return a * std::sqrt(2.0);
  }
  return a;
}

double Shape::area() const {
  switch (kind) {
    case ShapeKind::Circle:
      return kPi * a * a;
    case ShapeKind::Ellipse:
      return kPi * a * b;
    case ShapeKind::Square:
      return 4.0 * a * a;
  }
  return 0.0;
}

double Shape::perimeter() const {
  switch (kind) {
    case ShapeKind::Circle:
      return 2.0 * kPi * a;
    case ShapeKind::Square:
      return 8.0 * a;
    case ShapeKind::Ellipse: {
      // Trapezoid rule on the smooth periodic speed; spectrally accurate.
      const int n = 4096;
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * i / n;
        sum += std::hypot(a * std::sin(t), b * std::cos(t));
      }
      return sum * 2.0 * kPi / n;
    }
  }
  return 0.0;
}

Vec2 Shape::point_at(double t) const {
  t -= std::floor(t);
  switch (kind) {
    case ShapeKind::Circle:
      return {a * std::cos(2.0 * kPi * t), a * std::sin(2.0 * kPi * t)};
    case ShapeKind::Ellipse:
      return {a * std::cos(2.0 * kPi * t), b * std::sin(2.0 * kPi * t)};
    case ShapeKind::Square: {
      const double s = t * 8.0 * a;  // perimeter position, corners at 2a steps
      if (s < 2.0 * a) return {a, -a + s};
      if (s < 4.0 * a) return {a - (s - 2.0 * a), a};
      if (s < 6.0 * a) return {-a, a - (s - 4.0 * a)};
      return {-a + (s - 6.0 * a), -a};
    }
  }
  return {0, 0};
}

int Shape::sample_count(double h) const {
  switch (kind) {
    case ShapeKind::Square: {
      const int per_side = std::max(2, static_cast<int>(std::ceil(2.0 * a / h)));
      return 4 * per_side;
    }
    case ShapeKind::Circle:
      return std::max(16, static_cast<int>(std::ceil(2.0 * kPi * a / h)));
    case ShapeKind::Ellipse: {
      const double rho_min = std::min(b * b / a, a * a / b);
      const int n_h = static_cast<int>(std::ceil(2.0 * kPi * std::max(a, b) / h));
      const int n_curv = static_cast<int>(std::ceil(perimeter() / (0.35 * rho_min)));
      return std::max({16, n_h, n_curv});
    }
  }
  return 16;
}

double GeometrySpec::min_feature_size(bool with_exterior) const {
  std::vector<Shape> curves;
  if (core) curves.push_back(*core);
  curves.push_back(cavity);
  curves.push_back(outer);
  double feat = std::numeric_limits<double>::max();
  for (size_t i = 0; i + 1 < curves.size(); ++i) {
    double gap = std::numeric_limits<double>::max();
    for (int k = 0; k < 512; ++k) {
      const Vec2 p = curves[i].point_at(k / 512.0);
      gap = std::min(gap, -curves[i + 1].boundary_distance(p));
    }
    feat = std::min(feat, gap);
  }
  if (with_exterior) {
    double gap = std::numeric_limits<double>::max();
    for (int k = 0; k < 512; ++k) {
      const Vec2 p = outer.point_at(k / 512.0);
      gap = std::min(gap, box_halfwidth - std::max(std::abs(p.x()), std::abs(p.y())));
    }
    feat = std::min({feat, gap, pml_thickness});
  }
  return feat;
}

void GeometrySpec::validate(bool with_exterior) const {
  auto positive = [](const Shape& s) { return s.a > 0.0 && s.b > 0.0; };
  if (!positive(outer) || !positive(cavity) || (core && !positive(*core))) {
    throw std::invalid_argument("geometry: shape sizes must be positive");
  }
  if (min_feature_size(with_exterior) <= 0.0) {
    throw std::invalid_argument("geometry: nested-shape violation (curves must have positive clearance)");
  }
  if (with_exterior) {
    if (box_halfwidth <= 0.0 || pml_thickness <= 0.0) {
      throw std::invalid_argument("geometry: box and PML dimensions must be positive");
    }
    if (!(outer.circumradius() < 1.8 && 1.8 < box_halfwidth)) {
      throw std::invalid_argument(
          "geometry: evaluation circle radius 1.8 must lie strictly between Omega and the box");
    }
  }
}

const char* to_string(Region r) {
  switch (r) {
    case Region::Core: return "core";
    case Region::Lossy: return "lossy";
    case Region::Shell: return "shell";
    case Region::Exterior: return "exterior";
    case Region::Pml: return "pml";
  }
  return "?";
}

const char* to_string(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::DSigma: return "dSigma";
    case BoundaryTag::DD: return "dD";
    case BoundaryTag::DOmega: return "dOmega";
    case BoundaryTag::Box: return "box";
  }
  return "?";
}

Region region_from_string(const std::string& s) {
  if (s == "core") return Region::Core;
  if (s == "lossy") return Region::Lossy;
  if (s == "shell") return Region::Shell;
  if (s == "exterior") return Region::Exterior;
  if (s == "pml") return Region::Pml;
  throw std::invalid_argument("unknown region tag: " + s);
}

BoundaryTag boundary_tag_from_string(const std::string& s) {
  if (s == "dSigma") return BoundaryTag::DSigma;
  if (s == "dD") return BoundaryTag::DD;
  if (s == "dOmega") return BoundaryTag::DOmega;
  if (s == "box") return BoundaryTag::Box;
  throw std::invalid_argument("unknown boundary tag: " + s);
}

double Mesh::signed_area(int t) const {
  const Vec2& p0 = nodes[triangles[t].v[0]];
  const Vec2& p1 = nodes[triangles[t].v[1]];
  const Vec2& p2 = nodes[triangles[t].v[2]];
  return 0.5 * ((p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y()));
}

Vec2 Mesh::centroid(int t) const {
  return (nodes[triangles[t].v[0]] + nodes[triangles[t].v[1]] + nodes[triangles[t].v[2]]) / 3.0;
}

double Mesh::min_angle_deg() const {
  double min_angle = 180.0;
  for (const auto& tri : triangles) {
    for (int i = 0; i < 3; ++i) {
      const Vec2 u = nodes[tri.v[(i + 1) % 3]] - nodes[tri.v[i]];
      const Vec2 v = nodes[tri.v[(i + 2) % 3]] - nodes[tri.v[i]];
      const double cosang = u.dot(v) / (u.norm() * v.norm());
      min_angle = std::min(min_angle, std::acos(std::clamp(cosang, -1.0, 1.0)) * 180.0 / kPi);
    }
  }
  return min_angle;
}

double Mesh::region_area(Region r) const {
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
    if (triangles[t].region == r) sum += signed_area(t);
  }
  return sum;
}

double Mesh::boundary_length(BoundaryTag tag) const {
  double sum = 0.0;
  for (const auto& e : boundary_edges) {
    if (e.tag == tag) sum += (nodes[e.b] - nodes[e.a]).norm();
  }
  return sum;
}

bool Mesh::has_region(Region r) const {
  return std::any_of(triangles.begin(), triangles.end(),
                     [r](const Triangle& t) { return t.region == r; });
}

void Mesh::check() const {
  const int n = static_cast<int>(nodes.size());
  std::unordered_map<uint64_t, int> edge_use;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
    for (int v : triangles[t].v) {
      if (v < 0 || v >= n) throw std::runtime_error("mesh: triangle index out of range");
    }
    if (signed_area(t) <= 0.0) throw std::runtime_error("mesh: non-positive triangle area");
    for (int e = 0; e < 3; ++e) {
      ++edge_use[edge_key(triangles[t].v[e], triangles[t].v[(e + 1) % 3])];
    }
  }
  for (const auto& [k, count] : edge_use) {
    if (count > 2) throw std::runtime_error("mesh: edge shared by more than two triangles");
  }
  for (const auto& e : boundary_edges) {
    if (e.a < 0 || e.a >= n || e.b < 0 || e.b >= n) {
      throw std::runtime_error("mesh: boundary edge index out of range");
    }
    if (!edge_use.count(edge_key(e.a, e.b))) {
      throw std::runtime_error("mesh: boundary edge is not a triangle edge");
    }
  }
}

namespace {

struct CurveSamples {
  std::optional<BoundaryTag> tag;  // untagged curves (PML interface) stay internal
  std::vector<int> indices;        // global point indices, CCW
};

}  // namespace

Mesh generate_mesh(const GeometrySpec& spec, double h, const MeshOptions& opts) {
  spec.validate(opts.include_exterior);
  if (h <= 0.0) throw std::invalid_argument("generate_mesh: h must be positive");
  const double feature = spec.min_feature_size(opts.include_exterior);
  if (h >= feature) {
    throw std::invalid_argument("generate_mesh: h too coarse to separate the nested boundaries");
  }

  struct CurveSpec {
    Shape shape;
    std::optional<BoundaryTag> tag;
  };
  std::vector<CurveSpec> curve_specs;
  if (spec.core) curve_specs.push_back({*spec.core, BoundaryTag::DSigma});
  curve_specs.push_back({spec.cavity, BoundaryTag::DD});
  curve_specs.push_back({spec.outer, BoundaryTag::DOmega});
  if (opts.include_exterior) {
    curve_specs.push_back({Shape::square(spec.box_halfwidth), std::nullopt});
    curve_specs.push_back({Shape::square(spec.box_halfwidth + spec.pml_thickness), BoundaryTag::Box});
  }

  std::vector<Vec2> points;
  std::vector<std::pair<int, int>> segments;
  std::vector<CurveSamples> curves;
  for (const auto& cs : curve_specs) {
    CurveSamples samples;
    samples.tag = cs.tag;
    const int n = cs.shape.sample_count(h);
    const int base = static_cast<int>(points.size());
    for (int i = 0; i < n; ++i) {
      points.push_back(cs.shape.point_at(static_cast<double>(i) / n));
      samples.indices.push_back(base + i);
    }
    for (int i = 0; i < n; ++i) segments.emplace_back(base + i, base + (i + 1) % n);
    curves.push_back(std::move(samples));
  }

  // Hexagonal interior lattice with a clearance band around every curve and a
  // tiny deterministic jitter that breaks lattice cocircularity.
  const Shape& outermost = curve_specs.back().shape;
  const double extent = outermost.circumradius();
  const double margin = 0.62 * h;
  const double dy = h * std::sqrt(3.0) / 2.0;
  const int jmax = static_cast<int>(std::ceil(extent / dy)) + 1;
  const int imax = static_cast<int>(std::ceil(extent / h)) + 1;
  for (int j = -jmax; j <= jmax; ++j) {
    for (int i = -imax; i <= imax; ++i) {
      Vec2 p(i * h + (j & 1 ? 0.5 * h : 0.0), j * dy);
      p.x() += 1e-6 * h * splitmix_unit((static_cast<uint64_t>(j + jmax) << 24) ^ (i + imax));
      p.y() += 1e-6 * h * splitmix_unit((static_cast<uint64_t>(i + imax) << 24) ^ (j + jmax) ^ 0xabcdefull);
      if (outermost.boundary_distance(p) > -margin) continue;
      bool clear = true;
      for (size_t c = 0; c + 1 < curve_specs.size() && clear; ++c) {
        if (std::abs(curve_specs[c].shape.boundary_distance(p)) < margin) clear = false;
      }
      if (clear) points.push_back(p);
    }
  }

  detail::DelaunayMesh dm = detail::triangulate(points, segments);

  // Region tagging by flood fill; constrained interfaces act as walls.
  struct SeedSpec {
    Vec2 at;
    Region region;
  };
  std::vector<SeedSpec> seeds;
  const double r_sigma = spec.core ? spec.core->a : -1.0;
  const double r_cav = spec.cavity.a;
  const double r_out = spec.outer.a;
  if (spec.core) {
    seeds.push_back({{0.0, 0.0}, Region::Core});
    seeds.push_back({{0.5 * (r_sigma + r_cav), 0.0}, Region::Lossy});
  } else {
    seeds.push_back({{0.0, 0.0}, Region::Lossy});
  }
  seeds.push_back({{0.5 * (r_cav + r_out), 0.0}, Region::Shell});
  if (opts.include_exterior) {
    seeds.push_back({{0.5 * (spec.outer.circumradius() + spec.box_halfwidth), 0.0}, Region::Exterior});
    seeds.push_back({{spec.box_halfwidth + 0.5 * spec.pml_thickness, 0.0}, Region::Pml});
  }

  std::vector<int> tags(dm.triangles.size(), -1);
  for (const auto& seed : seeds) {
    const int t0 = dm.locate(seed.at, 0);
    if (t0 < 0) throw std::runtime_error("generate_mesh: region seed not found in mesh");
    if (tags[t0] != -1) throw std::runtime_error("generate_mesh: region seed collision");
    std::vector<int> stack = {t0};
    tags[t0] = static_cast<int>(seed.region);
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      for (int e = 0; e < 3; ++e) {
        const int s = dm.neighbors[t][e];
        if (s < 0 || tags[s] != -1) continue;
        const int a = dm.triangles[t][(e + 1) % 3], b = dm.triangles[t][(e + 2) % 3];
        if (dm.is_constrained(a, b)) continue;
        tags[s] = tags[t];
        stack.push_back(s);
      }
    }
  }
  for (int tag : tags) {
    if (tag < 0) throw std::runtime_error("generate_mesh: untagged triangle after flood fill");
  }

  detail::smooth(dm, &tags, 4);

  // Assemble the public mesh, optionally dropping cavity-interior triangles.
  std::vector<bool> keep(dm.triangles.size(), true);
  if (opts.exclude_cavity) {
    for (size_t t = 0; t < dm.triangles.size(); ++t) {
      const Region r = static_cast<Region>(tags[t]);
      if (r == Region::Lossy || r == Region::Core) keep[t] = false;
    }
  }

  std::vector<int> node_map(dm.points.size(), -1);
  Mesh mesh;
  mesh.h = h;
  for (size_t t = 0; t < dm.triangles.size(); ++t) {
    if (!keep[t]) continue;
    Mesh::Triangle tri;
    tri.region = static_cast<Region>(tags[t]);
    for (int k = 0; k < 3; ++k) {
      const int v = dm.triangles[t][k];
      if (node_map[v] < 0) {
        node_map[v] = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(dm.points[v]);
      }
      tri.v[k] = node_map[v];
    }
    mesh.triangles.push_back(tri);
  }
  for (const auto& curve : curves) {
    if (!curve.tag) continue;
    const int n = static_cast<int>(curve.indices.size());
    for (int i = 0; i < n; ++i) {
      const int a = node_map[curve.indices[i]];
      const int b = node_map[curve.indices[(i + 1) % n]];
      if (a < 0 || b < 0) continue;  // curve dropped with its region
      mesh.boundary_edges.push_back({a, b, *curve.tag});
    }
  }
  mesh.check();
  return mesh;
}

void export_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_mesh: cannot open " + path);
  out << "nodes " << mesh.nodes.size() << " triangles " << mesh.triangles.size() << " edges "
      << mesh.boundary_edges.size() << "\n";
  char buf[80];
  for (const Vec2& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x(), p.y());
    out << buf;
  }
  for (const auto& t : mesh.triangles) {
    out << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << to_string(t.region) << "\n";
  }
  for (const auto& e : mesh.boundary_edges) {
    out << e.a << ' ' << e.b << ' ' << to_string(e.tag) << "\n";
  }
  if (!out) throw std::runtime_error("export_mesh: write failed for " + path);
}

Mesh import_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("import_mesh: cannot open " + path);
  std::string kw_nodes, kw_tris, kw_edges;
  size_t n = 0, t = 0, e = 0;
  in >> kw_nodes >> n >> kw_tris >> t >> kw_edges >> e;
  if (!in || kw_nodes != "nodes" || kw_tris != "triangles" || kw_edges != "edges") {
    throw std::runtime_error("import_mesh: malformed header");
  }
  Mesh mesh;
  mesh.nodes.resize(n);
  for (size_t i = 0; i < n; ++i) {
    in >> mesh.nodes[i].x() >> mesh.nodes[i].y();
    if (!in) throw std::runtime_error("import_mesh: malformed node line");
  }
  mesh.triangles.resize(t);
  for (size_t i = 0; i < t; ++i) {
    std::string tag;
    auto& tri = mesh.triangles[i];
    in >> tri.v[0] >> tri.v[1] >> tri.v[2] >> tag;
    if (!in) throw std::runtime_error("import_mesh: malformed triangle line");
    tri.region = region_from_string(tag);
    for (int v : tri.v) {
      if (v < 0 || v >= static_cast<int>(n)) {
        throw std::runtime_error("import_mesh: triangle references node beyond node count");
      }
    }
  }
  mesh.boundary_edges.resize(e);
  for (size_t i = 0; i < e; ++i) {
    std::string tag;
    auto& be = mesh.boundary_edges[i];
    in >> be.a >> be.b >> tag;
    if (!in) throw std::runtime_error("import_mesh: malformed or untagged boundary edge line");
    be.tag = boundary_tag_from_string(tag);
    if (be.a < 0 || be.a >= static_cast<int>(n) || be.b < 0 || be.b >= static_cast<int>(n)) {
      throw std::runtime_error("import_mesh: boundary edge references node beyond node count");
    }
  }
  mesh.check();
  return mesh;
}

MeshLocator::MeshLocator(const Mesh& mesh) : mesh_(&mesh) {
  if (mesh.nodes.empty()) throw std::invalid_argument("MeshLocator: empty mesh");
  lo_ = hi_ = mesh.nodes[0];
  for (const Vec2& p : mesh.nodes) {
    lo_ = lo_.cwiseMin(p);
    hi_ = hi_.cwiseMax(p);
  }
  double total_area = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) total_area += mesh.signed_area(t);
  cell_ = std::max(2.0 * std::sqrt(total_area / std::max<size_t>(mesh.triangles.size(), 1)), 1e-12);
  nx_ = std::max(1, static_cast<int>((hi_.x() - lo_.x()) / cell_) + 1);
  ny_ = std::max(1, static_cast<int>((hi_.y() - lo_.y()) / cell_) + 1);
  buckets_.resize(static_cast<size_t>(nx_) * ny_);
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    Vec2 tlo = mesh.nodes[mesh.triangles[t].v[0]], thi = tlo;
    for (int k = 1; k < 3; ++k) {
      tlo = tlo.cwiseMin(mesh.nodes[mesh.triangles[t].v[k]]);
      thi = thi.cwiseMax(mesh.nodes[mesh.triangles[t].v[k]]);
    }
    const int x0 = std::clamp(static_cast<int>((tlo.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int x1 = std::clamp(static_cast<int>((thi.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int y0 = std::clamp(static_cast<int>((tlo.y() - lo_.y()) / cell_), 0, ny_ - 1);
    const int y1 = std::clamp(static_cast<int>((thi.y() - lo_.y()) / cell_), 0, ny_ - 1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        buckets_[static_cast<size_t>(y) * nx_ + x].push_back(t);
      }
    }
  }
}

std::array<double, 3> MeshLocator::barycentric(int t, const Vec2& x) const {
  const auto& tri = mesh_->triangles[t];
  const Vec2& p0 = mesh_->nodes[tri.v[0]];
  const Vec2& p1 = mesh_->nodes[tri.v[1]];
  const Vec2& p2 = mesh_->nodes[tri.v[2]];
  const double area2 = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
  const double l0 = ((p1.x() - x.x()) * (p2.y() - x.y()) - (p2.x() - x.x()) * (p1.y() - x.y())) / area2;
  const double l1 = ((p2.x() - x.x()) * (p0.y() - x.y()) - (p0.x() - x.x()) * (p2.y() - x.y())) / area2;
  return {l0, l1, 1.0 - l0 - l1};
}

std::optional<PointLocation> MeshLocator::locate(const Vec2& x) const {
  if (x.x() < lo_.x() - cell_ || x.x() > hi_.x() + cell_ || x.y() < lo_.y() - cell_ ||
      x.y() > hi_.y() + cell_) {
    return std::nullopt;
  }
  const int cx = std::clamp(static_cast<int>((x.x() - lo_.x()) / cell_), 0, nx_ - 1);
  const int cy = std::clamp(static_cast<int>((x.y() - lo_.y()) / cell_), 0, ny_ - 1);
  for (int t : buckets_[static_cast<size_t>(cy) * nx_ + cx]) {
    auto bary = barycentric(t, x);
    const double min_l = std::min({bary[0], bary[1], bary[2]});
    if (min_l >= -1e-9) {
      for (double& l : bary) l = std::clamp(l, 0.0, 1.0);
      const double sum = bary[0] + bary[1] + bary[2];
      for (double& l : bary) l /= sum;
      return PointLocation{t, bary};
    }
  }
  return std::nullopt;
}

std::optional<PointLocation> MeshLocator::locate_near(const Vec2& x, double max_violation) const {
  if (auto hit = locate(x)) return hit;
  const int cx = std::clamp(static_cast<int>((x.x() - lo_.x()) / cell_), 0, nx_ - 1);
  const int cy = std::clamp(static_cast<int>((x.y() - lo_.y()) / cell_), 0, ny_ - 1);
  int best_t = -1;
  double best_violation = max_violation;
  std::array<double, 3> best_bary{};
  for (int ring = 0; ring <= 1; ++ring) {
    for (int dy = -ring; dy <= ring; ++dy) {
      for (int dx = -ring; dx <= ring; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
        const int X = cx + dx, Y = cy + dy;
        if (X < 0 || X >= nx_ || Y < 0 || Y >= ny_) continue;
        for (int t : buckets_[static_cast<size_t>(Y) * nx_ + X]) {
          const auto bary = barycentric(t, x);
          // Convert barycentric violation to a length via the matching height.
          const auto& tri = mesh_->triangles[t];
          double viol = 0.0;
          for (int i = 0; i < 3; ++i) {
            if (bary[i] >= 0.0) continue;
            const Vec2 e = mesh_->nodes[tri.v[(i + 2) % 3]] - mesh_->nodes[tri.v[(i + 1) % 3]];
            const double height = 2.0 * std::abs(mesh_->signed_area(t)) / e.norm();
            viol = std::max(viol, -bary[i] * height);
          }
          if (viol < best_violation) {
            best_violation = viol;
            best_t = t;
            best_bary = bary;
          }
        }
      }
    }
  }
  if (best_t < 0) return std::nullopt;
  for (double& l : best_bary) l = std::clamp(l, 0.0, 1.0);
  const double sum = best_bary[0] + best_bary[1] + best_bary[2];
  for (double& l : best_bary) l /= sum;
  return PointLocation{best_t, best_bary};
}

std::optional<PointLocation> locate_point(const Mesh& mesh, const Vec2& x) {
  return MeshLocator(mesh).locate(x);
}

}  // namespace cloak::geometry
