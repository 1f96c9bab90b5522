#pragma once

// Internal constrained-Delaunay engine behind the mesh generator. Incremental
// Bowyer-Watson insertion with exact-arithmetic predicate fallback, segment
// recovery by edge flipping, and smoothing with local Delaunay restoration.

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace cloak::detail {

using Vec2 = Eigen::Vector2d;

struct DelaunayMesh {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> triangles;  // CCW vertex indices
  std::vector<std::array<int, 3>> neighbors;  // neighbor opposite vertex i, -1 if none
  std::vector<uint8_t> vertex_constrained;    // 1 if the vertex lies on a constraint
  // constrained edge lookup by sorted vertex pair
  bool is_constrained(int a, int b) const;
  std::vector<std::pair<int, int>> constrained_edges;

  // Walks from a hint triangle to the triangle containing p (barycentric
  // tolerance tol); returns -1 if outside the triangulated region.
  int locate(const Vec2& p, int hint = 0, double tol = 1e-12) const;
};

// Delaunay triangulation of `points` conforming to `segments` (pairs of point
// indices). Every segment must appear as an edge of the result; throws
// std::runtime_error if recovery fails. The result covers the convex hull.
DelaunayMesh triangulate(std::span<const Vec2> points,
                         std::span<const std::pair<int, int>> segments);

// Laplacian smoothing of unconstrained vertices with positivity guard,
// followed by Lawson flips to restore the constrained-Delaunay property.
// `region` tags ride along through flips (both triangles of a flipped pair
// always share a tag because region interfaces are constrained).
void smooth(DelaunayMesh& mesh, std::vector<int>* region_tags, int passes);

// Exact-sign orientation test: >0 if (a,b,c) is CCW.
double orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

}  // namespace cloak::detail
