#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <boost/multiprecision/cpp_int.hpp>

namespace cloak::detail {
namespace {

using Rational = boost::multiprecision::cpp_rational;

inline uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

double orient2d_exact(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Rational det = (Rational(a.x()) - Rational(c.x())) * (Rational(b.y()) - Rational(c.y())) -
                       (Rational(a.y()) - Rational(c.y())) * (Rational(b.x()) - Rational(c.x()));
  const int s = det.sign();
  return static_cast<double>(s);
}

double incircle_exact(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const Rational adx = Rational(a.x()) - Rational(d.x());
  const Rational ady = Rational(a.y()) - Rational(d.y());
  const Rational bdx = Rational(b.x()) - Rational(d.x());
  const Rational bdy = Rational(b.y()) - Rational(d.y());
  const Rational cdx = Rational(c.x()) - Rational(d.x());
  const Rational cdy = Rational(c.y()) - Rational(d.y());
  const Rational alift = adx * adx + ady * ady;
  const Rational blift = bdx * bdx + bdy * bdy;
  const Rational clift = cdx * cdx + cdy * cdy;
  const Rational det = alift * (bdx * cdy - cdx * bdy) - blift * (adx * cdy - cdx * ady) +
                       clift * (adx * bdy - bdx * ady);
  return static_cast<double>(det.sign());
}

// Strictly-inside-circumcircle test for CCW triangle (a,b,c); result sign
// only. Filtered double evaluation with exact rational fallback.
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double det = alift * (bdx * cdy - cdx * bdy) - blift * (adx * cdy - cdx * ady) +
                     clift * (adx * bdy - bdx * ady);
  const double permanent = alift * (std::abs(bdx * cdy) + std::abs(cdx * bdy)) +
                           blift * (std::abs(adx * cdy) + std::abs(cdx * ady)) +
                           clift * (std::abs(adx * bdy) + std::abs(bdx * ady));
  const double errbound = 1.2e-14 * permanent;
  if (std::abs(det) > errbound) return det;
  return incircle_exact(a, b, c, d);
}

struct EdgeMap {
  // sorted vertex pair -> (triangle, local edge index opposite that index's vertex)
  std::unordered_map<uint64_t, std::pair<int, int>> map;
};

class Builder {
 public:
  std::vector<Vec2> pts;
  std::vector<std::array<int, 3>> tri;
  std::vector<std::array<int, 3>> nbr;
  std::unordered_set<uint64_t> constrained;
  int last_tri = 0;

  int locate(const Vec2& p, int hint) const {
    int t = (hint >= 0 && hint < static_cast<int>(tri.size())) ? hint : 0;
    const int cap = static_cast<int>(tri.size()) * 4 + 64;
    for (int step = 0; step < cap; ++step) {
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int e = (k + step) % 3;
        const int a = tri[t][(e + 1) % 3], b = tri[t][(e + 2) % 3];
        if (orient2d(pts[a], pts[b], p) < 0.0) {
          const int next = nbr[t][e];
          if (next < 0) return -1;
          t = next;
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
    // Fallback for pathological walks.
    for (int t2 = 0; t2 < static_cast<int>(tri.size()); ++t2) {
      bool inside = true;
      for (int e = 0; e < 3; ++e) {
        if (orient2d(pts[tri[t2][(e + 1) % 3]], pts[tri[t2][(e + 2) % 3]], p) < 0.0) {
          inside = false;
          break;
        }
      }
      if (inside) return t2;
    }
    return -1;
  }

  void insert_point(int pi) {
    const Vec2& p = pts[pi];
    const int t0 = locate(p, last_tri);
    if (t0 < 0) throw std::runtime_error("delaunay: point outside triangulation");
    for (int v : tri[t0]) {
      if (pts[v] == p) throw std::runtime_error("delaunay: duplicate point");
    }
    // Bowyer-Watson cavity: all triangles whose circumcircle strictly
    // contains p, grown from the containing triangle.
    std::vector<int> cavity = {t0};
    std::unordered_set<int> in_cavity = {t0};
    std::vector<int> stack = {t0};
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      for (int e = 0; e < 3; ++e) {
        const int s = nbr[t][e];
        if (s < 0 || in_cavity.count(s)) continue;
        if (incircle(pts[tri[s][0]], pts[tri[s][1]], pts[tri[s][2]], p) > 0.0) {
          in_cavity.insert(s);
          cavity.push_back(s);
          stack.push_back(s);
        }
      }
    }
    // Directed boundary edges of the cavity run CCW around it.
    struct BEdge {
      int a, b, outer;
    };
    std::vector<BEdge> boundary;
    for (int t : cavity) {
      for (int e = 0; e < 3; ++e) {
        const int s = nbr[t][e];
        if (s >= 0 && in_cavity.count(s)) continue;
        boundary.push_back({tri[t][(e + 1) % 3], tri[t][(e + 2) % 3], s});
      }
    }
    // Fan from p, reusing cavity slots then appending. Outer neighbors are
    // re-pointed by matching the shared vertex pair (slot reuse makes the
    // cavity membership test unreliable here).
    std::vector<int> slots;
    for (int t : cavity) slots.push_back(t);
    while (slots.size() < boundary.size()) {
      slots.push_back(static_cast<int>(tri.size()));
      tri.push_back({-1, -1, -1});
      nbr.push_back({-1, -1, -1});
    }
    std::unordered_map<int, int> fan_at_a;  // boundary start vertex -> new triangle
    std::unordered_map<int, int> fan_at_b;
    for (size_t i = 0; i < boundary.size(); ++i) {
      const int t = slots[i];
      tri[t] = {boundary[i].a, boundary[i].b, pi};
      nbr[t] = {-1, -1, boundary[i].outer};
      const int outer = boundary[i].outer;
      if (outer >= 0) {
        for (int e = 0; e < 3; ++e) {
          const int x = tri[outer][(e + 1) % 3], y = tri[outer][(e + 2) % 3];
          if ((x == boundary[i].b && y == boundary[i].a)) nbr[outer][e] = t;
        }
      }
      fan_at_a[boundary[i].a] = t;
      fan_at_b[boundary[i].b] = t;
    }
    for (size_t i = 0; i < boundary.size(); ++i) {
      const int t = slots[i];
      // neighbor opposite vertex 0 (= a) shares edge (b, p): the fan triangle
      // starting at b; opposite vertex 1 (= b) shares (p, a).
      nbr[t][0] = fan_at_a.at(boundary[i].b);
      nbr[t][1] = fan_at_b.at(boundary[i].a);
    }
    last_tri = slots.front();
  }

  bool flip(int t, int e, EdgeMap* em) {
    const int s = nbr[t][e];
    if (s < 0) return false;
    int j = -1;
    for (int k = 0; k < 3; ++k) {
      if (nbr[s][k] == t) j = k;
    }
    if (j < 0) throw std::runtime_error("delaunay: broken adjacency");
    const int A = tri[t][e];
    const int B = tri[t][(e + 1) % 3];
    const int C = tri[t][(e + 2) % 3];
    const int D = tri[s][j];
    // Validity: both new triangles (A,B,D) and (A,D,C) must be strictly CCW.
    if (orient2d(pts[A], pts[B], pts[D]) <= 0.0) return false;
    if (orient2d(pts[A], pts[D], pts[C]) <= 0.0) return false;
    const int nB = nbr[t][(e + 1) % 3];  // opp B across (C,A)
    const int nC = nbr[t][(e + 2) % 3];  // opp C across (A,B)
    const int mB = nbr[s][(j + 2) % 3];  // opp B' across (D,C) in s: s=(D,C,B)
    const int mC = nbr[s][(j + 1) % 3];  // opp C' across (B,D)
    tri[t] = {A, B, D};
    nbr[t] = {mC, s, nC};
    tri[s] = {A, D, C};
    nbr[s] = {mB, nB, t};
    auto repoint = [&](int out, int from, int to) {
      if (out < 0) return;
      for (int k = 0; k < 3; ++k) {
        if (nbr[out][k] == from) nbr[out][k] = to;
      }
    };
    repoint(mC, s, t);
    repoint(nB, t, s);
    if (em) {
      em->map.erase(edge_key(B, C));
      em->map[edge_key(A, D)] = {t, 1};
      em->map[edge_key(A, B)] = {t, 2};
      em->map[edge_key(B, D)] = {t, 0};
      em->map[edge_key(D, C)] = {s, 0};
      em->map[edge_key(C, A)] = {s, 1};
    }
    return true;
  }

  void build_edge_map(EdgeMap& em) const {
    em.map.clear();
    for (int t = 0; t < static_cast<int>(tri.size()); ++t) {
      for (int e = 0; e < 3; ++e) {
        em.map[edge_key(tri[t][(e + 1) % 3], tri[t][(e + 2) % 3])] = {t, e};
      }
    }
  }

  // Flip crossing edges until segment (a,b) is an edge (Sloan's algorithm).
  void recover_segment(int a, int b, EdgeMap& em) {
    if (em.map.count(edge_key(a, b))) {
      constrained.insert(edge_key(a, b));
      return;
    }
    const Vec2& pa = pts[a];
    const Vec2& pb = pts[b];
    auto crosses_ab = [&](int u, int v) {
      const double ou = orient2d(pa, pb, pts[u]);
      const double ov = orient2d(pa, pb, pts[v]);
      if (ou * ov >= 0.0) return false;
      const double oa = orient2d(pts[u], pts[v], pa);
      const double ob = orient2d(pts[u], pts[v], pb);
      return oa * ob < 0.0;
    };
    std::deque<std::pair<int, int>> queue;
    {
      // Start triangle in the star of a whose far edge the segment exits.
      int t = -1, e_opp = -1, u = -1, v = -1;
      for (int tt = 0; tt < static_cast<int>(tri.size()) && t < 0; ++tt) {
        for (int e = 0; e < 3; ++e) {
          if (tri[tt][e] != a) continue;
          const int x = tri[tt][(e + 1) % 3], y = tri[tt][(e + 2) % 3];
          if (crosses_ab(x, y) && orient2d(pa, pb, pts[x]) > 0.0) {
            t = tt;
            e_opp = e;
            u = x;
            v = y;
          }
          break;
        }
      }
      if (t < 0) throw std::runtime_error("delaunay: cannot start segment recovery (collinear vertex on constraint?)");
      // March across crossing edges collecting them.
      queue.emplace_back(u, v);
      int cur = nbr[t][e_opp];
      int L = u, R = v;
      while (cur >= 0) {
        int z = -1;
        for (int vv : tri[cur]) {
          if (vv != L && vv != R) z = vv;
        }
        if (z == b) break;
        const double oz = orient2d(pa, pb, pts[z]);
        if (oz == 0.0) throw std::runtime_error("delaunay: constraint passes through a vertex");
        if (oz > 0.0) {
          queue.emplace_back(z, R);
          L = z;
        } else {
          queue.emplace_back(L, z);
          R = z;
        }
        const auto it = em.map.find(edge_key(L, R));
        if (it == em.map.end()) throw std::runtime_error("delaunay: lost crossing edge");
        const auto [t2, e2] = it->second;
        cur = (nbr[t2][e2] == cur) ? t2 : nbr[t2][e2];
      }
    }
    size_t guard = 400 * (queue.size() + 8);
    while (!queue.empty()) {
      if (guard-- == 0) throw std::runtime_error("delaunay: segment recovery did not terminate");
      auto [u, v] = queue.front();
      queue.pop_front();
      const auto it = em.map.find(edge_key(u, v));
      if (it == em.map.end()) continue;  // already flipped away
      if (!crosses_ab(u, v)) continue;
      const auto [t, e] = it->second;
      // The diagonal after the flip joins the two apexes.
      const int A = tri[t][e];
      const int s = nbr[t][e];
      if (s < 0) throw std::runtime_error("delaunay: crossing edge on hull");
      int D = -1;
      for (int k = 0; k < 3; ++k) {
        if (nbr[s][k] == t) D = tri[s][k];
      }
      if (!flip(t, e, &em)) {
        queue.emplace_back(u, v);  // not convex yet; retry later
        continue;
      }
      if (crosses_ab(A, D)) queue.emplace_back(A, D);
    }
    if (!em.map.count(edge_key(a, b))) {
      throw std::runtime_error("delaunay: segment recovery failed");
    }
    constrained.insert(edge_key(a, b));
  }

  // Lawson sweeps restoring the (constrained) Delaunay property.
  void delaunay_flips(EdgeMap* em) {
    for (int pass = 0; pass < 80; ++pass) {
      int flips = 0;
      for (int t = 0; t < static_cast<int>(tri.size()); ++t) {
        for (int e = 0; e < 3; ++e) {
          const int s = nbr[t][e];
          if (s < 0 || s < t) continue;
          const int B = tri[t][(e + 1) % 3], C = tri[t][(e + 2) % 3];
          if (constrained.count(edge_key(B, C))) continue;
          int D = -1;
          for (int k = 0; k < 3; ++k) {
            if (nbr[s][k] == t) D = tri[s][k];
          }
          if (D < 0) continue;
          if (incircle(pts[tri[t][0]], pts[tri[t][1]], pts[tri[t][2]], pts[D]) > 0.0) {
            if (flip(t, e, em)) ++flips;
          }
        }
      }
      if (flips == 0) return;
    }
  }
};

}  // namespace

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double detleft = (a.x() - c.x()) * (b.y() - c.y());
  const double detright = (a.y() - c.y()) * (b.x() - c.x());
  const double det = detleft - detright;
  const double detsum = std::abs(detleft) + std::abs(detright);
  if (std::abs(det) > 3.4e-16 * detsum) return det;
  if (det == 0.0 && detsum == 0.0) return 0.0;
  return orient2d_exact(a, b, c);
}

bool DelaunayMesh::is_constrained(int a, int b) const {
  const auto key = std::make_pair(std::min(a, b), std::max(a, b));
  return std::binary_search(constrained_edges.begin(), constrained_edges.end(), key);
}

int DelaunayMesh::locate(const Vec2& p, int hint, double tol) const {
  int t = (hint >= 0 && hint < static_cast<int>(triangles.size())) ? hint : 0;
  const int cap = static_cast<int>(triangles.size()) * 4 + 64;
  for (int step = 0; step < cap; ++step) {
    bool moved = false;
    for (int k = 0; k < 3; ++k) {
      const int e = (k + step) % 3;
      const int a = triangles[t][(e + 1) % 3], b = triangles[t][(e + 2) % 3];
      if (orient2d(points[a], points[b], p) < -tol) {
        const int next = neighbors[t][e];
        if (next < 0) return -1;
        t = next;
        moved = true;
        break;
      }
    }
    if (!moved) return t;
  }
  return -1;
}

DelaunayMesh triangulate(std::span<const Vec2> points,
                         std::span<const std::pair<int, int>> segments) {
  if (points.size() < 3) throw std::invalid_argument("triangulate: need at least 3 points");
  Builder bld;
  bld.pts.assign(points.begin(), points.end());

  Vec2 lo = points[0], hi = points[0];
  for (const Vec2& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec2 c = 0.5 * (lo + hi);
  const double R = std::max({(hi - lo).norm(), 1.0}) * 1024.0;
  const int n = static_cast<int>(points.size());
  bld.pts.push_back(c + Vec2(0.0, R));
  bld.pts.push_back(c + Vec2(-0.866 * R, -0.5 * R));
  bld.pts.push_back(c + Vec2(0.866 * R, -0.5 * R));
  bld.tri.push_back({n, n + 1, n + 2});
  bld.nbr.push_back({-1, -1, -1});

  // Bucket-sorted insertion order keeps the locate walks short.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  const double cell = std::max((hi - lo).maxCoeff(), 1e-12) / 64.0;
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    const auto bi = std::make_pair(static_cast<int>((points[i].y() - lo.y()) / cell),
                                   static_cast<int>((points[i].x() - lo.x()) / cell));
    const auto bj = std::make_pair(static_cast<int>((points[j].y() - lo.y()) / cell),
                                   static_cast<int>((points[j].x() - lo.x()) / cell));
    if (bi != bj) return bi < bj;
    return i < j;
  });
  for (int i : order) bld.insert_point(i);

  EdgeMap em;
  bld.build_edge_map(em);
  for (const auto& [a, b] : segments) bld.recover_segment(a, b, em);
  bld.delaunay_flips(&em);

  DelaunayMesh out;
  out.points.assign(points.begin(), points.end());
  std::vector<int> tri_remap(bld.tri.size(), -1);
  for (int t = 0; t < static_cast<int>(bld.tri.size()); ++t) {
    if (bld.tri[t][0] < n && bld.tri[t][1] < n && bld.tri[t][2] < n) {
      tri_remap[t] = static_cast<int>(out.triangles.size());
      out.triangles.push_back(bld.tri[t]);
    }
  }
  for (int t = 0; t < static_cast<int>(bld.tri.size()); ++t) {
    if (tri_remap[t] < 0) continue;
    std::array<int, 3> nb{};
    for (int e = 0; e < 3; ++e) {
      const int s = bld.nbr[t][e];
      nb[e] = (s >= 0 && tri_remap[s] >= 0) ? tri_remap[s] : -1;
    }
    out.neighbors.push_back(nb);
  }
  out.vertex_constrained.assign(n, 0);
  for (const auto& [a, b] : segments) {
    out.constrained_edges.emplace_back(std::min(a, b), std::max(a, b));
    out.vertex_constrained[a] = 1;
    out.vertex_constrained[b] = 1;
  }
  std::sort(out.constrained_edges.begin(), out.constrained_edges.end());
  return out;
}

void smooth(DelaunayMesh& mesh, std::vector<int>* region_tags, int passes) {
  const int n = static_cast<int>(mesh.points.size());
  Builder bld;
  bld.pts = mesh.points;
  bld.tri = mesh.triangles;
  bld.nbr = mesh.neighbors;
  for (const auto& [a, b] : mesh.constrained_edges) bld.constrained.insert(edge_key(a, b));

  // region_tags must ride along through flips; wrap flip bookkeeping by
  // asserting both sides share a tag (interfaces are constrained).
  std::vector<int>& tags = *region_tags;

  for (int pass = 0; pass < passes; ++pass) {
    std::vector<std::vector<int>> star(n);
    for (int t = 0; t < static_cast<int>(bld.tri.size()); ++t) {
      for (int v : bld.tri[t]) star[v].push_back(t);
    }
    for (int v = 0; v < n; ++v) {
      if (mesh.vertex_constrained[v]) continue;
      // average of the distinct star vertices
      Vec2 sum(0, 0);
      int count = 0;
      std::unordered_set<int> seen;
      for (int t : star[v]) {
        for (int w : bld.tri[t]) {
          if (w != v && !seen.count(w)) {
            seen.insert(w);
            sum += bld.pts[w];
            ++count;
          }
        }
      }
      if (count < 3) continue;
      const Vec2 target = sum / count;
      const Vec2 orig = bld.pts[v];
      for (double step = 1.0; step > 0.05; step *= 0.5) {
        bld.pts[v] = orig + step * (target - orig);
        bool ok = true;
        for (int t : star[v]) {
          if (orient2d(bld.pts[bld.tri[t][0]], bld.pts[bld.tri[t][1]], bld.pts[bld.tri[t][2]]) <= 0.0) {
            ok = false;
            break;
          }
        }
        if (ok) break;
        bld.pts[v] = orig;
      }
    }
    // Restore local Delaunay property; carry tags through flips.
    for (int sweep = 0; sweep < 40; ++sweep) {
      int flips = 0;
      for (int t = 0; t < static_cast<int>(bld.tri.size()); ++t) {
        for (int e = 0; e < 3; ++e) {
          const int s = bld.nbr[t][e];
          if (s < 0 || s < t) continue;
          const int B = bld.tri[t][(e + 1) % 3], C = bld.tri[t][(e + 2) % 3];
          if (bld.constrained.count(edge_key(B, C))) continue;
          if (tags[t] != tags[s]) throw std::runtime_error("smooth: tag mismatch across unconstrained edge");
          int D = -1;
          for (int k = 0; k < 3; ++k) {
            if (bld.nbr[s][k] == t) D = bld.tri[s][k];
          }
          if (D < 0) continue;
          if (incircle(bld.pts[bld.tri[t][0]], bld.pts[bld.tri[t][1]], bld.pts[bld.tri[t][2]],
                       bld.pts[D]) > 0.0) {
            if (bld.flip(t, e, nullptr)) ++flips;
          }
        }
      }
      if (flips == 0) break;
    }
  }
  mesh.points = std::move(bld.pts);
  mesh.triangles = std::move(bld.tri);
  mesh.neighbors = std::move(bld.nbr);
}

}  // namespace cloak::detail
