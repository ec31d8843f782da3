#include "capcover/hull.hpp"

#include "capcover/predicates.hpp"
#include "capcover/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace capcover {

namespace {

class IncrementalHull3 {
 public:
  explicit IncrementalHull3(std::span<const Vec3> pts)
      : pts_(pts), point_conflicts_(pts.size()), point_mark_(pts.size(), -1),
        start_of_(pts.size(), -1), end_of_(pts.size(), -1) {}

  // Returns false for affinely dependent input.
  bool build() {
    std::array<int, 4> simplex{};
    if (!initial_simplex(simplex)) return false;

    for (int k = 0; k < 4; ++k) {
      std::array<int, 3> tri{};
      int m = 0;
      for (int j = 0; j < 4; ++j)
        if (j != k) tri[m++] = simplex[j];
      if (orient3d(pts_[tri[0]], pts_[tri[1]], pts_[tri[2]], pts_[simplex[k]]) > 0)
        std::swap(tri[1], tri[2]);
      add_facet(tri[0], tri[1], tri[2]);
    }
    for (int f = 0; f < 4; ++f)
      for (int i = 0; i < 3; ++i) {
        const int a = facets_[f].v[i], b = facets_[f].v[(i + 1) % 3];
        for (int g = 0; g < 4; ++g) {
          if (g == f) continue;
          const int j = edge_index(g, b, a);
          if (j >= 0) facets_[f].nb[i] = g;
        }
      }

    std::vector<int> order;
    order.reserve(pts_.size());
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i)
      if (std::find(simplex.begin(), simplex.end(), i) == simplex.end()) order.push_back(i);
    Rng rng(0x5eedc0feULL);
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.below(i)]);

    for (int q : order)
      for (int f = 0; f < 4; ++f)
        if (sees(f, q)) link_conflict(f, q);

    for (int p : order) insert(p);
    return true;
  }

  std::vector<std::array<int, 3>> faces() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& f : facets_)
      if (f.alive) out.push_back(f.v);
    return out;
  }

 private:
  struct Facet {
    std::array<int, 3> v{};
    std::array<int, 3> nb{-1, -1, -1};
    std::vector<int> conflicts;
    bool alive = true;
    int mark = -1;
  };

  struct HorizonEdge {
    int a, b, visible, across;
  };

  bool sees(int f, int q) const {
    const auto& v = facets_[f].v;
    return orient3d(pts_[v[0]], pts_[v[1]], pts_[v[2]], pts_[q]) > 0;
  }

  int edge_index(int f, int a, int b) const {
    const auto& v = facets_[f].v;
    for (int i = 0; i < 3; ++i)
      if (v[i] == a && v[(i + 1) % 3] == b) return i;
    return -1;
  }

  int add_facet(int a, int b, int c) {
    Facet f;
    f.v = {a, b, c};
    facets_.push_back(std::move(f));
    return static_cast<int>(facets_.size()) - 1;
  }

  void link_conflict(int f, int q) {
    facets_[f].conflicts.push_back(q);
    point_conflicts_[q].push_back(f);
  }

  bool initial_simplex(std::array<int, 4>& s) const {
    const int n = static_cast<int>(pts_.size());
    if (n < 4) return false;
    int i0 = 0;
    for (int i = 1; i < n; ++i)
      if (pts_[i].x() < pts_[i0].x()) i0 = i;
    int i1 = -1;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = (pts_[i] - pts_[i0]).squaredNorm();
      if (d > best) best = d, i1 = i;
    }
    if (i1 < 0) return false;
    int i2 = -1;
    best = 0.0;
    const Vec3 axis = pts_[i1] - pts_[i0];
    for (int i = 0; i < n; ++i) {
      const double d = axis.cross(pts_[i] - pts_[i0]).squaredNorm();
      if (d > best) best = d, i2 = i;
    }
    if (i2 < 0) return false;
    int i3 = -1;
    best = 0.0;
    const Vec3 normal = axis.cross(pts_[i2] - pts_[i0]);
    for (int i = 0; i < n; ++i) {
      const double d = std::abs(normal.dot(pts_[i] - pts_[i0]));
      if (d > best) best = d, i3 = i;
    }
    if (i3 < 0 || orient3d(pts_[i0], pts_[i1], pts_[i2], pts_[i3]) == 0) {
      i3 = -1;
      for (int i = 0; i < n && i3 < 0; ++i)
        if (orient3d(pts_[i0], pts_[i1], pts_[i2], pts_[i]) != 0) i3 = i;
      if (i3 < 0) return false;
    }
    s = {i0, i1, i2, i3};
    return true;
  }

  void insert(int p) {
    std::vector<int> visible;
    for (int f : point_conflicts_[p])
      if (facets_[f].alive) visible.push_back(f);
    point_conflicts_[p].clear();
    point_conflicts_[p].shrink_to_fit();
    if (visible.empty()) return;

    ++stamp_;
    for (int f : visible) facets_[f].mark = stamp_;

    std::vector<HorizonEdge> horizon;
    for (int f : visible)
      for (int i = 0; i < 3; ++i) {
        const int g = facets_[f].nb[i];
        if (facets_[g].mark != stamp_)
          horizon.push_back({facets_[f].v[i], facets_[f].v[(i + 1) % 3], f, g});
      }

    std::vector<int> created;
    created.reserve(horizon.size());
    for (const auto& h : horizon) {
      const int id = add_facet(h.a, h.b, p);
      facets_[id].nb[0] = h.across;
      facets_[h.across].nb[edge_index(h.across, h.b, h.a)] = id;
      start_of_[h.a] = id;
      end_of_[h.b] = id;
      created.push_back(id);
    }
    for (std::size_t k = 0; k < horizon.size(); ++k) {
      const int id = created[k];
      facets_[id].nb[1] = start_of_[horizon[k].b];
      facets_[id].nb[2] = end_of_[horizon[k].a];
    }
    for (const auto& h : horizon) start_of_[h.a] = end_of_[h.b] = -1;

    for (std::size_t k = 0; k < horizon.size(); ++k) {
      const int id = created[k];
      for (int src : {horizon[k].visible, horizon[k].across}) {
        // No facets are added in this loop, so the reference stays valid.
        const std::vector<int>& candidates = facets_[src].conflicts;
        for (int q : candidates) {
          if (q == p || point_mark_[q] == id) continue;
          point_mark_[q] = id;
          if (sees(id, q)) link_conflict(id, q);
        }
      }
    }

    for (int f : visible) {
      facets_[f].alive = false;
      facets_[f].conflicts.clear();
      facets_[f].conflicts.shrink_to_fit();
    }
  }

  std::span<const Vec3> pts_;
  std::vector<Facet> facets_;
  std::vector<std::vector<int>> point_conflicts_;
  std::vector<int> point_mark_;
  std::vector<int> start_of_;
  std::vector<int> end_of_;
  int stamp_ = 0;
};

std::vector<int> monotone_chain(std::span<const Vec3> pts) {
  std::vector<int> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (pts[a].x() != pts[b].x()) return pts[a].x() < pts[b].x();
    return pts[a].y() < pts[b].y();
  });
  idx.erase(std::unique(idx.begin(), idx.end(),
                        [&](int a, int b) { return pts[a].x() == pts[b].x() && pts[a].y() == pts[b].y(); }),
            idx.end());
  if (idx.size() < 3) return {};
  std::vector<int> hull(2 * idx.size());
  std::size_t k = 0;
  for (int i : idx) {
    while (k >= 2 && orient2d(pts[hull[k - 2]], pts[hull[k - 1]], pts[i]) <= 0) --k;
    hull[k++] = i;
  }
  const std::size_t lower = k + 1;
  for (auto it = idx.rbegin() + 1; it != idx.rend(); ++it) {
    while (k >= lower && orient2d(pts[hull[k - 2]], pts[hull[k - 1]], pts[*it]) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

Vec3 triangle_normal(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 e[3] = {b - a, c - b, a - c};
  int shortest = 0;
  for (int i = 1; i < 3; ++i)
    if (e[i].squaredNorm() < e[shortest].squaredNorm()) shortest = i;
  return e[(shortest + 1) % 3].cross(e[(shortest + 2) % 3]).normalized();
}

// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + d1 / (d1 - d3) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + d2 / (d2 - d6) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace

std::size_t InscribedPolytope::num_vertices() const {
  std::set<int> seen;
  for (const auto& f : facets)
    for (int i = 0; i < dim; ++i) seen.insert(f.vertex_indices[i]);
  return seen.size();
}

int InscribedPolytope::euler_characteristic() const {
  const long v = static_cast<long>(num_vertices());
  const long f = static_cast<long>(facets.size());
  if (dim == 2) return static_cast<int>(v - f);
  return static_cast<int>(v - 3 * f / 2 + f);
}

InscribedPolytope convex_hull(std::span<const Vec3> points, int dim) {
  if (dim != 2 && dim != 3) throw DomainError("unsupported dimension (d must be 2 or 3)");
  InscribedPolytope poly;
  poly.dim = dim;
  poly.points.assign(points.begin(), points.end());

  if (dim == 2) {
    const auto ring = monotone_chain(poly.points);
    if (ring.size() < 3) {
      poly.is_degenerate = true;
      return poly;
    }
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const int a = ring[i], b = ring[(i + 1) % ring.size()];
      const Vec3 e = poly.points[b] - poly.points[a];
      HullFacet f;
      f.vertex_indices = {a, b, -1};
      f.outward_normal = Vec3(e.y(), -e.x(), 0.0).normalized();
      f.offset = 0.5 * f.outward_normal.dot(poly.points[a] + poly.points[b]);
      poly.facets.push_back(f);
    }
    return poly;
  }

  IncrementalHull3 builder(poly.points);
  if (!builder.build()) {
    poly.is_degenerate = true;
    return poly;
  }
  for (const auto& tri : builder.faces()) {
    HullFacet f;
    f.vertex_indices = tri;
    const Vec3& a = poly.points[tri[0]];
    const Vec3& b = poly.points[tri[1]];
    const Vec3& c = poly.points[tri[2]];
    f.outward_normal = triangle_normal(a, b, c);
    f.offset = f.outward_normal.dot(a + b + c) / 3.0;
    poly.facets.push_back(f);
  }
  return poly;
}

InscribedPolytope convex_hull(const SampleSet& sample) {
  std::vector<Vec3> pts;
  pts.reserve(sample.size());
  for (const auto& p : sample.points) pts.push_back(p.ambient);
  return convex_hull(pts, sample.body.dim());
}

HausdorffResult hausdorff_distance(const ConvexBody& body, InscribedPolytope& poly) {
  if (poly.is_degenerate || poly.facets.empty())
    throw DegenerateError("Hausdorff distance of a degenerate polytope");
  if (poly.dim != body.dim()) throw DomainError("polytope and body dimensions differ");
  HausdorffResult res;
  res.delta_H = -1.0;
  for (std::size_t i = 0; i < poly.facets.size(); ++i) {
    auto& f = poly.facets[i];
    f.cap_height = body.support(f.outward_normal) - f.offset;
    if (f.cap_height > res.delta_H) {
      res.delta_H = f.cap_height;
      res.argmax_index = i;
    }
  }
  auto& best = poly.facets[res.argmax_index];
  best.cap_center = body.point_from_normal(best.outward_normal);
  res.argmax_facet = best;
  res.delta_H = std::max(0.0, res.delta_H);
  return res;
}

double distance_to_facet(const InscribedPolytope& poly, const HullFacet& facet, const Vec3& q) {
  const Vec3& a = poly.points[facet.vertex_indices[0]];
  const Vec3& b = poly.points[facet.vertex_indices[1]];
  if (poly.dim == 2) {
    const Vec3 e = b - a;
    const double t = std::clamp((q - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
    return (q - (a + t * e)).norm();
  }
  const Vec3& c = poly.points[facet.vertex_indices[2]];
  return (q - closest_on_triangle(q, a, b, c)).norm();
}

}  // namespace capcover
