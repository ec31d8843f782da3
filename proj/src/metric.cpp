#include "capcover/metric.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace capcover {

MetricTensor metric_tensor(const ConvexBody& body, const BoundaryPoint& p, const ChartVec& u) {
  const GraphJet jet = body.graph_jet(p, u);
  MetricTensor out;
  out.base = p;
  out.u = u;
  out.Q = jet.hessian / std::sqrt(1.0 + jet.gradient.squaredNorm());
  return out;
}

double metric_volume_density(const GraphJet& jet) {
  const double m = static_cast<double>(jet.gradient.size());
  const double det = jet.hessian.determinant();
  if (!(det > 0.0)) throw NumericalError("metric is not positive definite");
  return std::sqrt(det) * std::pow(1.0 + jet.gradient.squaredNorm(), -0.25 * m);
}

double chord_metric_length(const ConvexBody& body, const Vec3& x, const Vec3& y, int segments) {
  if (segments < 1) throw DomainError("segments must be >= 1");
  if (x == y) return 0.0;
  const Vec3 mid = body.radial_point(0.5 * (x + y));
  const Frame fr = body.frame_for_normal(body.outward_normal(mid));
  const int m = body.dim() - 1;
  ChartVec a(m), b(m);
  for (int i = 0; i < m; ++i) {
    a(i) = fr.tangent[i].dot(x - mid);
    b(i) = fr.tangent[i].dot(y - mid);
  }
  const ChartVec delta = b - a;
  double sum = 0.0;
  for (int k = 0; k < segments; ++k) {
    const ChartVec u = a + ((k + 0.5) / segments) * delta;
    const GraphJet jet = body.graph_jet(fr, mid, u);
    const double q = delta.dot(jet.hessian * delta) / std::sqrt(1.0 + jet.gradient.squaredNorm());
    sum += std::sqrt(std::max(0.0, q));
  }
  return sum / segments;
}

double geodesic_distance_exact_sphere(const Vec3& x, const Vec3& y, double radius) {
  if (!(radius > 0.0)) throw DomainError("radius must be positive");
  const double angle = std::atan2(x.cross(y).norm(), x.dot(y));
  return std::sqrt(radius) * angle;
}

double geodesic_distance_exact_sphere(const BoundaryPoint& x, const BoundaryPoint& y,
                                      double radius) {
  return geodesic_distance_exact_sphere(x.ambient, y.ambient, radius);
}

std::optional<double> tangent_distance_one_sided(const ConvexBody& body, const Vec3& x,
                                                 const Vec3& nx, const Vec3& y) {
  const Vec3 v = y - x;
  const double height = -nx.dot(v);  // dist(y, H_K(x)) since h_K(nx) = <nx, x>
  const double planar = (v + height * nx).norm();
  if (planar > body.chart_radius()) return std::nullopt;
  // Far-sheet points also project into the chart; on the near sheet the
  // sandwich bounds the graph height by k_max |y|^2.
  if (height > 1.01 * body.curvature_bounds().k_max * planar * planar + 1e-12 * body.diameter())
    return std::nullopt;
  return std::sqrt(2.0 * std::max(0.0, height));
}

double geodesic_distance_tangent(const ConvexBody& body, const BoundaryPoint& x,
                                 const BoundaryPoint& y) {
  const auto a = tangent_distance_one_sided(body, x.ambient, x.normal, y.ambient);
  const auto b = tangent_distance_one_sided(body, y.ambient, y.normal, x.ambient);
  if (!a || !b) throw ChartError("points are too far apart for the tangent-plane distance");
  return 0.5 * (*a + *b);
}

std::optional<double> near_sheet_distance(const Vec3& x, const Vec3& nx, const Vec3& y,
                                          const Vec3& ny) {
  if (nx.dot(ny) < kNearSheetCosine) return std::nullopt;
  const double hx = std::max(0.0, nx.dot(x - y));
  const double hy = std::max(0.0, ny.dot(y - x));
  return 0.5 * (std::sqrt(2.0 * hx) + std::sqrt(2.0 * hy));
}

double gamma_bar_euclidean_reach(const ConvexBody& body, double g) {
  // One one-sided height is at most g^2 / 2, and the near sheet over either
  // tangent plane is k_min-strongly convex, so |y| <= g / sqrt(k_min).
  const double t = g * std::sqrt(2.0 / body.curvature_bounds().k_min);
  const double height = 0.5 * g * g;
  return std::sqrt(t * t + height * height) * (1.0 + 1e-9) + 1e-12;
}

double far_normal_distance_bound(const ConvexBody& body) {
  // |dn| <= sqrt(k_max) |v|_II along any curve.
  return std::acos(kNearSheetCosine) / std::sqrt(body.curvature_bounds().k_max);
}

double geodesic_distance(const ConvexBody& body, const BoundaryPoint& x, const BoundaryPoint& y,
                         const MetricMesh* mesh) {
  if (body.is_sphere()) return geodesic_distance_exact_sphere(x, y, body.sphere_radius());
  if (body.dim() == 2 && mesh) {
    const double len = mesh->total_length();
    const double gap = std::abs(mesh->arclength(x.ambient) - mesh->arclength(y.ambient));
    return std::min(gap, len - gap);
  }
  try {
    return geodesic_distance_tangent(body, x, y);
  } catch (const ChartError&) {
    if (const auto g = near_sheet_distance(x.ambient, x.normal, y.ambient, y.normal)) return *g;
    if (!mesh || !mesh->has_graph()) throw;
  }
  const int vx = mesh->nearest_vertex(x.ambient);
  const int vy = mesh->nearest_vertex(y.ambient);
  const BoundaryPoint px = mesh->vertex(vx), py = mesh->vertex(vy);
  const std::pair<int, double> source{vx, geodesic_distance_tangent(body, x, px)};
  const auto dist = mesh->dijkstra(std::span(&source, 1));
  return dist[vy] + geodesic_distance_tangent(body, py, y);
}

}  // namespace capcover
