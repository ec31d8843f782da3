#pragma once

// The Riemannian metric gamma on the boundary given by the second
// fundamental form, q_u(s) = sum f_ij(u) s_i s_j / sqrt(1 + |grad f(u)|^2)
// in any local graph chart. Its volume form has density sqrt(kappa) with
// respect to surface measure, so vol_gamma(boundary) = v_kappa.
//
// Distances come in three tiers:
//   * exact: sqrt(R) times the great-circle angle on a ball of radius R, and
//     the integral of sqrt(kappa) ds along the curve in d = 2;
//   * tangent: gamma-bar(x, y) = sqrt(2 dist(y, H_K(x))), averaged over both
//     directions, for pairs within each other's chart;
//   * near sheet: the same gamma-bar for pairs whose normals are within 60
//     degrees, beyond the certified chart (relative error O(gamma^2));
//   * graph: Dijkstra on a mesh whose vertices are linked to their k-ring
//     neighbours, used for far pairs and as an oracle.

#include "capcover/bodies.hpp"
#include "capcover/kdtree.hpp"
#include "capcover/sampling.hpp"

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace capcover {

struct MetricTensor {
  BoundaryPoint base;
  ChartVec u;
  ChartMat Q;
};

MetricTensor metric_tensor(const ConvexBody& body, const BoundaryPoint& p, const ChartVec& u);

/// sqrt(det Q) for the jet at a chart point: the density of vol_gamma with
/// respect to Lebesgue measure on the chart.
double metric_volume_density(const GraphJet& jet);

/// gamma-length of the chord from x to y lifted to the surface through the
/// chart at the boundary point above the chord midpoint (midpoint rule).
double chord_metric_length(const ConvexBody& body, const Vec3& x, const Vec3& y,
                           int segments = 4);

double geodesic_distance_exact_sphere(const Vec3& x, const Vec3& y, double radius);
double geodesic_distance_exact_sphere(const BoundaryPoint& x, const BoundaryPoint& y,
                                      double radius);

/// One-sided gamma-bar from x (with outward normal nx) to y, or nullopt when
/// y lies outside the chart of x.
std::optional<double> tangent_distance_one_sided(const ConvexBody& body, const Vec3& x,
                                                 const Vec3& nx, const Vec3& y);

/// Symmetrized gamma-bar. Throws ChartError when the points are too far
/// apart for either chart.
double geodesic_distance_tangent(const ConvexBody& body, const BoundaryPoint& x,
                                 const BoundaryPoint& y);

/// Smallest cosine between the normals of a near-sheet pair.
inline constexpr double kNearSheetCosine = 0.5;

/// Symmetrized gamma-bar for any pair whose normals are within 60 degrees
/// (each point then lies on the near sheet over the other's tangent plane),
/// nullopt otherwise.
std::optional<double> near_sheet_distance(const Vec3& x, const Vec3& nx, const Vec3& y,
                                          const Vec3& ny);

/// Euclidean radius around x containing every near-sheet point y with
/// symmetrized gamma-bar(x, y) <= g (with a factor sqrt(2) of slack).
double gamma_bar_euclidean_reach(const ConvexBody& body, double g);

/// Lower bound on gamma(x, y) when the normals at x and y are more than 60
/// degrees apart.
double far_normal_distance_bound(const ConvexBody& body);

struct MeshOptions {
  bool build_graph = false;  // k-ring Dijkstra graph (d = 3)
  int link_rings = 3;
  std::size_t max_vertices = 6'000'000;  // memory cap: ~100 bytes per vertex
};

class MetricMesh {
 public:
  const ConvexBody& body() const { return body_; }
  int dim() const { return body_.dim(); }
  std::size_t num_vertices() const { return positions_.size(); }
  const Vec3& position(std::size_t i) const { return positions_[i]; }
  const Vec3& normal(std::size_t i) const { return normals_[i]; }
  std::span<const Vec3> positions() const { return positions_; }
  BoundaryPoint vertex(std::size_t i) const { return body_.make_point(positions_[i]); }
  /// Triangles (d = 3) or polygon edges (d = 2, third index -1).
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }

  double resolution() const { return resolution_; }
  /// Largest metric edge length, <= resolution.
  double max_edge() const { return max_edge_; }
  int frequency() const { return frequency_; }

  /// Sum of the metric areas (d = 3) or edge lengths (d = 2).
  double total_volume() const;

  /// d = 2 only: gamma arclength from the angle-0 ray to x, and its inverse.
  double arclength(const Vec3& x) const;
  Vec3 point_at_arclength(double s) const;
  double total_length() const { return cumulative_.back(); }

  bool has_graph() const { return !adj_offsets_.empty(); }
  /// Multi-source Dijkstra: sources are (vertex, initial distance).
  std::vector<double> dijkstra(std::span<const std::pair<int, double>> sources) const;
  double graph_distance(int a, int b) const;
  int nearest_vertex(const Vec3& x) const;

 private:
  friend MetricMesh build_metric_mesh(const ConvexBody&, double, const MeshOptions&);
  explicit MetricMesh(ConvexBody body) : body_(std::move(body)) {}

  void build_polygon(double resolution);
  void build_icosphere(int frequency);
  void build_graph(int rings);

  ConvexBody body_;
  std::vector<Vec3> positions_;
  std::vector<Vec3> normals_;
  std::vector<std::array<int, 3>> faces_;
  double resolution_ = 0.0;
  double max_edge_ = 0.0;
  int frequency_ = 0;
  std::vector<double> angles_;      // d = 2: radial angle of each vertex
  std::vector<double> cumulative_;  // d = 2: arclength at each vertex, then the total
  std::vector<int> adj_offsets_;
  std::vector<int> adj_targets_;
  std::vector<double> adj_weights_;
  std::shared_ptr<const KdTree> vertex_tree_;
};

/// d = 2: polygon at equal gamma spacing <= resolution. d = 3: class-I
/// geodesic icosphere pushed to the boundary by the inverse normal map, with
/// the smallest frequency whose metric edges are all <= resolution.
/// Throws DomainError when the vertex count would exceed the memory cap.
MetricMesh build_metric_mesh(const ConvexBody& body, double resolution,
                             const MeshOptions& options = {});

/// gamma(x, y) by the best available tier: exact on balls and in d = 2
/// (with a mesh), tangent or near-sheet gamma-bar, graph otherwise.
double geodesic_distance(const ConvexBody& body, const BoundaryPoint& x, const BoundaryPoint& y,
                         const MetricMesh* mesh = nullptr);

struct CoverageResult {
  double rho = 0.0;
  BoundaryPoint witness;
  double V = 0.0;
  BoundaryPoint spacing_center;
  double spacing_radius = 0.0;
  /// Mesh vertices whose nearest-sample distance needed the graph tier.
  std::size_t graph_fallbacks = 0;
};

/// rho = max over the boundary of the distance to the nearest sample, and
/// the witness attaining it. In d = 3 a coarse pass over the mesh vertices
/// is followed by branch-and-bound refinement in metric chart coordinates
/// around every vertex that could still hold the maximum. In d = 2 the
/// answer is exact: half the largest gap in gamma arclength.
CoverageResult covering_radius(const SampleSet& points, const MetricMesh& mesh);

/// V(P) = max vol_gamma(B(x, r(x))) / v_k over ball centres x, r(x) the
/// distance from x to the nearest sample. Also fills rho and the witness.
/// Balls that leave the chart fall back to mesh summation on the graph.
CoverageResult max_spacing_statistic(const SampleSet& points, const MetricMesh& mesh,
                                     double v_k);

/// vol_gamma(B(x, r)) by polar quadrature over the tangent plane at x (48
/// rays, exact boundary radius per ray). d = 2: min(2r, v_kappa) from the
/// exact arclength. Throws DomainError when the ball reaches points whose
/// normals are more than 60 degrees from the normal at x.
double geodesic_ball_volume(const ConvexBody& body, const BoundaryPoint& x, double r,
                            const MetricMesh& mesh);

/// Mesh summation: metric areas of the triangles within distance r of x,
/// partial triangles clipped by linear interpolation of the distance. With a
/// graph, distances past the chart of x come from Dijkstra.
double geodesic_ball_volume_mesh(const ConvexBody& body, const BoundaryPoint& x, double r,
                                 const MetricMesh& mesh);

}  // namespace capcover
