#pragma once

// Convex hulls of boundary samples and the Hausdorff distance to the body.
//
// Because the hull is inscribed, delta_H(K_n, K) is the largest cap height
// h_F = h_K(u_F) - offset_F over the facets F.

#include "capcover/bodies.hpp"
#include "capcover/sampling.hpp"

#include <array>
#include <span>
#include <vector>

namespace capcover {

struct HullFacet {
  std::array<int, 3> vertex_indices{-1, -1, -1};  // d entries are used
  Vec3 outward_normal = Vec3::Zero();
  double offset = 0.0;
  double cap_height = 0.0;  // filled by hausdorff_distance
  BoundaryPoint cap_center;  // filled by hausdorff_distance
};

struct InscribedPolytope {
  int dim = 3;
  std::vector<Vec3> points;  // copy of the input, indexed by vertex_indices
  std::vector<HullFacet> facets;
  bool is_degenerate = false;

  std::size_t num_vertices() const;
  /// V - E + F for d = 3 (2 for a closed simplicial sphere); V - E for d = 2.
  int euler_characteristic() const;
};

/// d = 2: monotone chain, facets are edges of the counterclockwise polygon.
/// d = 3: randomized incremental hull with conflict lists.
/// Orientation tests are exact (filtered double plus rational fallback).
/// Coplanar points are handled; three collinear points on one hull face are
/// not (they cannot occur on a strictly convex boundary).
InscribedPolytope convex_hull(std::span<const Vec3> points, int dim);
InscribedPolytope convex_hull(const SampleSet& sample);

struct HausdorffResult {
  double delta_H = 0.0;
  std::size_t argmax_index = 0;
  HullFacet argmax_facet;
};

/// max_F h_F; also writes cap heights into poly.facets (cap centers only for
/// the maximizing facet, which is returned in full).
HausdorffResult hausdorff_distance(const ConvexBody& body, InscribedPolytope& poly);

/// Euclidean distance from q to the polytope boundary piece F (segment or
/// triangle).
double distance_to_facet(const InscribedPolytope& poly, const HullFacet& facet, const Vec3& q);

}  // namespace capcover
