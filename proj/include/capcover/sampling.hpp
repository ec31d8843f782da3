#pragma once

// Boundary integrals and samplers for the curvature-optimal density
// h_kappa = sqrt(kappa) / v_kappa and for normalized surface measure.
//
// Both samplers propose a uniform direction w on S^{d-1} and map it to the
// boundary along the ray from the origin. Stage one accepts with weight
// J(w) / M_area (J = dH/dsigma), giving area-uniform points; stage two
// (h_kappa only) accepts with sqrt(kappa) / M_kappa. The envelopes carry 5%
// headroom over a dense scan and are re-checked on every proposal.

#include "capcover/bodies.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace capcover {

struct SampleSet {
  ConvexBody body;
  std::vector<BoundaryPoint> points;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
};

/// Region of direction space. d = 2: angle in [lo0, hi0]. d = 3: z in
/// [lo0, hi0] and azimuth in [lo1, hi1].
struct DirectionPatch {
  double lo0 = 0.0, hi0 = 0.0, lo1 = 0.0, hi1 = 0.0;
};

DirectionPatch full_patch(int d);

/// 32 patches: 32 equal angle sectors (d = 2) or 4 z-bands x 8 sectors (d = 3).
std::vector<DirectionPatch> standard_patches(int d);
/// Index into standard_patches() of the patch containing the ray through x.
int standard_patch_index(int d, const Vec3& x);

/// Integral over the boundary piece above `patch` of g(x) dH^{d-1}(x), with
/// a product Gauss-Legendre rule of `level` panels per axis.
double boundary_integral(const ConvexBody& body, const std::function<double(const Vec3&)>& g,
                         const DirectionPatch& patch, int level);

struct QuadratureResult {
  double value = 0.0;
  int level = 0;
  double relative_change = 0.0;
};

/// Integral of sqrt(kappa) over the boundary, refined by doubling the panel
/// count until the relative change drops below 1e-8.
QuadratureResult v_kappa(const ConvexBody& body, int quad_level = 2);
QuadratureResult surface_area(const ConvexBody& body, int quad_level = 2);

SampleSet sample_h_kappa(const ConvexBody& body, std::size_t n, std::uint64_t seed);
SampleSet sample_uniform_area(const ConvexBody& body, std::size_t n, std::uint64_t seed);

}  // namespace capcover
