#include <doctest.h>

#include "capcover/bodies.hpp"
#include "capcover/hull.hpp"
#include "capcover/kernels.hpp"
#include "capcover/predicates.hpp"
#include "capcover/rng.hpp"
#include "capcover/sampling.hpp"

#include <cmath>
#include <set>
#include <vector>

using namespace capcover;

namespace {

// Exact orient2d for coordinates on the 2^-53 grid with |x| < 32.
int orient2d_int128(const Vec3& a, const Vec3& b, const Vec3& c) {
  auto q = [](double x) { return static_cast<__int128>(std::ldexp(x, 53)); };
  const __int128 det = (q(b.x()) - q(a.x())) * (q(c.y()) - q(a.y())) -
                       (q(b.y()) - q(a.y())) * (q(c.x()) - q(a.x()));
  return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

// Exact orient3d for coordinates on the 2^-30 grid with |x| <= 4.
int orient3d_int128(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& q) {
  auto g = [](const Vec3& p, const Vec3& o, int i) {
    return static_cast<__int128>(std::ldexp(p[i], 30)) - static_cast<__int128>(std::ldexp(o[i], 30));
  };
  const __int128 ux = g(b, a, 0), uy = g(b, a, 1), uz = g(b, a, 2);
  const __int128 vx = g(c, a, 0), vy = g(c, a, 1), vz = g(c, a, 2);
  const __int128 wx = g(q, a, 0), wy = g(q, a, 1), wz = g(q, a, 2);
  const __int128 det = ux * (vy * wz - vz * wy) + uy * (vz * wx - vx * wz) + uz * (vx * wy - vy * wx);
  return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

std::vector<Vec3> ambient(const SampleSet& s) {
  std::vector<Vec3> out;
  for (const auto& p : s.points) out.push_back(p.ambient);
  return out;
}

void check_closed_convex(const InscribedPolytope& poly) {
  double worst = 0.0;
  for (const auto& f : poly.facets) {
    CHECK(std::abs(f.outward_normal.norm() - 1.0) < 1e-12);
    for (const Vec3& p : poly.points) worst = std::max(worst, f.outward_normal.dot(p) - f.offset);
  }
  CHECK(worst < 1e-12);
}

}  // namespace

TEST_CASE("hull of sphere samples is a closed simplicial sphere") {
  const ConvexBody sphere = make_ball(3, 1.0);
  for (std::size_t n : {4UL, 10UL, 2000UL}) {
    CAPTURE(n);
    const SampleSet s = sample_h_kappa(sphere, n, 40 + n);
    const InscribedPolytope poly = convex_hull(s);
    CHECK_FALSE(poly.is_degenerate);
    CHECK(poly.euler_characteristic() == 2);
    CHECK(poly.facets.size() == 2 * n - 4);
    CHECK(poly.num_vertices() == n);
    check_closed_convex(poly);
  }
}

TEST_CASE("interior points are not hull vertices") {
  const SampleSet s = sample_h_kappa(make_ball(3, 1.0), 500, 44);
  std::vector<Vec3> pts = ambient(s);
  Rng rng(45);
  for (int i = 0; i < 200; ++i) pts.push_back(0.5 * rng.uniform() * rng.unit_vector(3));
  const InscribedPolytope poly = convex_hull(pts, 3);
  CHECK(poly.num_vertices() == 500);
  CHECK(poly.euler_characteristic() == 2);
  for (const auto& f : poly.facets)
    for (int v : f.vertex_indices) CHECK(v < 500);
}

TEST_CASE("cube with extra points on its faces") {
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) pts.emplace_back(i & 1 ? 1 : -1, i & 2 ? 1 : -1, i & 4 ? 1 : -1);
  const InscribedPolytope cube = convex_hull(pts, 3);
  CHECK(cube.facets.size() == 12);
  CHECK(cube.euler_characteristic() == 2);
  check_closed_convex(cube);

  pts.emplace_back(1, 0.3, 0.1);
  pts.emplace_back(-0.2, 0.7, -1);
  pts.emplace_back(0, 0, 0);
  const InscribedPolytope poly = convex_hull(pts, 3);
  CHECK_FALSE(poly.is_degenerate);
  check_closed_convex(poly);
  // Coplanar points may or may not become vertices; the surface is still closed.
  CHECK(poly.euler_characteristic() == 2);
}

TEST_CASE("degenerate inputs") {
  std::vector<Vec3> flat;
  Rng rng(46);
  for (int i = 0; i < 50; ++i) flat.emplace_back(rng.uniform(), rng.uniform(), 0.0);
  const InscribedPolytope poly = convex_hull(flat, 3);
  CHECK(poly.is_degenerate);
  InscribedPolytope copy = poly;
  CHECK_THROWS_AS(hausdorff_distance(make_ball(3, 1.0), copy), DegenerateError);
  CHECK(convex_hull(std::vector<Vec3>(3, Vec3::UnitX()), 3).is_degenerate);
  CHECK(convex_hull(std::vector<Vec3>{Vec3::Zero(), Vec3::UnitX()}, 2).is_degenerate);
  CHECK_THROWS_AS(convex_hull(flat, 4), DomainError);
}

TEST_CASE("polygon hull in the plane") {
  std::vector<Vec3> pts{{0, 0, 0}, {2, 0, 0}, {2, 2, 0}, {0, 2, 0}, {1, 1, 0},
                        {1, 0, 0}, {2, 2, 0}, {0, 1, 0}};
  const InscribedPolytope poly = convex_hull(pts, 2);
  CHECK_FALSE(poly.is_degenerate);
  CHECK(poly.facets.size() == 4);
  CHECK(poly.euler_characteristic() == 0);
  check_closed_convex(poly);

  const SampleSet s = sample_h_kappa(make_ellipsoid({2, 1}), 1000, 47);
  const InscribedPolytope ell = convex_hull(s);
  CHECK(ell.facets.size() == 1000);
  check_closed_convex(ell);
}

TEST_CASE("hull stays inside the body and cap heights are nonnegative") {
  for (const ConvexBody& body : {make_ellipsoid({2, 1, 1}), make_quartic(3, 0.3), make_ellipsoid({2, 1})}) {
    CAPTURE(body.name());
    const SampleSet s = sample_h_kappa(body, 1000, 48);
    InscribedPolytope poly = convex_hull(s);
    const HausdorffResult hd = hausdorff_distance(body, poly);
    for (const auto& f : poly.facets) {
      CHECK(f.cap_height >= 0.0);
      CHECK(f.cap_height <= hd.delta_H);
      CHECK(f.offset <= body.support(f.outward_normal));
    }
    CHECK(hd.delta_H == poly.facets[hd.argmax_index].cap_height);
    CHECK(body.on_boundary(hd.argmax_facet.cap_center.ambient));
    CHECK((hd.argmax_facet.cap_center.normal - hd.argmax_facet.outward_normal).norm() < 1e-9);
  }
}

TEST_CASE("cap heights against brute force on a dense boundary") {
  const ConvexBody sphere = make_ball(3, 1.0);
  const SampleSet s = sample_h_kappa(sphere, 200, 49);
  InscribedPolytope poly = convex_hull(s);
  const double delta = hausdorff_distance(sphere, poly).delta_H;
  const std::vector<Vec3> dense = scan_directions(3, 40000);
  const double spacing = std::sqrt(4.0 * kPi / dense.size()) * 1.1;
  const ArgMax brute = brute_force_hausdorff(poly, dense, Exec::kSerial);
  CHECK(brute.value <= delta + 1e-12);
  CHECK(delta - brute.value <= spacing);
}

TEST_CASE("scaling equivariance of delta_H") {
  const ConvexBody e = make_ellipsoid({2, 1, 1});
  const double t = 3.0;
  const ConvexBody big = e.scaled(t);
  const SampleSet s = sample_h_kappa(e, 2000, 50);
  std::vector<Vec3> pts = ambient(s), scaled;
  for (const Vec3& p : pts) scaled.push_back(t * p);
  InscribedPolytope a = convex_hull(pts, 3);
  InscribedPolytope b = convex_hull(scaled, 3);
  const double da = hausdorff_distance(e, a).delta_H;
  const double db = hausdorff_distance(big, b).delta_H;
  CHECK(std::abs(db - t * da) <= 1e-12 * db);
}

TEST_CASE("orientation predicates are exact") {
  CHECK(orient2d(Vec3(0.5, 0.5, 0), Vec3(12, 12, 0), Vec3(24, 24, 0)) == 0);
  CHECK(orient3d(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0.3, 0.7, 0)) == 0);
  CHECK(orient3d(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0.3, 0.7, 1e-300)) == 1);
  // Shewchuk's near-collinear grid: the naive determinant gets signs wrong.
  const double ulp = std::ldexp(1.0, -53);
  int mismatches = 0;
  const long before = exact_fallback_count();
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      const Vec3 p(0.5 + i * ulp, 0.5 + j * ulp, 0);
      const Vec3 q(12, 12, 0), r(24, 24, 0);
      mismatches += orient2d(p, q, r) != orient2d_int128(p, q, r);
    }
  CHECK(mismatches == 0);
  CHECK(exact_fallback_count() > before);
}

TEST_CASE("orient3d on coplanar grid points") {
  // x, y on the 2^-28 grid keep z = x/2 + y/4 exact on the 2^-30 grid;
  // exactly coplanar cases always reach the rational fallback.
  Rng rng(51);
  const double unit = std::ldexp(1.0, -30);
  auto grid = [&] { return 4.0 * unit * std::round((2.0 * rng.uniform() - 1.0) / (4.0 * unit)); };
  auto on_plane = [&] {
    const double x = grid(), y = grid();
    return Vec3(x, y, 0.5 * x + 0.25 * y);
  };
  int mismatches = 0, zeros = 0;
  const long before = exact_fallback_count();
  for (int i = 0; i < 2000; ++i) {
    const Vec3 a = on_plane(), b = on_plane(), c = on_plane();
    Vec3 q = on_plane();
    q.z() += (i % 3 - 1) * unit;
    const int expected = orient3d_int128(a, b, c, q);
    zeros += expected == 0;
    mismatches += orient3d(a, b, c, q) != expected;
  }
  CHECK(mismatches == 0);
  CHECK(zeros > 500);
  CHECK(exact_fallback_count() - before >= zeros);
}
