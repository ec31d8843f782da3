#include <doctest.h>

#include "capcover/bodies.hpp"
#include "capcover/rng.hpp"

#include <cmath>
#include <vector>

using namespace capcover;

namespace {

std::vector<ConvexBody> all_bodies() {
  return {make_ball(3, 1.0),        make_ball(3, 2.0),     make_ellipsoid({2, 1, 1}),
          make_ellipsoid({3, 2, 1}), make_quartic(3, 0.3), make_ball(2, 1.0),
          make_ellipsoid({2, 1}),    make_quartic(2, 0.3)};
}

ChartVec random_chart_vector(Rng& rng, int d, double max_norm) {
  ChartVec y(d - 1);
  if (d == 2) {
    y[0] = (2.0 * rng.uniform() - 1.0) * max_norm;
  } else {
    const double t = 2.0 * kPi * rng.uniform();
    const double r = max_norm * std::sqrt(rng.uniform());
    y << r * std::cos(t), r * std::sin(t);
  }
  return y;
}

// Closed-form ellipsoid curvature, kept independent of the library.
double ellipsoid_curvature(const Vec3& x, double a, double b, double c) {
  const double s = x.x() * x.x() / std::pow(a, 4) + x.y() * x.y() / std::pow(b, 4) +
                   x.z() * x.z() / std::pow(c, 4);
  return 1.0 / (a * a * b * b * c * c * s * s);
}

}  // namespace

TEST_CASE("ball evaluators") {
  const ConvexBody circle = make_ball(2, 1.0);
  const ConvexBody sphere = make_ball(3, 1.0);
  const ConvexBody big = make_ball(3, 2.0);
  Rng rng(11);
  for (int i = 0; i < 10; ++i) {
    const Vec3 u = rng.unit_vector(3);
    CHECK(sphere.support(u) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((sphere.inverse_normal(u) - u).norm() < 1e-14);
    CHECK(big.gaussian_curvature(big.inverse_normal(u)) == doctest::Approx(0.25).epsilon(1e-14));
    const Vec3 w = rng.unit_vector(2);
    CHECK(circle.gaussian_curvature(circle.inverse_normal(w)) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(sphere.sphere_radius() == 1.0);
  CHECK_THROWS_AS(make_ellipsoid({2, 1, 1}).sphere_radius(), DomainError);
}

TEST_CASE("unit ellipsoid matches the unit ball") {
  const ConvexBody ball = make_ball(3, 1.0);
  const ConvexBody ell = make_ellipsoid({1, 1, 1});
  Rng rng(12);
  for (int i = 0; i < 10; ++i) {
    const Vec3 u = rng.unit_vector(3);
    CHECK(std::abs(ball.support(u) - ell.support(u)) < 1e-12);
    CHECK((ball.inverse_normal(u) - ell.inverse_normal(u)).norm() < 1e-12);
    const Vec3 x = ell.inverse_normal(u);
    CHECK(std::abs(ball.gaussian_curvature(x) - ell.gaussian_curvature(x)) < 1e-12);
    CHECK((ball.outward_normal(x) - ell.outward_normal(x)).norm() < 1e-12);
  }
}

TEST_CASE("ellipsoid closed forms") {
  const ConvexBody e = make_ellipsoid({2, 1, 1});
  CHECK(e.support(Vec3::UnitX()) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK((e.inverse_normal(Vec3::UnitX()) - Vec3(2, 0, 0)).norm() < 1e-14);
  CHECK(gaussian_curvature(e, e.make_point(Vec3(2, 0, 0))) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(gaussian_curvature(e, e.make_point(Vec3(0, 1, 0))) == doctest::Approx(0.25).epsilon(1e-12));

  const ConvexBody ellipse = make_ellipsoid({2, 1});
  CHECK(gaussian_curvature(ellipse, ellipse.make_point(Vec3(2, 0, 0))) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(gaussian_curvature(ellipse, ellipse.make_point(Vec3(0, 1, 0))) ==
        doctest::Approx(0.25).epsilon(1e-12));

  const ConvexBody g = make_ellipsoid({3, 2, 1});
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const Vec3 u = rng.unit_vector(3);
    const Vec3 x = g.inverse_normal(u);
    CHECK(g.gaussian_curvature(x) == doctest::Approx(ellipsoid_curvature(x, 3, 2, 1)).epsilon(1e-11));
    const double h = std::sqrt(9 * u.x() * u.x() + 4 * u.y() * u.y() + u.z() * u.z());
    CHECK(g.support(u) == doctest::Approx(h).epsilon(1e-13));
  }
}

TEST_CASE("support, normal and inverse normal are consistent") {
  Rng rng(14);
  for (const ConvexBody& body : all_bodies()) {
    CAPTURE(body.name());
    for (int i = 0; i < 100; ++i) {
      const Vec3 w = rng.unit_vector(body.dim());
      const Vec3 x = body.radial_point(w);
      CHECK(body.on_boundary(x));
      const Vec3 u = body.outward_normal(x);
      CHECK(std::abs(u.norm() - 1.0) < 1e-12);
      CHECK(std::abs(u.dot(x) - body.support(u)) < 1e-10);
      CHECK((body.inverse_normal(u) - x).norm() < 1e-8);
      CHECK(body.gaussian_curvature(x) > 0.0);
    }
  }
}

TEST_CASE("graph chart on the unit sphere") {
  const ConvexBody sphere = make_ball(3, 1.0);
  Rng rng(15);
  for (int i = 0; i < 10; ++i) {
    const BoundaryPoint p = sphere.point_from_normal(rng.unit_vector(3));
    const GraphJet j0 = graph_function_derivatives(sphere, p, ChartVec::Zero(2));
    CHECK(std::abs(j0.value) < 1e-14);
    CHECK(j0.gradient.norm() < 1e-14);
    CHECK((j0.hessian - ChartMat::Identity(2, 2)).norm() < 1e-12);
    ChartVec y(2);
    y << 0.06, 0.08;
    const GraphJet j = graph_function_derivatives(sphere, p, y);
    CHECK(j.value == doctest::Approx(1.0 - std::sqrt(1.0 - 0.01)).epsilon(1e-12));
  }
}

TEST_CASE("ellipsoid chart hessian at the major axis") {
  const ConvexBody e = make_ellipsoid({2, 1, 1});
  const GraphJet j = graph_function_derivatives(e, e.make_point(Vec3(2, 0, 0)), ChartVec::Zero(2));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es{Eigen::Matrix2d(j.hessian)};
  CHECK(es.eigenvalues()[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(es.eigenvalues()[1] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("graph hessian matches central differences") {
  Rng rng(16);
  const double h = 1e-4;
  for (const ConvexBody& body : all_bodies()) {
    CAPTURE(body.name());
    const int k = body.dim() - 1;
    for (int i = 0; i < 20; ++i) {
      const BoundaryPoint p = body.point_from_direction(rng.unit_vector(body.dim()));
      const ChartVec y = random_chart_vector(rng, body.dim(), 0.5 * body.chart_radius());
      const GraphJet jet = graph_function_derivatives(body, p, y);
      auto f = [&](const ChartVec& z) { return graph_function_derivatives(body, p, z).value; };
      for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
          ChartVec ea = ChartVec::Zero(k), eb = ChartVec::Zero(k);
          ea[a] = h;
          eb[b] = h;
          const double fd = (f(y + ea + eb) - f(y + ea - eb) - f(y - ea + eb) + f(y - ea - eb)) /
                            (4.0 * h * h);
          CHECK(std::abs(fd - jet.hessian(a, b)) <= 1e-6 * jet.hessian.norm() + 1e-7);
        }
        ChartVec ea = ChartVec::Zero(k);
        ea[a] = h;
        const double fd = (f(y + ea) - f(y - ea)) / (2.0 * h);
        CHECK(std::abs(fd - jet.gradient[a]) <= 1e-6);
      }
    }
  }
}

TEST_CASE("curvature is the determinant of the graph hessian at the foot point") {
  Rng rng(17);
  for (const ConvexBody& body : all_bodies()) {
    CAPTURE(body.name());
    for (int i = 0; i < 50; ++i) {
      const BoundaryPoint p = body.point_from_direction(rng.unit_vector(body.dim()));
      const GraphJet j = graph_function_derivatives(body, p, ChartVec::Zero(body.dim() - 1));
      CHECK(j.hessian.determinant() == doctest::Approx(gaussian_curvature(body, p)).epsilon(1e-10));
    }
  }
}

TEST_CASE("osculating sandwich with delta = 1 on the certified chart") {
  Rng rng(18);
  for (const ConvexBody& body : all_bodies()) {
    CAPTURE(body.name());
    CHECK(body.lambda() == doctest::Approx(body.chart_radius() / 4.0));
    const CurvatureBounds cb = body.curvature_bounds();
    CHECK(body.c_K() == doctest::Approx(0.5 * cb.k_min));
    for (int i = 0; i < 1000; ++i) {
      const BoundaryPoint p = body.point_from_direction(rng.unit_vector(body.dim()));
      const ChartVec y = random_chart_vector(rng, body.dim(), 4.0 * body.lambda());
      if (y.norm() < 1e-6) continue;
      const double f = graph_function_derivatives(body, p, y).value;
      const double b0 = osculating_quadratic(body, p, y);
      CHECK(f >= 0.5 * b0);
      CHECK(f <= 2.0 * b0);
      const double y2 = y.squaredNorm();
      CHECK(b0 >= body.c_K() * y2 * (1.0 - 1e-9));
      CHECK(b0 <= body.C_K() * y2 * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("scaling a body") {
  const ConvexBody e = make_ellipsoid({2, 1, 1});
  const ConvexBody s = e.scaled(3.0);
  Rng rng(19);
  for (int i = 0; i < 20; ++i) {
    const Vec3 u = rng.unit_vector(3);
    CHECK(s.support(u) == doctest::Approx(3.0 * e.support(u)).epsilon(1e-13));
    const Vec3 x = e.inverse_normal(u);
    CHECK(s.gaussian_curvature(3.0 * x) ==
          doctest::Approx(e.gaussian_curvature(x) / 9.0).epsilon(1e-12));
  }
  CHECK(s.chart_radius() == doctest::Approx(3.0 * e.chart_radius()).epsilon(0.02));
}

TEST_CASE("generic defining-function body") {
  // The ellipsoid (2,1,1) through the generic code path.
  DefiningFunction f;
  f.value = [](const Vec3& x) { return x.x() * x.x() / 4 + x.y() * x.y() + x.z() * x.z(); };
  f.gradient = [](const Vec3& x) { return Vec3(x.x() / 2, 2 * x.y(), 2 * x.z()); };
  f.hessian = [](const Vec3&) { return Mat3(Vec3(0.5, 2, 2).asDiagonal()); };
  const ConvexBody g = make_generic(3, f, "generic-ellipsoid", 2.5);
  const ConvexBody e = make_ellipsoid({2, 1, 1});
  Rng rng(20);
  for (int i = 0; i < 20; ++i) {
    const Vec3 u = rng.unit_vector(3);
    CHECK((g.inverse_normal(u) - e.inverse_normal(u)).norm() < 1e-9);
    CHECK(g.support(u) == doctest::Approx(e.support(u)).epsilon(1e-10));
    const Vec3 x = e.inverse_normal(u);
    CHECK(g.gaussian_curvature(x) == doctest::Approx(e.gaussian_curvature(x)).epsilon(1e-9));
  }
}

TEST_CASE("invalid bodies and points are rejected") {
  CHECK_THROWS_AS(make_ball(4, 1.0), DomainError);
  CHECK_THROWS_AS(make_ball(3, 0.0), DomainError);
  CHECK_THROWS_AS(make_ellipsoid({2, -1, 1}), DomainError);
  CHECK_THROWS_AS(make_ellipsoid({1}), DomainError);
  CHECK_THROWS_AS(make_quartic(3, -0.1), DomainError);
  const ConvexBody sphere = make_ball(3, 1.0);
  CHECK_THROWS_AS(sphere.make_point(Vec3(0.5, 0, 0)), DomainError);
  BoundaryPoint off = sphere.point_from_normal(Vec3::UnitZ());
  off.ambient *= 1.01;
  CHECK_THROWS_AS(gaussian_curvature(sphere, off), DomainError);
  const BoundaryPoint p = sphere.point_from_normal(Vec3::UnitZ());
  ChartVec far(2);
  far << sphere.chart_radius() * 1.01, 0.0;
  CHECK_THROWS_AS(graph_function_derivatives(sphere, p, far), ChartError);
  CHECK_THROWS_AS(sphere.scaled(-1.0), DomainError);
}
