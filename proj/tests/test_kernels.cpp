#include <doctest.h>

#include "capcover/bodies.hpp"
#include "capcover/hull.hpp"
#include "capcover/kernels.hpp"
#include "capcover/rng.hpp"
#include "capcover/sampling.hpp"

#include <cmath>
#include <vector>

using namespace capcover;

TEST_CASE("parallel_map matches the serial path") {
  auto f = [](std::size_t i) { return std::sin(0.001 * static_cast<double>(i)) * std::sqrt(double(i)); };
  const auto serial = parallel_map(100000, f, Exec::kSerial);
  const auto parallel = parallel_map(100000, f, Exec::kParallel);
  CHECK(serial == parallel);
  CHECK(parallel_map(0, f).empty());
  CHECK_THROWS_AS(parallel_map(1000, [](std::size_t i) -> double {
                    if (i == 777) throw NumericalError("boom");
                    return 0.0;
                  }),
                  NumericalError);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  std::vector<double> v(50000, 1.0);
  v[31337] = 2.0;
  v[40000] = 2.0;
  v[49999] = 2.0;
  for (Exec exec : {Exec::kSerial, Exec::kParallel}) {
    const ArgMax m = argmax(v, exec);
    CHECK(m.index == 31337);
    CHECK(m.value == 2.0);
  }
  const std::vector<double> flat(1000, -3.0);
  CHECK(argmax(flat, Exec::kParallel).index == 0);
  CHECK_THROWS_AS(argmax(std::vector<double>{}), DomainError);

  Rng rng(70);
  std::vector<double> r(77777);
  for (double& x : r) x = std::floor(100.0 * rng.uniform());
  const ArgMax a = argmax(r, Exec::kSerial), b = argmax(r, Exec::kParallel);
  CHECK(a.index == b.index);
  CHECK(a.value == b.value);
}

TEST_CASE("distances to a unit cube") {
  std::vector<Vec3> corners;
  for (int i = 0; i < 8; ++i) corners.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  const InscribedPolytope cube = convex_hull(corners, 3);
  const std::vector<Vec3> q{{2, 0.5, 0.5}, {2, 2, 0.5}, {2, 2, 2}, {0.5, 0.5, 0.5}, {0.25, 0.5, 0.5}};
  const auto d = distances_to_polytope(cube, q, Exec::kSerial);
  CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(d[2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(d[3] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(d[4] == doctest::Approx(0.25).epsilon(1e-14));
  const ArgMax worst = brute_force_hausdorff(cube, q);
  CHECK(worst.index == 2);

  const std::vector<Vec3> square{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  const InscribedPolytope poly = convex_hull(square, 2);
  const std::vector<Vec3> p2{{2, 0.5, 0}, {2, 2, 0}, {0.5, 0.4, 0}};
  const auto d2 = distances_to_polytope(poly, p2);
  CHECK(d2[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d2[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(d2[2] == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("brute-force Hausdorff kernels agree across execution paths") {
  for (const ConvexBody& body : {make_ellipsoid({2, 1, 1}), make_ellipsoid({2, 1})}) {
    CAPTURE(body.name());
    const InscribedPolytope poly = convex_hull(sample_h_kappa(body, 300, 71));
    std::vector<Vec3> dense;
    for (const Vec3& w : scan_directions(body.dim(), 20000)) dense.push_back(body.radial_point(w));
    const auto serial = distances_to_polytope(poly, dense, Exec::kSerial);
    const auto parallel = distances_to_polytope(poly, dense, Exec::kParallel);
    CHECK(serial == parallel);
    const ArgMax a = brute_force_hausdorff(poly, dense, Exec::kSerial);
    const ArgMax b = brute_force_hausdorff(poly, dense, Exec::kParallel);
    CHECK(a.index == b.index);
    CHECK(a.value == b.value);
  }
  InscribedPolytope degenerate;
  degenerate.is_degenerate = true;
  CHECK_THROWS_AS(distances_to_polytope(degenerate, std::vector<Vec3>{Vec3::Zero()}), DegenerateError);
}
