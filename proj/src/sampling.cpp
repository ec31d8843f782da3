#include "capcover/sampling.hpp"

#include "capcover/quadrature.hpp"
#include "capcover/rng.hpp"

#include <algorithm>
#include <cmath>

namespace capcover {

DirectionPatch full_patch(int d) {
  if (d == 2) return {0.0, 2.0 * kPi, 0.0, 0.0};
  return {-1.0, 1.0, 0.0, 2.0 * kPi};
}

std::vector<DirectionPatch> standard_patches(int d) {
  std::vector<DirectionPatch> out;
  if (d == 2) {
    for (int k = 0; k < 32; ++k)
      out.push_back({2.0 * kPi * k / 32.0, 2.0 * kPi * (k + 1) / 32.0, 0.0, 0.0});
    return out;
  }
  for (int band = 0; band < 4; ++band)
    for (int s = 0; s < 8; ++s)
      out.push_back({-1.0 + 0.5 * band, -0.5 + 0.5 * band, 2.0 * kPi * s / 8.0,
                     2.0 * kPi * (s + 1) / 8.0});
  return out;
}

int standard_patch_index(int d, const Vec3& x) {
  auto angle = [](double y, double xx) {
    double t = std::atan2(y, xx);
    return t < 0.0 ? t + 2.0 * kPi : t;
  };
  if (d == 2) return std::min(31, static_cast<int>(angle(x.y(), x.x()) / (2.0 * kPi) * 32.0));
  const double z = x.z() / x.norm();
  const int band = std::clamp(static_cast<int>((z + 1.0) / 0.5), 0, 3);
  const int sector = std::min(7, static_cast<int>(angle(x.y(), x.x()) / (2.0 * kPi) * 8.0));
  return band * 8 + sector;
}

double boundary_integral(const ConvexBody& body, const std::function<double(const Vec3&)>& g,
                         const DirectionPatch& patch, int level) {
  if (level < 1) throw DomainError("quadrature level must be >= 1");
  const int d = body.dim();
  auto integrand = [&](const Vec3& w) {
    const Vec3 x = body.radial_point(w);
    const Vec3 n = body.outward_normal(x);
    const double jac = std::pow(x.norm(), d - 1) / w.dot(n);
    return g(x) * jac;
  };
  if (d == 2) {
    return gauss_legendre(
        [&](double t) { return integrand(Vec3(std::cos(t), std::sin(t), 0.0)); }, patch.lo0,
        patch.hi0, level);
  }
  // (z, azimuth) is an equal-area chart of the sphere: dsigma = dz dphi.
  const auto zs = gauss_legendre_nodes(patch.lo0, patch.hi0, level);
  const auto phis = gauss_legendre_nodes(patch.lo1, patch.hi1, 2 * level);
  double sum = 0.0;
  for (const auto& zn : zs) {
    const double r = std::sqrt(std::max(0.0, 1.0 - zn.x * zn.x));
    double row = 0.0;
    for (const auto& pn : phis)
      row += pn.w * integrand(Vec3(r * std::cos(pn.x), r * std::sin(pn.x), zn.x));
    sum += zn.w * row;
  }
  return sum;
}

namespace {

QuadratureResult adaptive_integral(const ConvexBody& body,
                                   const std::function<double(const Vec3&)>& g, int level) {
  if (level < 1) throw DomainError("quadrature level must be >= 1");
  const DirectionPatch patch = full_patch(body.dim());
  double coarse = boundary_integral(body, g, patch, level);
  constexpr int kMaxLevel = 1024;
  while (true) {
    const double fine = boundary_integral(body, g, patch, 2 * level);
    const double change = std::abs(fine - coarse) / std::abs(fine);
    if (change < 1e-8) return {fine, 2 * level, change};
    if (2 * level >= kMaxLevel)
      throw NumericalError("quadrature did not converge; relative change " +
                           std::to_string(change));
    level *= 2;
    coarse = fine;
  }
}

}  // namespace

QuadratureResult v_kappa(const ConvexBody& body, int quad_level) {
  return adaptive_integral(
      body, [&](const Vec3& x) { return std::sqrt(body.gaussian_curvature(x)); }, quad_level);
}

QuadratureResult surface_area(const ConvexBody& body, int quad_level) {
  return adaptive_integral(body, [](const Vec3&) { return 1.0; }, quad_level);
}

namespace {

// Area-uniform proposal; returns the accepted boundary point.
Vec3 propose_area_uniform(const ConvexBody& body, Rng& rng) {
  const int d = body.dim();
  const double envelope = body.area_envelope();
  while (true) {
    const Vec3 w = rng.unit_vector(d);
    const Vec3 x = body.radial_point(w);
    const double jac = std::pow(x.norm(), d - 1) / w.dot(body.outward_normal(x));
    if (jac > envelope) throw NumericalError("area rejection envelope violated");
    if (rng.uniform() * envelope < jac) return x;
  }
}

void check_n(std::size_t n) {
  if (n < 1) throw DomainError("sample size must be >= 1");
}

}  // namespace

SampleSet sample_uniform_area(const ConvexBody& body, std::size_t n, std::uint64_t seed) {
  check_n(n);
  Rng rng(seed);
  SampleSet out{body, {}, seed};
  out.points.reserve(n);
  while (out.points.size() < n) out.points.push_back(body.make_point(propose_area_uniform(body, rng)));
  return out;
}

SampleSet sample_h_kappa(const ConvexBody& body, std::size_t n, std::uint64_t seed) {
  check_n(n);
  Rng rng(seed);
  SampleSet out{body, {}, seed};
  out.points.reserve(n);
  const double envelope = body.sqrt_curvature_envelope();
  while (out.points.size() < n) {
    const Vec3 x = propose_area_uniform(body, rng);
    const double sk = std::sqrt(body.gaussian_curvature(x));
    if (sk > envelope) throw NumericalError("curvature rejection envelope violated");
    if (rng.uniform() * envelope < sk) out.points.push_back(body.make_point(x));
  }
  return out;
}

}  // namespace capcover
