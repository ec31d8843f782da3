#include "capcover/predicates.hpp"

#include <gmpxx.h>

#include <cmath>

namespace capcover {

namespace {

// Forward error bounds for the floating-point determinants (Shewchuk's
// ccwerrboundA and o3derrboundA).
constexpr double kEps = 0x1.0p-53;
constexpr double kErr2 = (3.0 + 16.0 * kEps) * kEps;
constexpr double kErr3 = (7.0 + 56.0 * kEps) * kEps;

thread_local long g_exact_calls = 0;

int sign_of(const mpq_class& v) { return sgn(v); }

}  // namespace

long exact_fallback_count() { return g_exact_calls; }

int orient2d(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double ux = b.x() - a.x(), uy = b.y() - a.y();
  const double vx = c.x() - a.x(), vy = c.y() - a.y();
  const double l = ux * vy, r = uy * vx;
  const double det = l - r;
  const double bound = kErr2 * (std::abs(l) + std::abs(r));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  ++g_exact_calls;
  const mpq_class ex(b.x()), ey(b.y()), ax(a.x()), ay(a.y()), cx(c.x()), cy(c.y());
  const mpq_class value = (ex - ax) * (cy - ay) - (ey - ay) * (cx - ax);
  return sign_of(value);
}

int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& q) {
  const double ux = b.x() - a.x(), uy = b.y() - a.y(), uz = b.z() - a.z();
  const double vx = c.x() - a.x(), vy = c.y() - a.y(), vz = c.z() - a.z();
  const double wx = q.x() - a.x(), wy = q.y() - a.y(), wz = q.z() - a.z();
  const double vywz = vy * wz, vzwy = vz * wy;
  const double vzwx = vz * wx, vxwz = vx * wz;
  const double vxwy = vx * wy, vywx = vy * wx;
  const double det = ux * (vywz - vzwy) + uy * (vzwx - vxwz) + uz * (vxwy - vywx);
  const double permanent = std::abs(ux) * (std::abs(vywz) + std::abs(vzwy)) +
                           std::abs(uy) * (std::abs(vzwx) + std::abs(vxwz)) +
                           std::abs(uz) * (std::abs(vxwy) + std::abs(vywx));
  const double bound = kErr3 * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  ++g_exact_calls;
  // The explicit return type evaluates the expression template before the
  // temporaries it refers to are destroyed.
  auto diff = [](double p, double o) -> mpq_class { return mpq_class(p) - mpq_class(o); };
  const mpq_class Ux = diff(b.x(), a.x()), Uy = diff(b.y(), a.y()), Uz = diff(b.z(), a.z());
  const mpq_class Vx = diff(c.x(), a.x()), Vy = diff(c.y(), a.y()), Vz = diff(c.z(), a.z());
  const mpq_class Wx = diff(q.x(), a.x()), Wy = diff(q.y(), a.y()), Wz = diff(q.z(), a.z());
  const mpq_class value =
      Ux * (Vy * Wz - Vz * Wy) + Uy * (Vz * Wx - Vx * Wz) + Uz * (Vx * Wy - Vy * Wx);
  return sign_of(value);
}

}  // namespace capcover
