#pragma once

#include "capcover/types.hpp"

namespace capcover {

/// Sign of ((b - a) x (c - a)).z: +1 if c is left of a->b.
int orient2d(const Vec3& a, const Vec3& b, const Vec3& c);

/// Sign of ((b - a) x (c - a)) . (q - a): +1 if q lies on the side the
/// counterclockwise normal of (a, b, c) points to.
int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& q);

/// Number of predicate calls that fell through to exact rational arithmetic
/// in this thread.
long exact_fallback_count();

}  // namespace capcover
