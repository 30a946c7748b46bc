#pragma once

#include "wmark/vec.hpp"

namespace wmark {

struct Vec2 {
    double x = 0.0, y = 0.0;
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Geometric predicates with a floating-point filter and an exact rational
/// fallback, so the returned sign is always the sign of the exact determinant
/// of the (double) inputs.

/// > 0 when a, b, c turn counter-clockwise.
int orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

/// > 0 when d lies on the positive side of plane (a, b, c), i.e. below it when
/// a, b, c appear counter-clockwise seen from above.
int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Floating-point value of the orient3d determinant (six times the signed
/// volume of tetrahedron a, b, c, d with the same sign convention).
double orient3d_value(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// > 0 when d lies strictly inside the circle through counter-clockwise a, b, c.
int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

}  // namespace wmark
