#include "wmark/predicates.hpp"

#include <gmpxx.h>

#include <cmath>

namespace wmark {

namespace {

// Static error bounds for the straightforward floating-point evaluation.
constexpr double kEps = 1.1102230246251565e-16;  // 2^-53
constexpr double kOrient2dBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kOrient3dBound = (7.0 + 56.0 * kEps) * kEps;
constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps;

int sign_of(const mpq_class& v) { return sgn(v); }

int orient2d_exact(const Vec2& a, const Vec2& b, const Vec2& c) {
    const mpq_class acx = mpq_class(a.x) - c.x, bcx = mpq_class(b.x) - c.x;
    const mpq_class acy = mpq_class(a.y) - c.y, bcy = mpq_class(b.y) - c.y;
    return sign_of(acx * bcy - acy * bcx);
}

int orient3d_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    const mpq_class adx = mpq_class(a.x) - d.x, bdx = mpq_class(b.x) - d.x, cdx = mpq_class(c.x) - d.x;
    const mpq_class ady = mpq_class(a.y) - d.y, bdy = mpq_class(b.y) - d.y, cdy = mpq_class(c.y) - d.y;
    const mpq_class adz = mpq_class(a.z) - d.z, bdz = mpq_class(b.z) - d.z, cdz = mpq_class(c.z) - d.z;
    const mpq_class det = adx * (bdy * cdz - bdz * cdy) + bdx * (cdy * adz - cdz * ady) + cdx * (ady * bdz - adz * bdy);
    return sign_of(det);
}

int incircle_exact(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const mpq_class adx = mpq_class(a.x) - d.x, ady = mpq_class(a.y) - d.y;
    const mpq_class bdx = mpq_class(b.x) - d.x, bdy = mpq_class(b.y) - d.y;
    const mpq_class cdx = mpq_class(c.x) - d.x, cdy = mpq_class(c.y) - d.y;
    const mpq_class alift = adx * adx + ady * ady;
    const mpq_class blift = bdx * bdx + bdy * bdy;
    const mpq_class clift = cdx * cdx + cdy * cdy;
    const mpq_class det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) + clift * (adx * bdy - bdx * ady);
    return sign_of(det);
}

int filtered(double det, double bound) {
    if (det > bound) return 1;
    if (-det > bound) return -1;
    return 0;  // undecided
}

}  // namespace

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double left = (a.x - c.x) * (b.y - c.y);
    const double right = (a.y - c.y) * (b.x - c.x);
    const double det = left - right;
    const double bound = kOrient2dBound * (std::abs(left) + std::abs(right));
    if (const int s = filtered(det, bound); s != 0) return s;
    return orient2d_exact(a, b, c);
}

double orient3d_value(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    const Vec3 ad = a - d, bd = b - d, cd = c - d;
    return ad.x * (bd.y * cd.z - bd.z * cd.y) + bd.x * (cd.y * ad.z - cd.z * ad.y) + cd.x * (ad.y * bd.z - ad.z * bd.y);
}

int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    const Vec3 ad = a - d, bd = b - d, cd = c - d;
    const double det = orient3d_value(a, b, c, d);
    const double permanent = std::abs(ad.x) * (std::abs(bd.y * cd.z) + std::abs(bd.z * cd.y)) +
                             std::abs(bd.x) * (std::abs(cd.y * ad.z) + std::abs(cd.z * ad.y)) +
                             std::abs(cd.x) * (std::abs(ad.y * bd.z) + std::abs(ad.z * bd.y));
    // the subtractions a - d etc. are rounded too; widen the bound to cover them
    if (const int s = filtered(det, 4.0 * kOrient3dBound * permanent); s != 0) return s;
    return orient3d_exact(a, b, c, d);
}

int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double bc = bdx * cdy - cdx * bdy, ca = cdx * ady - adx * cdy, ab = adx * bdy - bdx * ady;
    const double alift = adx * adx + ady * ady, blift = bdx * bdx + bdy * bdy, clift = cdx * cdx + cdy * cdy;
    const double det = alift * bc + blift * ca + clift * ab;
    const double permanent = (std::abs(bdx * cdy) + std::abs(cdx * bdy)) * alift +
                             (std::abs(cdx * ady) + std::abs(adx * cdy)) * blift +
                             (std::abs(adx * bdy) + std::abs(bdx * ady)) * clift;
    if (const int s = filtered(det, 4.0 * kIncircleBound * permanent); s != 0) return s;
    return incircle_exact(a, b, c, d);
}

}  // namespace wmark
