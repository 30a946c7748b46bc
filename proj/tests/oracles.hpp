#pragma once

// Brute-force reference implementations, written independently of the library.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "wmark/mesh.hpp"

namespace oracle {

using wmark::Mesh;
using wmark::Vec3;

// Closest point on a triangle by minimizing over the interior projection and
// the three edge segments.
inline double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 n = wmark::cross(b - a, c - a);
    const double nn = wmark::dot(n, n);
    double best = std::numeric_limits<double>::infinity();
    if (nn > 0.0) {
        const double s = wmark::dot(p - a, n) / nn;
        const Vec3 q = p - n * s;
        const double u = wmark::dot(wmark::cross(c - b, q - b), n) / nn;
        const double v = wmark::dot(wmark::cross(a - c, q - c), n) / nn;
        const double w = 1.0 - u - v;
        if (u >= 0 && v >= 0 && w >= 0) best = wmark::distance(p, q);
    }
    auto seg = [&](const Vec3& x, const Vec3& y) {
        const Vec3 d = y - x;
        const double dd = wmark::dot(d, d);
        double t = dd > 0 ? wmark::dot(p - x, d) / dd : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        return wmark::distance(p, x + d * t);
    };
    best = std::min({best, seg(a, b), seg(b, c), seg(c, a)});
    return best;
}

inline double mesh_distance(const Mesh& m, const Vec3& p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < m.face_count(); ++f) {
        const auto t = m.triangle(f);
        best = std::min(best, point_triangle_distance(p, t[0], t[1], t[2]));
    }
    return best;
}

// Ray/plane intersection followed by an inside test with edge functions.
inline std::optional<double> ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c,
                                          double t_min) {
    const Vec3 n = wmark::cross(b - a, c - a);
    const double denom = wmark::dot(n, d);
    if (std::abs(denom) < 1e-300) return std::nullopt;
    const double t = wmark::dot(a - o, n) / denom;
    if (!(t > t_min)) return std::nullopt;
    const Vec3 q = o + d * t;
    const double e0 = wmark::dot(wmark::cross(b - a, q - a), n);
    const double e1 = wmark::dot(wmark::cross(c - b, q - b), n);
    const double e2 = wmark::dot(wmark::cross(a - c, q - c), n);
    if (e0 >= 0 && e1 >= 0 && e2 >= 0) return t;
    return std::nullopt;
}

inline std::optional<double> nearest_hit(const Mesh& m, const Vec3& o, const Vec3& d, double t_min = 1e-7) {
    std::optional<double> best;
    for (std::size_t f = 0; f < m.face_count(); ++f) {
        const auto tri = m.triangle(f);
        if (auto t = ray_triangle(o, d, tri[0], tri[1], tri[2], t_min))
            if (!best || *t < *best) best = t;
    }
    return best;
}

__extension__ typedef __int128 i128;

// Exhaustive Otsu over all cuts with exact rational comparison.
inline double otsu(const std::vector<double>& values) {
    std::vector<long long> bin;
    for (double v : values) bin.push_back(std::min(255LL, static_cast<long long>(std::floor(v * 256))));
    std::vector<std::pair<i128, i128>> score;  // numerator, denominator
    for (long long k = 0; k < 255; ++k) {
        i128 w0 = 0, w1 = 0, s0 = 0, s1 = 0;
        for (long long b : bin) (b <= k ? (++w0, s0 += b) : (++w1, s1 += b));
        if (w0 == 0 || w1 == 0) {
            score.push_back({0, 1});
            continue;
        }
        // w0 w1 (s0/w0 - s1/w1)^2 = (w1 s0 - w0 s1)^2 / (w0 w1)
        const i128 d = w1 * s0 - w0 * s1;
        score.push_back({d * d, w0 * w1});
    }
    auto gt = [](auto a, auto b) { return a.first * b.second > b.first * a.second; };
    auto eq = [](auto a, auto b) { return a.first * b.second == b.first * a.second; };
    std::size_t best = 0;
    for (std::size_t k = 1; k < score.size(); ++k)
        if (gt(score[k], score[best])) best = k;
    std::size_t last = best;
    while (last + 1 < score.size() && eq(score[last + 1], score[best])) ++last;
    return ((static_cast<double>(best) + static_cast<double>(last)) / 2.0 + 1.0) / 256.0;
}

}  // namespace oracle
