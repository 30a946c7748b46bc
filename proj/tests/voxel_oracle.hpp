#pragma once

// Volume of boolean combinations of axis-aligned boxes on a regular voxel
// grid, with exact per-axis fractional coverage of every voxel.

#include <algorithm>
#include <array>
#include <vector>

#include "wmark/vec.hpp"

namespace oracle {

struct AxisBox {
    wmark::Vec3 lo, hi;
};

enum class Op { Union, Intersection, Difference };

inline double voxel_volume(const AxisBox& a, const AxisBox& b, Op op, int res = 256) {
    wmark::Vec3 lo = wmark::min(a.lo, b.lo), hi = wmark::max(a.hi, b.hi);
    std::array<std::array<std::vector<double>, 3>, 3> cover;  // [box a, box b, a∩b][axis][cell]
    std::array<double, 3> h{};
    for (int ax = 0; ax < 3; ++ax) {
        const auto u = static_cast<std::size_t>(ax);
        h[u] = (hi[u] - lo[u]) / res;
        for (int which = 0; which < 3; ++which) {
            double l0, l1;
            if (which == 0) l0 = a.lo[u], l1 = a.hi[u];
            else if (which == 1) l0 = b.lo[u], l1 = b.hi[u];
            else l0 = std::max(a.lo[u], b.lo[u]), l1 = std::min(a.hi[u], b.hi[u]);
            auto& v = cover[static_cast<std::size_t>(which)][u];
            v.resize(static_cast<std::size_t>(res));
            for (int i = 0; i < res; ++i) {
                const double c0 = lo[u] + h[u] * i, c1 = c0 + h[u];
                v[static_cast<std::size_t>(i)] = std::max(0.0, std::min(c1, l1) - std::max(c0, l0)) / h[u];
            }
        }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(res); ++i)
        for (std::size_t j = 0; j < static_cast<std::size_t>(res); ++j) {
            const double ca = cover[0][0][i] * cover[0][1][j], cb = cover[1][0][i] * cover[1][1][j];
            const double cab = cover[2][0][i] * cover[2][1][j];
            if (ca == 0.0 && cb == 0.0) continue;
            for (std::size_t k = 0; k < static_cast<std::size_t>(res); ++k) {
                const double fa = ca * cover[0][2][k], fb = cb * cover[1][2][k], fab = cab * cover[2][2][k];
                switch (op) {
                    case Op::Union: total += fa + fb - fab; break;
                    case Op::Intersection: total += fab; break;
                    case Op::Difference: total += fa - fab; break;
                }
            }
        }
    return total * h[0] * h[1] * h[2];
}

}  // namespace oracle
