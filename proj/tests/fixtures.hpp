#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <tuple>
#include <vector>

#include "wmark/mesh.hpp"

namespace fixtures {

using wmark::Face;
using wmark::Mesh;
using wmark::Vec3;

// Geodesic sphere: each icosahedron face split into freq^2 triangles.
// 10*freq^2 + 2 vertices, 20*freq^2 faces.
inline Mesh icosphere(int freq, double radius = 10.0, Vec3 center = {}) {
    const double p = (1.0 + std::sqrt(5.0)) / 2.0;
    const std::array<Vec3, 12> ico{Vec3{-1, p, 0}, {1, p, 0},  {-1, -p, 0}, {1, -p, 0}, {0, -1, p},  {0, 1, p},
                                   {0, -1, -p},    {0, 1, -p}, {p, 0, -1},  {p, 0, 1},  {-p, 0, -1}, {-p, 0, 1}};
    const std::array<std::array<int, 3>, 20> tri{{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                                  {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                                  {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                                  {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}}};
    std::vector<Vec3> verts;
    std::vector<Face> faces;
    // lattice point on the icosahedron: integer barycentrics over its corner ids, canonicalized
    std::map<std::array<int, 6>, std::uint32_t> ids;
    auto vid = [&](const std::array<int, 3>& c, int i, int j, int k) {
        std::array<std::pair<int, int>, 3> w{{{c[0], i}, {c[1], j}, {c[2], k}}};
        std::array<int, 6> key{};
        std::sort(w.begin(), w.end());
        int n = 0;
        for (auto [id, wt] : w)
            if (wt > 0) {
                key[static_cast<std::size_t>(n++)] = id;
                key[static_cast<std::size_t>(n++)] = wt;
            }
        for (; n < 6; ++n) key[static_cast<std::size_t>(n)] = -1;
        auto [it, inserted] = ids.try_emplace(key, static_cast<std::uint32_t>(verts.size()));
        if (inserted) {
            const Vec3 q = (ico[static_cast<std::size_t>(c[0])] * i + ico[static_cast<std::size_t>(c[1])] * j +
                            ico[static_cast<std::size_t>(c[2])] * k) /
                           static_cast<double>(freq);
            verts.push_back(center + wmark::normalized(q) * radius);
        }
        return it->second;
    };
    for (const auto& c : tri)
        for (int a = 0; a < freq; ++a)
            for (int b = 0; b < freq - a; ++b) {
                // corner weights (i on c0, j on c1, k on c2); a steps toward c1, b toward c2
                const int i = freq - a - b;
                const auto v0 = vid(c, i, a, b), v1 = vid(c, i - 1, a + 1, b), v2 = vid(c, i - 1, a, b + 1);
                faces.push_back({v0, v1, v2});
                if (b + 1 < freq - a) {
                    const auto v3 = vid(c, i - 2, a + 1, b + 1);
                    faces.push_back({v1, v3, v2});
                }
            }
    return Mesh(std::move(verts), std::move(faces));
}

// Closed box with every face tessellated on a lattice of roughly `cell` spacing.
inline Mesh grid_box(Vec3 lo, Vec3 hi, double cell) {
    const int nx = std::max(1, static_cast<int>(std::lround((hi.x - lo.x) / cell)));
    const int ny = std::max(1, static_cast<int>(std::lround((hi.y - lo.y) / cell)));
    const int nz = std::max(1, static_cast<int>(std::lround((hi.z - lo.z) / cell)));
    std::vector<Vec3> verts;
    std::vector<Face> faces;
    std::map<std::array<int, 3>, std::uint32_t> ids;
    auto vid = [&](int i, int j, int k) {
        auto [it, inserted] = ids.try_emplace({i, j, k}, static_cast<std::uint32_t>(verts.size()));
        if (inserted)
            verts.push_back({lo.x + (hi.x - lo.x) * i / nx, lo.y + (hi.y - lo.y) * j / ny,
                             lo.z + (hi.z - lo.z) * k / nz});
        return it->second;
    };
    // quad (a, b, c, d) counter-clockwise seen from outside
    auto quad = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
        faces.push_back({a, b, c});
        faces.push_back({a, c, d});
    };
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            quad(vid(i, j, nz), vid(i + 1, j, nz), vid(i + 1, j + 1, nz), vid(i, j + 1, nz));
            quad(vid(i, j, 0), vid(i, j + 1, 0), vid(i + 1, j + 1, 0), vid(i + 1, j, 0));
        }
    for (int i = 0; i < nx; ++i)
        for (int k = 0; k < nz; ++k) {
            quad(vid(i, 0, k), vid(i + 1, 0, k), vid(i + 1, 0, k + 1), vid(i, 0, k + 1));
            quad(vid(i, ny, k), vid(i, ny, k + 1), vid(i + 1, ny, k + 1), vid(i + 1, ny, k));
        }
    for (int j = 0; j < ny; ++j)
        for (int k = 0; k < nz; ++k) {
            quad(vid(0, j, k), vid(0, j, k + 1), vid(0, j + 1, k + 1), vid(0, j + 1, k));
            quad(vid(nx, j, k), vid(nx, j + 1, k), vid(nx, j + 1, k + 1), vid(nx, j, k + 1));
        }
    return Mesh(std::move(verts), std::move(faces));
}

inline Mesh box(Vec3 lo, Vec3 hi) { return grid_box(lo, hi, 1e9); }

inline Mesh unit_cube() { return box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}); }

// 30 x 30 x 3 slab, top face at z = 0.
inline Mesh slab(double cell = 0.5) { return grid_box({-15, -15, -3}, {15, 15, 0}, cell); }

inline Mesh torus(double major = 10.0, double minor = 4.0, int nu = 96, int nv = 48) {
    std::vector<Vec3> verts;
    std::vector<Face> faces;
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            const double u = 2 * M_PI * i / nu, v = 2 * M_PI * j / nv;
            verts.push_back({(major + minor * std::cos(v)) * std::cos(u), (major + minor * std::cos(v)) * std::sin(u),
                             minor * std::sin(v)});
        }
    auto id = [&](int i, int j) { return static_cast<std::uint32_t>(((i + nu) % nu) * nv + (j + nv) % nv); };
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return Mesh(std::move(verts), std::move(faces));
}

// Open square patch in the plane z = 0, normals toward +Z.
inline Mesh plane_patch(double half = 10.0, int n = 20) {
    std::vector<Vec3> verts;
    std::vector<Face> faces;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) verts.push_back({-half + 2 * half * i / n, -half + 2 * half * j / n, 0.0});
    auto id = [&](int i, int j) { return static_cast<std::uint32_t>(j * (n + 1) + i); };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return Mesh(std::move(verts), std::move(faces));
}

// Triangle soup of `n` random triangles inside [-5, 5]^3.
inline Mesh random_soup(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::vector<Vec3> verts;
    std::vector<Face> faces;
    for (std::size_t i = 0; i < n; ++i) {
        const auto b = static_cast<std::uint32_t>(verts.size());
        for (int k = 0; k < 3; ++k) verts.push_back({u(rng), u(rng), u(rng)});
        faces.push_back({b, b + 1, b + 2});
    }
    return Mesh(std::move(verts), std::move(faces));
}

// Frequency giving roughly `target` vertices.
inline int icosphere_freq_for_vertices(std::size_t target) {
    return std::max(1, static_cast<int>(std::lround(std::sqrt((static_cast<double>(target) - 2.0) / 10.0))));
}

}  // namespace fixtures
