#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "wmark/spatial_index.hpp"

using namespace wmark;

TEST(SpatialIndex, EveryFaceInExactlyOneLeaf) {
    const Mesh m = fixtures::icosphere(6);
    const SpatialIndex idx(m);
    std::multiset<std::uint32_t> seen;
    for (const auto& n : idx.nodes())
        if (n.leaf()) {
            EXPECT_LE(n.count, SpatialIndex::kLeafSize);
            for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
                const auto f = idx.face_order()[i];
                seen.insert(f);
                for (const auto& v : m.triangle(f)) EXPECT_TRUE(n.bounds.contains(v, 1e-12));
            }
        }
    ASSERT_EQ(seen.size(), m.face_count());
    for (std::uint32_t f = 0; f < m.face_count(); ++f) EXPECT_EQ(seen.count(f), 1u);
}

TEST(SpatialIndex, NodeBoundsContainChildren) {
    const SpatialIndex idx(fixtures::random_soup(150, 2));
    for (const auto& n : idx.nodes())
        if (!n.leaf()) {
            const auto& l = idx.nodes()[n.first];
            const auto& r = idx.nodes()[n.right];
            EXPECT_TRUE(n.bounds.contains(l.bounds.lo, 1e-12) && n.bounds.contains(l.bounds.hi, 1e-12));
            EXPECT_TRUE(n.bounds.contains(r.bounds.lo, 1e-12) && n.bounds.contains(r.bounds.hi, 1e-12));
        }
}

TEST(ClosestPoint, AbovePlane) {
    const SpatialIndex idx(fixtures::plane_patch(2.0, 4));
    const ClosestHit h = closest_point(idx, {0, 0, 1});
    EXPECT_NEAR(h.distance, 1.0, 1e-12);
    EXPECT_LE(distance(h.point, {0, 0, 0}), 1e-12);
}

TEST(ClosestPoint, OnSurfaceIsZero) {
    const Mesh m = fixtures::icosphere(3);
    const SpatialIndex idx(m);
    for (const auto& s : surface_sample(m, 50, 1)) EXPECT_NEAR(closest_point(idx, s.position).distance, 0.0, 1e-9);
}

TEST(ClosestPoint, MatchesBruteForce) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Mesh m = fixtures::random_soup(200, seed);
        const SpatialIndex idx(m);
        for (int q = 0; q < 200; ++q) {
            const Vec3 p{u(rng), u(rng), u(rng)};
            const ClosestHit h = closest_point(idx, p);
            EXPECT_NEAR(h.distance, oracle::mesh_distance(m, p), 1e-9);
            EXPECT_NEAR(distance(h.point, p), h.distance, 1e-12);
            const auto t = m.triangle(h.face_index);
            EXPECT_NEAR(oracle::point_triangle_distance(h.point, t[0], t[1], t[2]), 0.0, 1e-9);
        }
    }
}

TEST(RayIntersect, UnitCubeFromAbove) {
    const Mesh cube = fixtures::unit_cube();
    const SpatialIndex idx(cube);
    const auto hit = ray_intersect(idx, {0, 0, 2}, {0, 0, -1});
    ASSERT_TRUE(hit);
    EXPECT_NEAR(hit->t, 1.5, 1e-12);
    EXPECT_NEAR(cube.face_normals()[hit->face_index].z, 1.0, 1e-12);
}

TEST(RayIntersect, PointingAwayMisses) {
    const SpatialIndex idx(fixtures::unit_cube());
    EXPECT_FALSE(ray_intersect(idx, {0, 0, 2}, {0, 0, 1}));
}

TEST(RayIntersect, MatchesBruteForce) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    std::normal_distribution<double> g;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Mesh m = fixtures::random_soup(200, seed + 100);
        const SpatialIndex idx(m);
        for (int q = 0; q < 200; ++q) {
            const Vec3 o{u(rng), u(rng), u(rng)};
            const Vec3 d = normalized(Vec3{g(rng), g(rng), g(rng)});
            const auto h = idx.ray_intersect(o, d);
            const auto ref = oracle::nearest_hit(m, o, d);
            ASSERT_EQ(h.has_value(), ref.has_value());
            if (h) EXPECT_NEAR(h->t, *ref, 1e-9);
        }
    }
}

TEST(RayIntersect, CrossingParity) {
    const SpatialIndex idx(fixtures::icosphere(4));
    EXPECT_EQ(idx.count_crossings({0, 0, 0}, normalized(Vec3{0.3, 0.2, 0.9})) % 2, 1u);
    EXPECT_EQ(idx.count_crossings({0, 0, 20}, normalized(Vec3{0.01, 0.02, -1})) % 2, 0u);
}
