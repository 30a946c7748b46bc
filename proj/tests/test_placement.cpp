#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "wmark/placement.hpp"

using namespace wmark;

namespace {

BoxGeom watermark_box() { return oriented_bounding_box(text_to_3d({"WATERMARK", 4.0, 0.5})); }

CandidateBox candidate_at(const BoxGeom& base) {
    CandidateBox c;
    c.base = base;
    c.geom = base;
    return c;
}

double loss_at(const CandidateBox& c, const SpatialIndex& idx, std::size_t j = 179) {
    CandidateBox tmp = c;
    tmp.geom = apply_params(c.base, c.params);
    return alignment_loss(sample_probe_points(tmp.geom, j), idx);
}

}  // namespace

TEST(Init, SphereSpacingAndNormals) {
    const Mesh sphere = fixtures::icosphere(16);
    const auto cands = init_candidates(sphere, watermark_box(), 300, 1.0, 42);
    ASSERT_FALSE(cands.empty());
    for (std::size_t i = 0; i < cands.size(); ++i) {
        EXPECT_LE(distance(cands[i].geom.front_normal(), cands[i].anchor.normal), 1e-6);
        EXPECT_NEAR(cands[i].geom.rotation.determinant(), 1.0, 1e-12);
        EXPECT_LE(distance(cands[i].geom.center, cands[i].anchor.position), 1e-12);
        for (std::size_t j = i + 1; j < cands.size(); ++j)
            EXPECT_GE(distance(cands[i].anchor.position, cands[j].anchor.position), 1.0);
    }
}

TEST(Init, ZeroSurvivorsAndBadArgs) {
    const Mesh sphere = fixtures::icosphere(4);
    EXPECT_THROW(init_candidates(sphere, watermark_box(), 0, 1.0, 1), ConfigError);
    EXPECT_THROW(init_candidates(sphere, watermark_box(), 10, 0.0, 1), ConfigError);
}

TEST(Align, UpIsIdentity) {
    const Mat3 r = align_z_to({0, 0, 1});
    for (int i = 0; i < 9; ++i) EXPECT_NEAR(r.m[static_cast<std::size_t>(i)], Mat3::identity().m[static_cast<std::size_t>(i)], 1e-15);
}

TEST(Align, AntipodalFacesDown) {
    const Mat3 r = align_z_to({0, 0, -1});
    EXPECT_LE(distance(r * Vec3{0, 0, 1}, {0, 0, -1}), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    EXPECT_LE(distance(r * Vec3{1, 0, 0}, {1, 0, 0}), 1e-12);  // half turn about X
}

TEST(Align, RandomNormals) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int i = 0; i < 200; ++i) {
        const Vec3 n = normalized(Vec3{g(rng), g(rng), g(rng)});
        const Mat3 r = align_z_to(n);
        EXPECT_LE(distance(r * Vec3{0, 0, 1}, n), 1e-12);
        EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    }
}

TEST(Transform, ZeroParamsIsIdentity) {
    BoxGeom b = watermark_box();
    b.center = {1, 2, 3};
    const CandidateBox c = candidate_at(b);
    const auto v = transform_vertices(c);
    const auto base = c.base_vertices();
    for (int i = 0; i < 8; ++i) EXPECT_EQ(v[i], base[i]);
}

TEST(Transform, TranslationShiftsCentroid) {
    CandidateBox c = candidate_at(watermark_box());
    c.params.tx = 1.0;
    Vec3 centroid;
    for (const auto& p : transform_vertices(c)) centroid += p / 8.0;
    EXPECT_LE(distance(centroid, {1, 0, 0}), 1e-12);
}

TEST(Transform, RotationIsRigid) {
    BoxGeom b = watermark_box();
    b.center = {3, -1, 2};
    CandidateBox c = candidate_at(b);
    c.params.gamma = M_PI / 2;
    const auto v = transform_vertices(c);
    const auto base = c.base_vertices();
    Vec3 centroid;
    for (const auto& p : v) centroid += p / 8.0;
    EXPECT_LE(distance(centroid, b.center), 1e-12);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) EXPECT_NEAR(distance(v[i], v[j]), distance(base[i], base[j]), 1e-9);
}

TEST(Transform, MatchesApplyParams) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 50; ++k) {
        BoxGeom b = watermark_box();
        b.center = {u(rng) * 5, u(rng) * 5, u(rng) * 5};
        b.rotation = align_z_to(normalized(Vec3{u(rng), u(rng), u(rng)}));
        CandidateBox c = candidate_at(b);
        c.params = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
        const auto v = transform_vertices(c);
        const auto g = apply_params(b, c.params).corners();
        for (int i = 0; i < 8; ++i) EXPECT_LE(distance(v[i], g[i]), 1e-9);
        EXPECT_NEAR(c.params.rotation().determinant(), 1.0, 1e-12);
    }
}

TEST(Probes, FourAreLateralFaceCenters) {
    BoxGeom cube;
    cube.half_extents = {0.5, 0.5, 0.5};
    const auto p = sample_probe_points(cube, 4);
    ASSERT_EQ(p.size(), 4u);
    const std::array<Vec3, 4> expected{Vec3{-0.5, -0.5, 0}, {0.5, -0.5, 0}, {0.5, 0.5, 0}, {-0.5, 0.5, 0}};
    for (int i = 0; i < 4; ++i) EXPECT_LE(distance(p[i], expected[i]), 1e-15);
}

TEST(Probes, CountAndMidPlane) {
    BoxGeom g = watermark_box();
    g.center = {1, 2, 3};
    g.rotation = align_z_to(normalized(Vec3{1, -1, 2}));
    const auto p = sample_probe_points(g, 179);
    ASSERT_EQ(p.size(), 179u);
    const Vec3 n = g.front_normal();
    for (const auto& q : p) {
        const double front = dot(g.center + n * g.half_extents.z - q, n);
        const double back = dot(q - (g.center - n * g.half_extents.z), n);
        EXPECT_NEAR(front, back, 1e-9);
    }
    // equidistant within the long segment
    EXPECT_NEAR(distance(p[0], p[1]), distance(p[1], p[2]), 1e-12);
}

TEST(Probes, TooFewIsError) { EXPECT_THROW(sample_probe_points(watermark_box(), 3), ConfigError); }

TEST(Loss, BisectedBoxIsZero) {
    const SpatialIndex idx(fixtures::plane_patch());
    EXPECT_NEAR(alignment_loss(sample_probe_points(watermark_box(), 179), idx), 0.0, 1e-24);
}

TEST(Loss, OffsetBoxIsSquaredHeight) {
    const SpatialIndex idx(fixtures::plane_patch());
    BoxGeom g = watermark_box();
    g.center = {0, 0, 0.7};
    EXPECT_NEAR(alignment_loss(sample_probe_points(g, 179), idx), 0.49, 1e-12);
}

TEST(Loss, MatchesBruteForce) {
    const Mesh m = fixtures::icosphere(5);
    const SpatialIndex idx(m);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 20; ++k) {
        BoxGeom g = watermark_box();
        g.center = Vec3{u(rng), u(rng), u(rng)} * 12.0;
        g.rotation = align_z_to(normalized(Vec3{u(rng), u(rng), u(rng)}));
        const auto p = sample_probe_points(g, 179);
        double ref = 0.0;
        for (const auto& q : p) ref += std::pow(oracle::mesh_distance(m, q), 2);
        EXPECT_NEAR(alignment_loss(p, idx), ref / 179.0, 1e-9);
    }
}

TEST(Gradient, AlignedIsZero) {
    const SpatialIndex idx(fixtures::plane_patch());
    const auto g = loss_gradient(candidate_at(watermark_box()), idx);
    double n2 = 0.0;
    for (double v : g) n2 += v * v;
    EXPECT_LT(std::sqrt(n2), 1e-9);
}

TEST(Gradient, OffsetPlaneAnalytic) {
    const SpatialIndex idx(fixtures::plane_patch());
    BoxGeom b = watermark_box();
    b.center = {0, 0, 0.3};
    const auto g = loss_gradient(candidate_at(b), idx);
    EXPECT_NEAR(g[5], 0.6, 1e-12);
    EXPECT_NEAR(g[3], 0.0, 1e-12);
    EXPECT_NEAR(g[4], 0.0, 1e-12);
}

TEST(Gradient, MatchesFiniteDifferences) {
    const std::array<Mesh, 3> meshes{fixtures::plane_patch(), fixtures::icosphere(8), fixtures::box({-6, -6, -6}, {6, 6, 6})};
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1, 1);
    const double h = 1e-5;
    int checked = 0;
    for (const Mesh& m : meshes) {
        const SpatialIndex idx(m);
        const auto seeds = init_candidates(m, watermark_box(), 40, 0.5, 7);
        for (std::size_t k = 0; k < seeds.size() && k < 34; ++k) {
            CandidateBox c = seeds[k];
            c.params = {0.3 * u(rng), 0.3 * u(rng), 0.3 * u(rng), 0.4 * u(rng), 0.4 * u(rng), 0.4 * u(rng)};
            const auto g = loss_gradient(c, idx);
            for (std::size_t i = 0; i < 6; ++i) {
                auto plus = c, minus = c;
                auto a = c.params.as_array();
                a[i] += h;
                plus.params = RigidParams::from_array(a);
                a[i] -= 2 * h;
                minus.params = RigidParams::from_array(a);
                const double fd = (loss_at(plus, idx) - loss_at(minus, idx)) / (2 * h);
                EXPECT_LT(std::abs(g[i] - fd) / std::max(std::abs(fd), 1e-6), 1e-4)
                    << "component " << i << " analytic " << g[i] << " fd " << fd;
            }
            ++checked;
        }
    }
    EXPECT_GE(checked, 100);
}

TEST(Optimize, TiltedBoxOnPlaneConverges) {
    const SpatialIndex idx(fixtures::plane_patch());
    CandidateBox c = candidate_at(watermark_box());
    c.base.rotation = rotation_x(20.0 * M_PI / 180.0);
    c.base.center = {0, 0, 0.3};
    const auto out = optimize({c}, idx, OptimizerOptions{});
    EXPECT_LT(out[0].loss, 0.005);
    EXPECT_LE(out[0].steps, 200u);
    EXPECT_LE(out[0].loss, out[0].initial_loss + 1e-12);
}

TEST(Optimize, AlignedBoxReturnsImmediately) {
    const SpatialIndex idx(fixtures::plane_patch());
    const auto out = optimize({candidate_at(watermark_box())}, idx, OptimizerOptions{});
    EXPECT_LE(out[0].steps, 1u);
    EXPECT_LE(distance(out[0].geom.center, watermark_box().center), 1e-6);
}

TEST(Optimize, SphereImprovesOnAverage) {
    const Mesh sphere = fixtures::icosphere(16);
    const SpatialIndex idx(sphere);
    auto cands = init_candidates(sphere, watermark_box(), 300, 1.0, 42);
    cands.resize(std::min<std::size_t>(cands.size(), 50));
    // start from a perturbed pose so there is something to improve
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (auto& c : cands) c.params = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    const auto out = optimize(cands, idx, OptimizerOptions{});
    double before = 0.0, after = 0.0;
    for (const auto& c : out) {
        before += c.initial_loss;
        after += c.loss;
        EXPECT_LE(c.loss, c.initial_loss);
    }
    EXPECT_LT(after, before);
}

TEST(Optimize, Deterministic) {
    const Mesh sphere = fixtures::icosphere(8);
    const SpatialIndex idx(sphere);
    auto cands = init_candidates(sphere, watermark_box(), 30, 1.0, 3);
    for (auto& c : cands) c.params.tz = 0.2;
    const auto a = optimize(cands, idx, {}), b = optimize(cands, idx, {});
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].params.as_array(), b[i].params.as_array());
}

TEST(Optimize, RejectsBadOptions) {
    const SpatialIndex idx(fixtures::plane_patch());
    OptimizerOptions o;
    o.learning_rate = 0.0;
    EXPECT_THROW(optimize({candidate_at(watermark_box())}, idx, o), ConfigError);
}
