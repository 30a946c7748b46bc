#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "wmark/attacks.hpp"
#include "wmark/emboss.hpp"
#include "wmark/placement.hpp"
#include "wmark/topology.hpp"

using namespace wmark;

namespace {

// Voxel volume of a convex closed mesh intersected with a half-space; a voxel
// centre is inside when it is behind every face plane.
double convex_voxel_volume(const Mesh& m, const Vec3& n, double offset, int res) {
    const Aabb b = m.bounds();
    const Vec3 e = b.extent();
    const double hx = e.x / res, hy = e.y / res, hz = e.z / res;
    long count = 0;
    for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j)
            for (int k = 0; k < res; ++k) {
                const Vec3 p{b.lo.x + (i + 0.5) * hx, b.lo.y + (j + 0.5) * hy, b.lo.z + (k + 0.5) * hz};
                if (dot(p, n) > offset) continue;
                bool in = true;
                for (std::size_t f = 0; f < m.face_count() && in; ++f)
                    in = dot(p - m.triangle(f)[0], m.face_normals()[f]) <= 0.0;
                count += in;
            }
    return static_cast<double>(count) * hx * hy * hz;
}

PlacedWatermark place(const std::string& text, const BoxGeom& at) {
    const Mesh glyph = text_to_3d({text, 4.0, 0.5});
    const BoxGeom tmpl = oriented_bounding_box(glyph);
    BoxGeom pose = at;
    pose.half_extents = tmpl.half_extents;
    return {pose_mesh(glyph, tmpl, pose), pose};
}

std::set<std::size_t> watermark_ids(std::span<const std::string> labels) {
    std::set<std::size_t> s;
    for (const auto& l : labels)
        if (auto i = parse_watermark_label(l)) s.insert(i->index);
    return s;
}

FuseResult embossed_slab() {
    BoxGeom a, b;
    a.center = {-6, 0, 0};
    b.center = {6, 0, 0};
    const std::vector<PlacedWatermark> wms{place("AB", a), place("CD", b)};
    return curve_matching_fuse(fixtures::slab(), wms, 0.05);
}

}  // namespace

TEST(Crop, VolumeBelowPlaneOnCube) {
    const Mesh cube = fixtures::unit_cube();
    EXPECT_NEAR(volume_below_plane(cube, {{0.1, 0, 0}, {1, 0, 0}}), 0.6, 1e-12);
    EXPECT_NEAR(volume_below_plane(cube, {{0, 0, 0}, {1, 1, 1}}), 0.5, 1e-12);
    EXPECT_NEAR(volume_below_plane(cube, {{0, 0, 9}, {0, 0, 1}}), 1.0, 1e-12);
}

TEST(Crop, HalfSphereMatchesVoxelOracle) {
    const Mesh sphere = fixtures::icosphere(8, 10.0);
    const AttackResult r = crop_attack(sphere, {}, {{0, 0, 0}, {1, 0, 0}});
    EXPECT_EQ(boundary_edge_count(r.mesh), 0u);
    EXPECT_TRUE(r.warnings.empty());
    for (const auto& v : r.mesh.vertices()) EXPECT_LE(v.x, 1e-6);
    const double ref = convex_voxel_volume(sphere, {1, 0, 0}, 0.0, 80);
    EXPECT_NEAR(r.mesh.signed_volume(), ref, 0.01 * ref);
    // the boolean engine shifts the cutter by ~1e-7, so compare relatively
    EXPECT_NEAR(r.mesh.signed_volume(), 0.5 * sphere.signed_volume(), 1e-6 * sphere.signed_volume());
    EXPECT_LE(r.mesh.signed_volume(), sphere.signed_volume());
    for (const auto& l : r.labels) EXPECT_EQ(l, "target");
}

TEST(Crop, MissingPlaneLeavesMeshAlone) {
    const Mesh sphere = fixtures::icosphere(4, 10.0);
    const AttackResult r = crop_attack(sphere, {}, {{20, 0, 0}, {1, 0, 0}});
    EXPECT_EQ(r.mesh.face_count(), sphere.face_count());
    EXPECT_EQ(r.warnings.size(), 1u);
    EXPECT_THROW(crop_attack(sphere, {}, {{-20, 0, 0}, {1, 0, 0}}), GeometryError);
    EXPECT_THROW(crop_attack(sphere, {}, {{0, 0, 0}, {0, 0, 0}}), ConfigError);
}

TEST(Crop, CutSideWatermarksDisappear) {
    const FuseResult e = embossed_slab();
    ASSERT_EQ(e.fused.size(), 2u);
    EXPECT_EQ(watermark_ids(e.labels).size(), 2u);
    const AttackResult r = crop_attack(e.mesh, e.labels, {{0, 0, 0}, {1, 0, 0}});
    EXPECT_EQ(boundary_edge_count(r.mesh), 0u);
    EXPECT_EQ(watermark_ids(r.labels), std::set<std::size_t>{0});
    EXPECT_LT(r.mesh.signed_volume(), e.mesh.signed_volume());
}

TEST(Crop, FractionHitsRequestedVolume) {
    const Mesh sphere = fixtures::icosphere(8, 10.0);
    for (double frac : {0.5, 0.3, 0.8}) {
        const AttackResult r = crop_fraction_attack(sphere, {}, frac, {0, 1, 0});
        EXPECT_NEAR(r.mesh.signed_volume() / sphere.signed_volume(), frac, 0.01) << frac;
        EXPECT_EQ(boundary_edge_count(r.mesh), 0u);
    }
    const double ref = convex_voxel_volume(sphere, {1, 0, 0}, 0.0, 60);
    EXPECT_NEAR(crop_fraction_attack(sphere, {}, 0.5).mesh.signed_volume(), ref, 0.01 * ref);
    EXPECT_THROW(crop_fraction_attack(sphere, {}, 0.0), ConfigError);
    EXPECT_THROW(crop_fraction_attack(sphere, {}, 1.5), ConfigError);
}

TEST(Removal, OpensSilhouettesAndKeepsTarget) {
    const FuseResult e = embossed_slab();
    const AttackResult r = removal_attack(e.mesh, e.labels);
    EXPECT_GT(boundary_edge_count(r.mesh), 0u);
    const auto targets = std::count(e.labels.begin(), e.labels.end(), std::string("target"));
    EXPECT_EQ(static_cast<long>(r.mesh.face_count()), targets);
    for (const auto& l : r.labels) EXPECT_EQ(l, "target");
    // the counters of A and B become islands
    EXPECT_GT(connected_components(r.mesh).count, connected_components(e.mesh).count);
}

TEST(Removal, NeedsWatermarkFaces) {
    const Mesh s = fixtures::icosphere(3);
    const std::vector<std::string> labels(s.face_count(), "target");
    EXPECT_THROW(removal_attack(s, labels), GeometryError);
    EXPECT_THROW(removal_attack(s, std::vector<std::string>{}), SidecarError);
}

TEST(Attacks, Deterministic) {
    const FuseResult e = embossed_slab();
    const auto a = crop_fraction_attack(e.mesh, e.labels, 0.6), b = crop_fraction_attack(e.mesh, e.labels, 0.6);
    EXPECT_EQ(write_obj(a.mesh), write_obj(b.mesh));
    EXPECT_EQ(a.labels, b.labels);
}
