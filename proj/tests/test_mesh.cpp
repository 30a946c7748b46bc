#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "wmark/mesh.hpp"
#include "wmark/topology.hpp"

using namespace wmark;

namespace {

const char* kCubeObj = R"(# unit cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
)";

}  // namespace

TEST(Obj, ParsesUnitCube) {
    const Mesh m = parse_obj(kCubeObj);
    EXPECT_EQ(m.vertex_count(), 8u);
    EXPECT_EQ(m.face_count(), 12u);
    EXPECT_NEAR(m.signed_volume(), 1.0, 1e-12);
    EXPECT_EQ(boundary_edge_count(m), 0u);
}

TEST(Obj, QuadIsFanTriangulated) {
    const Mesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    ASSERT_EQ(m.face_count(), 2u);
    EXPECT_EQ(m.face(0), (Face{0, 1, 2}));
    EXPECT_EQ(m.face(1), (Face{0, 2, 3}));
}

TEST(Obj, SlashSuffixesAndNegativeIndices) {
    const Mesh m = parse_obj("v 0 0 0\r\nv 1 0 0\r\nv 0 1 0\r\nvt 0 0\r\nvn 0 0 1\r\ng grp\r\ns off\r\nusemtl x\r\n"
                             "f 1/1/1 2/1/1 3//1\r\nf -3 -2 -1\r\n");
    ASSERT_EQ(m.face_count(), 2u);
    EXPECT_EQ(m.face(1), (Face{0, 1, 2}));
}

TEST(Obj, CommentsOnlyIsEmptyMeshError) {
    EXPECT_THROW(parse_obj("# nothing\n# here\n"), EmptyMeshError);
}

TEST(Obj, MalformedLineReportsLineNumber) {
    try {
        parse_obj("v 0 0 0\nv 1 0 0\nv 0 x 1\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Obj, IndexOutOfRangeIsStructuralError) {
    EXPECT_THROW(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 7\n"), StructureError);
}

TEST(Obj, WriteCubeCountsLines) {
    const std::string text = write_obj(parse_obj(kCubeObj));
    std::size_t v = 0, f = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto end = text.find('\n', pos);
        const std::string line = text.substr(pos, end - pos);
        if (line.rfind("v ", 0) == 0) ++v;
        if (line.rfind("f ", 0) == 0) ++f;
        pos = end == std::string::npos ? text.size() : end + 1;
    }
    EXPECT_EQ(v, 8u);
    EXPECT_EQ(f, 12u);
}

TEST(Obj, RefusesEmptyMesh) { EXPECT_THROW(write_obj(Mesh{}), EmptyMeshError); }

TEST(Obj, RandomRoundTrip) {
    const Mesh m = fixtures::random_soup(100, 7);
    const Mesh r = parse_obj(write_obj(m));
    ASSERT_EQ(r.vertex_count(), m.vertex_count());
    ASSERT_EQ(r.face_count(), m.face_count());
    for (std::size_t i = 0; i < m.vertex_count(); ++i) EXPECT_LE(distance(r.vertex(i), m.vertex(i)), 1e-6);
    for (std::size_t f = 0; f < m.face_count(); ++f) EXPECT_EQ(r.face(f), m.face(f));
}

TEST(MeshInvariants, AreasAndNormals) {
    const Mesh m = fixtures::icosphere(4);
    for (std::size_t f = 0; f < m.face_count(); ++f) {
        const auto t = m.triangle(f);
        EXPECT_NEAR(m.face_areas()[f], 0.5 * norm(cross(t[1] - t[0], t[2] - t[0])), 1e-12);
        EXPECT_NEAR(norm(m.face_normals()[f]), 1.0, 1e-12);
    }
    for (std::size_t v = 0; v < m.vertex_count(); ++v) EXPECT_NEAR(norm(m.vertex_normals()[v]), 1.0, 1e-12);
}

TEST(MeshInvariants, IsolatedVertexHasFlaggedZeroNormal) {
    const Mesh m({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 5, 5}}, {{0, 1, 2}});
    EXPECT_TRUE(m.vertex_normal_degenerate(3));
    EXPECT_EQ(m.vertex_normals()[3], Vec3{});
    EXPECT_FALSE(m.vertex_normal_degenerate(0));
}

TEST(Normalize, UnitCubeScaledTo30) {
    const Mesh m = normalize_model(parse_obj(kCubeObj), 30.0);
    const Aabb b = m.bounds();
    EXPECT_NEAR(b.extent().x, 30.0, 1e-12);
    EXPECT_NEAR(b.extent().y, 30.0, 1e-12);
    const Vec3 c = m.vertex_centroid();
    EXPECT_NEAR(norm(c), 0.0, 1e-12);
}

TEST(Normalize, Idempotent) {
    const Mesh a = normalize_model(fixtures::torus(), 30.0);
    const Mesh b = normalize_model(a, 30.0);
    for (std::size_t i = 0; i < a.vertex_count(); ++i) EXPECT_LE(distance(a.vertex(i), b.vertex(i)), 1e-9);
}

TEST(Normalize, CollinearMeshStillScalesLongestExtent) {
    const Mesh line({{0, 0, 0}, {1, 1, 0}, {3, 3, 0}}, {{0, 1, 2}});
    const Mesh m = normalize_model(line, 30.0);
    const Vec3 e = m.bounds().extent();
    EXPECT_NEAR(std::max({e.x, e.y, e.z}), 30.0, 1e-12);
}

TEST(Normalize, ZeroExtentIsError) {
    const Mesh dot({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}, {{0, 1, 2}});
    EXPECT_THROW(normalize_model(dot, 30.0), GeometryError);
}

TEST(Sampling, UnitSquareMean) {
    const Mesh sq({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}});
    const auto s = surface_sample(sq, 10000, 3);
    Vec3 mean;
    for (const auto& p : s) mean += p.position;
    mean /= static_cast<double>(s.size());
    EXPECT_NEAR(mean.x, 0.5, 0.02);
    EXPECT_NEAR(mean.y, 0.5, 0.02);
    EXPECT_EQ(mean.z, 0.0);
}

TEST(Sampling, ZeroCountIsEmpty) { EXPECT_TRUE(surface_sample(fixtures::unit_cube(), 0, 1).empty()); }

TEST(Sampling, ZeroAreaIsError) {
    const Mesh flat({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 2}});
    EXPECT_THROW(surface_sample(flat, 5, 1), GeometryError);
}

TEST(Sampling, PointsLieOnTheirFace) {
    const Mesh m = fixtures::random_soup(30, 11);
    for (const auto& s : surface_sample(m, 2000, 5)) {
        const auto t = m.triangle(s.face_index);
        // barycentrics from areas
        const Vec3 n = cross(t[1] - t[0], t[2] - t[0]);
        const double a2 = dot(n, n);
        const double u = dot(cross(t[2] - t[1], s.position - t[1]), n) / a2;
        const double v = dot(cross(t[0] - t[2], s.position - t[2]), n) / a2;
        const double w = 1.0 - u - v;
        EXPECT_GE(u, -1e-9);
        EXPECT_GE(v, -1e-9);
        EXPECT_GE(w, -1e-9);
        EXPECT_NEAR(std::abs(dot(s.position - t[0], normalized(n))), 0.0, 1e-9);
        EXPECT_NEAR(dot(s.normal, m.face_normals()[s.face_index]), 1.0, 1e-12);
    }
}

TEST(Sampling, FaceFrequenciesFollowArea) {
    // three triangles with areas 1 : 2 : 5
    const Mesh m({{0, 0, 0}, {1, 0, 0}, {0, 2, 0}, {0, 0, 1}, {2, 0, 1}, {0, 2, 1}, {0, 0, 2}, {5, 0, 2}, {0, 2, 2}},
                 {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}});
    const auto s = surface_sample(m, 10000, 9);
    std::array<double, 3> count{};
    for (const auto& p : s) count[p.face_index] += 1.0;
    const std::array<double, 3> expected{1250.0, 2500.0, 6250.0};
    double chi2 = 0.0;
    for (int i = 0; i < 3; ++i) chi2 += (count[i] - expected[i]) * (count[i] - expected[i]) / expected[i];
    EXPECT_LT(chi2, 13.8);  // 99.9% quantile, 2 dof
}

TEST(Sampling, Deterministic) {
    const Mesh m = fixtures::icosphere(3);
    const auto a = surface_sample(m, 100, 42), b = surface_sample(m, 100, 42);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].position, b[i].position);
}

TEST(Decimation, RespectsCap) {
    const Mesh m = fixtures::icosphere(30);
    const Mesh d = decimate_vertex_clustering(m, 2000);
    EXPECT_LE(d.vertex_count(), 2000u);
    EXPECT_GT(d.face_count(), 100u);
    EXPECT_EQ(decimate_vertex_clustering(d, 100000).vertex_count(), d.vertex_count());
}
