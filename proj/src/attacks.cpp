#include "wmark/attacks.hpp"

#include <algorithm>
#include <cmath>

#include "wmark/csg.hpp"
#include "wmark/emboss.hpp"
#include "wmark/glyph.hpp"
#include "wmark/topology.hpp"

namespace wmark {

namespace {

std::vector<std::string> default_labels(const Mesh& m, std::span<const std::string> labels) {
    if (labels.empty()) return std::vector<std::string>(m.face_count(), "target");
    if (labels.size() != m.face_count()) throw SidecarError("label count does not match faces");
    return {labels.begin(), labels.end()};
}

// Triangle mesh of a box, outward.
Mesh box_mesh(const BoxGeom& g) {
    const auto c = g.corners();  // front t1..t4 ccw, then back b1..b4
    std::vector<Vec3> v(c.begin(), c.end());
    std::vector<Face> f{{0, 1, 2}, {0, 2, 3}, {4, 6, 5}, {4, 7, 6}, {0, 4, 5}, {0, 5, 1},
                        {1, 5, 6}, {1, 6, 2}, {2, 6, 7}, {2, 7, 3}, {3, 7, 4}, {3, 4, 0}};
    return Mesh(std::move(v), std::move(f));
}

}  // namespace

double volume_below_plane(const Mesh& mesh, const Plane& plane) {
    const Vec3 n = normalized(plane.normal);
    // divergence theorem with the apex on the plane: the cap adds nothing
    double vol = 0.0;
    const Vec3 o = plane.point;
    auto tet = [&](const Vec3& a, const Vec3& b, const Vec3& c) { vol += dot(a - o, cross(b - o, c - o)) / 6.0; };
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const auto t = mesh.triangle(f);
        std::array<double, 3> s{};
        for (std::size_t i = 0; i < 3; ++i) s[i] = dot(t[i] - o, n);
        std::vector<Vec3> poly;
        for (std::size_t i = 0; i < 3; ++i) {
            const std::size_t j = (i + 1) % 3;
            if (s[i] <= 0) poly.push_back(t[i]);
            if ((s[i] < 0 && s[j] > 0) || (s[i] > 0 && s[j] < 0))
                poly.push_back(t[i] + (t[j] - t[i]) * (s[i] / (s[i] - s[j])));
        }
        for (std::size_t k = 1; k + 1 < poly.size(); ++k) tet(poly[0], poly[k], poly[k + 1]);
    }
    return vol;
}

AttackResult crop_attack(const Mesh& mesh, std::span<const std::string> labels, const Plane& plane) {
    if (mesh.empty()) throw EmptyMeshError();
    const Vec3 n = normalized(plane.normal);
    if (squared_norm(n) == 0.0) throw ConfigError("crop plane normal is zero");
    AttackResult r;
    r.plane = {plane.point, n};
    auto lab = default_labels(mesh, labels);
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    for (const auto& v : mesh.vertices()) {
        const double s = dot(v - plane.point, n);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    if (hi <= 0.0) {
        r.mesh = mesh;
        r.labels = std::move(lab);
        r.warnings.push_back("crop plane misses the mesh; nothing removed");
        return r;
    }
    if (lo >= 0.0) throw GeometryError("crop plane removes the whole mesh");

    const Aabb b = mesh.bounds();
    const double big = 2.0 * norm(b.extent()) + norm(b.center() - plane.point) + 1.0;
    const Vec3 helper = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    const Vec3 e1 = normalized(cross(helper, n)), e2 = cross(n, e1);
    BoxGeom cutter;
    cutter.rotation = Mat3::from_columns(e1, e2, n);
    cutter.half_extents = {big, big, big};
    cutter.center = plane.point + n * big;
    const Mesh cut = box_mesh(cutter);
    const std::vector<std::string> cap(cut.face_count(), "target");
    CsgResult res = boolean_op(mesh, cut, BoolOp::Difference, lab, cap);
    if (res.boundary_edge_count != 0)
        r.warnings.push_back("cropped mesh has " + std::to_string(res.boundary_edge_count) + " boundary edges");
    r.mesh = std::move(res.mesh);
    r.labels = std::move(res.provenance_labels);
    return r;
}

AttackResult crop_fraction_attack(const Mesh& mesh, std::span<const std::string> labels, double fraction,
                                  const Vec3& axis) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("crop fraction must be in (0, 1]");
    const Vec3 n = normalized(axis);
    if (squared_norm(n) == 0.0) throw ConfigError("crop axis is zero");
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    for (const auto& v : mesh.vertices()) {
        lo = std::min(lo, dot(v, n));
        hi = std::max(hi, dot(v, n));
    }
    if (fraction == 1.0) return crop_attack(mesh, labels, {n * (hi + 1.0), n});
    const double total = mesh.signed_volume();
    if (!(total > 0.0)) throw GeometryError("mesh has no positive volume");
    const double goal = fraction * total;
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double v = volume_below_plane(mesh, {n * mid, n});
        if (std::abs(v - goal) <= 1e-4 * total) {
            a = b = mid;
            break;
        }
        (v < goal ? a : b) = mid;
    }
    return crop_attack(mesh, labels, {n * (0.5 * (a + b)), n});
}

AttackResult removal_attack(const Mesh& mesh, std::span<const std::string> labels) {
    if (labels.size() != mesh.face_count()) throw SidecarError("label count does not match faces");
    std::vector<Face> faces;
    AttackResult r;
    std::size_t removed = 0;
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        if (is_watermark_label(labels[f])) {
            ++removed;
            continue;
        }
        faces.push_back(mesh.face(f));
        r.labels.push_back(labels[f]);
    }
    if (removed == 0) throw GeometryError("no watermark faces to remove");
    if (faces.empty()) throw GeometryError("removal would delete the whole mesh");
    r.mesh = remove_unreferenced_vertices(Mesh(std::vector<Vec3>(mesh.vertices().begin(), mesh.vertices().end()), faces));
    return r;
}

}  // namespace wmark
