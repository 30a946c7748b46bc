#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "wmark/mesh.hpp"

namespace wmark {

struct ClosestHit {
    double distance = std::numeric_limits<double>::infinity();
    Vec3 point;
    std::uint32_t face_index = 0;
};

struct RayHit {
    double t = 0.0;
    std::uint32_t face_index = 0;
};

/// Closest point to `p` on triangle (a, b, c), by Voronoi-region case analysis.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Moller-Trumbore; returns the ray parameter of a hit with t > t_min.
std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                                   const Vec3& c, double t_min);

/// Bounding-volume hierarchy over the faces of a mesh.
///
/// Median split on the longest centroid axis, at most four faces per leaf.
/// The index copies the triangle geometry, so it does not borrow the mesh and
/// every query is safe to run concurrently.
class SpatialIndex {
public:
    static constexpr std::size_t kLeafSize = 4;
    static constexpr double kRayEpsilon = 1e-7;

    struct Node {
        Aabb bounds;
        std::uint32_t first = 0;  // leaf: offset into face order; inner: left child index
        std::uint32_t count = 0;  // leaf: number of faces; inner: 0
        std::uint32_t right = 0;  // inner only
        bool leaf() const { return count > 0; }
    };

    SpatialIndex() = default;
    explicit SpatialIndex(const Mesh& mesh);

    bool empty() const { return tris_.empty(); }
    std::size_t face_count() const { return tris_.size(); }

    ClosestHit closest_point(const Vec3& query) const;

    /// Nearest hit with t_min < t < t_max.
    std::optional<RayHit> ray_intersect(const Vec3& origin, const Vec3& dir,
                                        double t_min = kRayEpsilon,
                                        double t_max = std::numeric_limits<double>::infinity()) const;

    bool any_hit(const Vec3& origin, const Vec3& dir, double t_min = kRayEpsilon,
                 double t_max = std::numeric_limits<double>::infinity()) const;

    /// Number of surface crossings along the ray (for parity inside tests).
    std::size_t count_crossings(const Vec3& origin, const Vec3& dir, double t_min = 0.0) const;

    /// Faces whose bounding box overlaps `box`.
    void faces_overlapping(const Aabb& box, std::vector<std::uint32_t>& out) const;

    std::span<const Node> nodes() const { return nodes_; }
    std::span<const std::uint32_t> face_order() const { return order_; }
    const std::array<Vec3, 3>& triangle(std::uint32_t f) const { return tris_[f]; }

private:
    std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids);

    std::vector<std::array<Vec3, 3>> tris_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
};

inline ClosestHit closest_point(const SpatialIndex& index, const Vec3& query) {
    return index.closest_point(query);
}

inline std::optional<RayHit> ray_intersect(const SpatialIndex& index, const Vec3& origin, const Vec3& dir) {
    return index.ray_intersect(origin, dir);
}

}  // namespace wmark
