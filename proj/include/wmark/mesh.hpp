#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wmark/error.hpp"
#include "wmark/vec.hpp"

namespace wmark {

using Face = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh with derived per-face and per-vertex quantities.
///
/// Immutable after construction; every constructor validates indices and
/// recomputes normals and areas, so a Mesh value is always self-consistent.
class Mesh {
public:
    Mesh() = default;
    Mesh(std::vector<Vec3> vertices, std::vector<Face> faces);

    std::span<const Vec3> vertices() const { return vertices_; }
    std::span<const Face> faces() const { return faces_; }
    std::span<const Vec3> face_normals() const { return face_normals_; }
    std::span<const double> face_areas() const { return face_areas_; }
    std::span<const Vec3> vertex_normals() const { return vertex_normals_; }

    const Vec3& vertex(std::size_t i) const { return vertices_[i]; }
    const Face& face(std::size_t i) const { return faces_[i]; }
    std::array<Vec3, 3> triangle(std::size_t f) const {
        const Face& t = faces_[f];
        return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
    }

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t face_count() const { return faces_.size(); }
    bool empty() const { return vertices_.empty(); }

    /// True where the vertex star has zero area and the normal is undefined.
    bool vertex_normal_degenerate(std::size_t v) const { return degenerate_normal_[v] != 0; }

    Aabb bounds() const;
    double total_area() const;
    /// Signed volume (divergence theorem); positive for outward-oriented closed meshes.
    double signed_volume() const;
    Vec3 vertex_centroid() const;

    Mesh transformed(const Mat3& rotation, const Vec3& translation) const;
    Mesh scaled_translated(double scale, const Vec3& translation) const;
    /// Same geometry with every face winding reversed.
    Mesh flipped() const;

private:
    std::vector<Vec3> vertices_;
    std::vector<Face> faces_;
    std::vector<Vec3> face_normals_;
    std::vector<double> face_areas_;
    std::vector<Vec3> vertex_normals_;
    std::vector<std::uint8_t> degenerate_normal_;
};

/// Concatenates meshes; vertex indices of later meshes are offset.
Mesh merge(std::span<const Mesh> meshes);

// --- OBJ -----------------------------------------------------------------

/// Parses Wavefront OBJ text. Polygons are fan-triangulated from their first
/// corner; texture and normal references are ignored.
Mesh parse_obj(std::string_view text);
Mesh read_obj_file(const std::string& path);

std::string write_obj(const Mesh& mesh);
void write_obj_file(const Mesh& mesh, const std::string& path);

// --- normalization ---------------------------------------------------------

struct Similarity {
    double scale = 1.0;
    Vec3 translation;  // applied after scaling: x' = scale * x + translation
    Vec3 apply(const Vec3& p) const { return p * scale + translation; }
};

/// Transform that centers the vertex centroid at the origin and scales the
/// largest bounding-box extent to `target_size`.
Similarity normalization_for(const Mesh& mesh, double target_size = 30.0);
Mesh normalize_model(const Mesh& mesh, double target_size = 30.0);

// --- surface sampling ------------------------------------------------------

struct SurfacePoint {
    Vec3 position;
    Vec3 normal;
    std::uint32_t face_index = 0;
};

/// Area-weighted uniform samples on the surface; deterministic for a seed.
std::vector<SurfacePoint> surface_sample(const Mesh& mesh, std::size_t count, std::uint64_t seed);

// --- simplification --------------------------------------------------------

/// Vertex-clustering decimation on a uniform grid, refined until the result
/// has at most `max_vertices` vertices. Returns the input when already small.
Mesh decimate_vertex_clustering(const Mesh& mesh, std::size_t max_vertices);

}  // namespace wmark
