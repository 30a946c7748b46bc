#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wmark/mesh.hpp"

namespace wmark {

enum class BoolOp { Union, Intersection, Difference };

struct FaceOrigin {
    std::uint8_t operand = 0;  // 0 for the first mesh, 1 for the second
    std::uint32_t face = 0;    // face index in that operand
};

struct CsgResult {
    Mesh mesh;
    std::size_t boundary_edge_count = 0;
    std::vector<std::string> provenance_labels;  // per output face
    std::vector<FaceOrigin> origins;             // per output face
};

/// Both operands split along their intersection curve, sharing one vertex
/// array: a's vertices, then b's (moved by the perturbation), then the
/// intersection points.
struct Arrangement {
    std::vector<Vec3> vertices;
    std::array<std::vector<Face>, 2> faces;
    std::array<std::vector<std::uint32_t>, 2> source;  // originating face per piece
    std::array<std::vector<std::uint8_t>, 2> inside;   // piece lies inside the other operand
    std::size_t curve_edges = 0;
};

/// Splits both closed meshes along their intersection and classifies every
/// piece by ray parity against the other operand (three rays, majority vote).
/// `b` is translated by `perturbation` first so that coplanar contacts become
/// general-position crossings. Throws CsgError on an inconsistent arrangement.
Arrangement build_arrangement(const Mesh& a, const Mesh& b, const Vec3& perturbation, bool classify_b = true);

/// Boolean of two closed, outward-oriented meshes. Labels default to "a"/"b".
CsgResult boolean_op(const Mesh& a, const Mesh& b, BoolOp op, std::span<const std::string> labels_a = {},
                     std::span<const std::string> labels_b = {});

/// Perturbations tried in order by boolean_op when an attempt fails.
std::span<const Vec3> csg_perturbations();

/// True when a ray from p crosses `mesh` an odd number of times for at least
/// two of three fixed directions.
class SpatialIndex;
bool inside_by_parity(const SpatialIndex& index, const Vec3& p);

}  // namespace wmark
