#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "wmark/predicates.hpp"

namespace wmark {

using Edge2 = std::array<std::uint32_t, 2>;
using Tri2 = std::array<std::uint32_t, 3>;

/// Constrained Delaunay triangulation of a planar straight-line graph.
///
/// Every constraint appears as a triangulation edge (no Steiner points are
/// added). Triangles reachable from outside the convex hull without crossing a
/// constraint are discarded, so a closed constraint loop yields the
/// triangulation of the region it bounds. Identical input points are merged
/// into their first occurrence. Output triangles are counter-clockwise.
/// Throws CsgError when two constraints cross.
std::vector<Tri2> constrained_triangulation(std::span<const Vec2> points, std::span<const Edge2> constraints);

}  // namespace wmark
