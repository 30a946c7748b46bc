#pragma once

#include <span>
#include <string>
#include <vector>

#include "wmark/mesh.hpp"

namespace wmark {

struct Plane {
    Vec3 point;
    Vec3 normal;  // the side this normal points to is cut away
};

struct AttackResult {
    Mesh mesh;
    std::vector<std::string> labels;  // per face; cap faces are "target"
    std::vector<std::string> warnings;
    Plane plane;  // crop plane actually used
};

/// Removes the part of a closed mesh on the +normal side of the plane (boolean
/// difference with a large box). A plane that misses the mesh returns it
/// unchanged with a warning; one that removes everything throws.
AttackResult crop_attack(const Mesh& mesh, std::span<const std::string> labels, const Plane& plane);

/// Volume of the part of a closed mesh on the -normal side of the plane.
double volume_below_plane(const Mesh& mesh, const Plane& plane);

/// Crop keeping `fraction` of the volume, cutting perpendicular to `axis`
/// (the +axis side is removed). The plane offset is bisected on the exact
/// clipped volume until it is within 1e-4 relative of the goal.
AttackResult crop_fraction_attack(const Mesh& mesh, std::span<const std::string> labels, double fraction,
                                  const Vec3& axis = {1, 0, 0});

/// Deletes every watermark-labelled face and the vertices only they used.
AttackResult removal_attack(const Mesh& mesh, std::span<const std::string> labels);

}  // namespace wmark
