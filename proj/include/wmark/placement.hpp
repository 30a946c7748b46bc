#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "wmark/glyph.hpp"
#include "wmark/mesh.hpp"
#include "wmark/spatial_index.hpp"

namespace wmark {

/// Rotation angles (radians, applied X then Y then Z) followed by a translation.
struct RigidParams {
    double alpha = 0.0, beta = 0.0, gamma = 0.0;
    double tx = 0.0, ty = 0.0, tz = 0.0;

    std::array<double, 6> as_array() const { return {alpha, beta, gamma, tx, ty, tz}; }
    static RigidParams from_array(const std::array<double, 6>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5]};
    }
    Mat3 rotation() const { return rotation_z(gamma) * rotation_y(beta) * rotation_x(alpha); }
    Vec3 translation() const { return {tx, ty, tz}; }
};

/// One watermark placeholder. `base` is the pose produced by initialization;
/// `params` are optimized on top of it and `geom` is the resulting pose.
struct CandidateBox {
    BoxGeom base;
    RigidParams params;
    BoxGeom geom;
    double loss = std::numeric_limits<double>::infinity();
    double initial_loss = std::numeric_limits<double>::infinity();
    std::size_t steps = 0;
    SurfacePoint anchor;
    std::uint32_t id = 0;

    std::array<Vec3, 8> base_vertices() const { return base.corners(); }
};

struct OptimizerOptions {
    std::size_t max_steps = 200;
    double stop_mean_loss = 0.005;
    double learning_rate = 0.05;
    std::size_t probe_count = 179;
};

/// Rotation taking +Z onto `normal` (minimal axis-angle; a half turn about X
/// when `normal` is antipodal to +Z).
Mat3 align_z_to(const Vec3& normal);

/// Pose of `base` after the rigid parameters: translate by t, then rotate about
/// the translated centroid.
BoxGeom apply_params(const BoxGeom& base, const RigidParams& params);

/// Samples `sample_count` surface points, keeps those at least `min_spacing`
/// away from every previously kept point, and seats a copy of `box_template`
/// on each with its front facing along the surface normal.
std::vector<CandidateBox> init_candidates(const Mesh& mesh, const BoxGeom& box_template, std::size_t sample_count,
                                          double min_spacing, std::uint64_t seed);

/// The eight corners after applying the candidate's parameters to its base corners.
std::array<Vec3, 8> transform_vertices(const CandidateBox& candidate);

/// Probe points on the mid-plane loop through the four lateral-face centers.
std::vector<Vec3> sample_probe_points(const BoxGeom& geom, std::size_t count);

/// Mean squared point-to-surface distance.
double alignment_loss(std::span<const Vec3> points, const SpatialIndex& index);

/// Analytic gradient of the alignment loss with respect to
/// (alpha, beta, gamma, tx, ty, tz), holding each probe's closest point fixed.
std::array<double, 6> loss_gradient(const CandidateBox& candidate, const SpatialIndex& index,
                                    std::size_t probe_count = 179);

/// Loss and gradient in one pass.
double loss_and_gradient(const CandidateBox& candidate, const SpatialIndex& index, std::size_t probe_count,
                         std::array<double, 6>* gradient);

/// Independent fixed-step gradient descent per candidate. Each candidate stops
/// once its loss drops below `stop_mean_loss`; the best iterate is kept.
std::vector<CandidateBox> optimize(std::vector<CandidateBox> candidates, const SpatialIndex& index,
                                   const OptimizerOptions& opts);

/// Box pose plus the rigid map from the glyph template frame into the world.
inline Mesh pose_mesh(const Mesh& template_mesh, const BoxGeom& template_box, const BoxGeom& pose) {
    const Mat3 r = pose.rotation * template_box.rotation.transposed();
    return template_mesh.transformed(r, pose.center - r * template_box.center);
}

}  // namespace wmark
