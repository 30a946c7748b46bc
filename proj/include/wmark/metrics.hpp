#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wmark/glyph.hpp"
#include "wmark/mesh.hpp"
#include "wmark/spatial_index.hpp"

namespace wmark {

/// Camera directions: +Y rotated about X and about Z in fixed increments,
/// duplicates removed (22 directions at 30 degrees).
struct ViewSet {
    std::vector<Vec3> directions;
    double increment_deg = 30.0;
};
ViewSet make_views(double increment_deg = 30.0);

inline constexpr double kViewConeDeg = 45.0;
inline constexpr double kRayLift = 1e-4;

/// Ray origins on a box's front face: an n x n grid of cell centres with
/// n = ceil(sqrt(count)), lifted slightly along the front normal.
std::vector<Vec3> front_face_ray_origins(const BoxGeom& box, std::size_t count, double lift = kRayLift);

/// True when no ray from the front face toward `dir` hits the mesh.
bool front_face_unobstructed(const SpatialIndex& index, const BoxGeom& box, const Vec3& dir, std::size_t n_rays);

/// Projected area of the target faces entirely inside the box over the box
/// front-face area, clamped to [0, 1].
double placement_ratio(const Mesh& target, const BoxGeom& box);
double wps(const Mesh& target, std::span<const BoxGeom> boxes);

struct RayVisibility {
    double score = 0.0;
    std::vector<double> per_view;                // mean over candidate watermarks (0 when none)
    std::vector<std::vector<int>> per_watermark;  // [watermark][view]: -1 not facing, 0 blocked, 1 visible
};
RayVisibility ray_visibility_detail(const SpatialIndex& watermarked, std::span<const BoxGeom> boxes,
                                    const ViewSet& views, std::size_t n_rays = 16);
double ray_visibility(const Mesh& watermarked, std::span<const BoxGeom> boxes, const ViewSet& views,
                      std::size_t n_rays = 16);

/// Mean squared distance from surface samples of `watermarked` to `original`.
double smse(const Mesh& original, const Mesh& watermarked, std::size_t n_samples = 100000, std::uint64_t seed = 42);

/// |components(watermarked) - components(original)|.
std::size_t ipe(const Mesh& original, const Mesh& watermarked);

/// Distances from watermark top-face vertices to the original surface,
/// grouped by watermark index.
std::vector<std::pair<std::size_t, std::vector<double>>> top_distances(const Mesh& original, const Mesh& watermarked,
                                                                       std::span<const std::string> labels);
/// Population variance of the pooled top-vertex distances. Throws
/// GeometryError when no face carries a watermark top label.
double lce(const Mesh& original, const Mesh& watermarked, std::span<const std::string> labels);

/// Per-vertex curvature magnitude (|cotangent Laplacian . normal| over the
/// vertex area), Gaussian-smoothed over the 2-ring and divided by its maximum.
/// A flat mesh maps to all zeros.
std::vector<double> saliency_map(const Mesh& mesh);

/// 256-bin Otsu threshold on values in [0, 1]. The cut is placed in the
/// middle of the run of cuts that share the maximal between-class variance.
/// Throws GeometryError with fewer than two distinct values.
double otsu_threshold(std::span<const double> values);

/// Saliency map plus its binarization. A map with less than
/// `kSaliencyMinContrast` spread has no salient vertices.
struct SaliencyField {
    std::vector<double> values;
    std::optional<double> threshold;
    std::vector<std::uint8_t> salient;
};
inline constexpr double kSaliencyMinContrast = 0.2;
SaliencyField compute_saliency(const Mesh& mesh);

/// 1 when more than half of the mesh vertices inside the box are salient;
/// nullopt when the box holds no vertex.
std::optional<int> saliency_vote(const Mesh& mesh, const SaliencyField& field, const BoxGeom& box);

/// Mean vote over boxes (boxes without vertices vote 0). Optional per-box votes.
double saliency_error(const Mesh& original, std::span<const BoxGeom> boxes, std::vector<int>* votes = nullptr,
                      std::vector<std::string>* warnings = nullptr);

struct WatermarkDiagnostics {
    double placement_ratio = 0.0;
    std::vector<int> visibility;  // per view, see RayVisibility
    std::optional<double> curvature_variance;
    int saliency_vote = 0;
};

struct MetricsReport {
    std::optional<double> wps, ray, smse, lce, se;
    std::optional<std::size_t> ipe;
    std::size_t h_f = 0;
    std::vector<WatermarkDiagnostics> per_watermark;
    std::vector<Vec3> views;
    std::vector<std::string> warnings;

    std::string to_json() const;
    std::string to_table() const;
};

struct EvaluateOptions {
    double view_increment_deg = 30.0;
    std::size_t n_rays = 16;
    std::size_t smse_samples = 100000;
    std::uint64_t seed = 42;
};

/// Every metric that the inputs allow: box-based ones need `boxes`, LCE
/// needs `labels`.
MetricsReport evaluate(const Mesh& original, const Mesh& watermarked, std::span<const BoxGeom> boxes,
                       std::span<const std::string> labels, const EvaluateOptions& opts = {});

/// Boxes recovered from labelled watermark faces: front axis from the
/// area-weighted top normal, in-plane axes from the principal direction of
/// the top vertices, extents from their spread plus the side walls. The
/// half thickness is at least `min_half_thickness`.
std::vector<BoxGeom> boxes_from_labels(const Mesh& mesh, std::span<const std::string> labels,
                                       double min_half_thickness = 0.25);

}  // namespace wmark
