#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wmark/metrics.hpp"
#include "wmark/placement.hpp"

namespace wmark {

struct FilterConfig {
    double loss_threshold = 0.005;
    double roughness_threshold = 1.25;
    std::size_t roughness_samples = 32;
    std::size_t occlusion_rays = 16;
    double angle_increment = 30.0;
    std::uint64_t seed = 42;

    void validate() const;
};

std::vector<CandidateBox> filter_by_loss(std::span<const CandidateBox> candidates, double threshold);

/// Mean of 1 / clamp(cos, 0.05, 1) over ordered pairs of vertex normals of (up
/// to n sampled) mesh vertices inside the box; +inf when the box holds none.
double roughness_score(const Mesh& mesh, const BoxGeom& geom, std::size_t n, std::uint64_t seed);

std::vector<CandidateBox> filter_by_roughness(const Mesh& mesh, std::span<const CandidateBox> candidates,
                                              double threshold, std::size_t n, std::uint64_t seed);

/// Drops candidates whose saliency vote is 1.
std::vector<CandidateBox> filter_salient(const Mesh& mesh, const SaliencyField& field,
                                         std::span<const CandidateBox> candidates);

/// Drops candidates where a ray from the front face along its normal hits the mesh.
std::vector<CandidateBox> filter_occluded(std::span<const CandidateBox> candidates, const SpatialIndex& index,
                                          std::size_t n_rays);

/// Mesh vertices inside a box, sorted.
std::vector<std::uint32_t> vertices_in_box(const Mesh& mesh, const BoxGeom& box);

/// Greedy in seed-shuffled order: a candidate is accepted when its vertex set
/// is disjoint from, and its box does not intersect, every accepted one.
/// Output keeps the input order.
std::vector<CandidateBox> filter_overlaps(std::span<const CandidateBox> candidates, const Mesh& mesh,
                                          std::uint64_t seed);

/// Octant of a point: bit 0 x >= 0, bit 1 y >= 0, bit 2 z >= 0.
int octant_of(const Vec3& p);

/// One candidate per non-empty octant, octants in index order. The first
/// pick is the one whose direction is closest to the octant diagonal; later
/// picks maximize the minimum distance to what is already selected.
std::vector<CandidateBox> select_octants(std::span<const CandidateBox> candidates);

struct Coverage {
    std::vector<Vec3> directions;
    std::vector<int> covered_by;  // candidate id or -1
    double fraction() const;
};

/// For each view direction, which watermark (if any) faces it within 45
/// degrees with an unobstructed front face.
Coverage coverage(std::span<const CandidateBox> selected, const SpatialIndex& index, const ViewSet& views,
                  std::size_t n_rays);

/// Adds, for every uncovered direction, the pool candidate closest in normal
/// that faces it within 45 degrees, sees it unobstructed and does not
/// overlap the current selection.
std::vector<CandidateBox> add_multi_angle(std::span<const CandidateBox> pool, std::span<const CandidateBox> selected,
                                          const Mesh& mesh, const SpatialIndex& index, double angle_increment,
                                          std::size_t n_rays = 16);

struct CascadeTrace {
    std::size_t initial = 0, after_loss = 0, after_roughness = 0, after_saliency = 0, after_overlap = 0,
                after_occlusion = 0, after_octant = 0, final_count = 0;
};

/// loss -> roughness -> saliency -> overlap -> occlusion -> octant -> multi-angle.
std::vector<CandidateBox> filter_cascade(const Mesh& mesh, const SpatialIndex& index,
                                         std::span<const CandidateBox> candidates, const FilterConfig& cfg,
                                         CascadeTrace* trace = nullptr);

}  // namespace wmark
