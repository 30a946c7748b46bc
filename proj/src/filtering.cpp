#include "wmark/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace wmark {

void FilterConfig::validate() const {
    if (!(loss_threshold > 0.0) || !(roughness_threshold > 0.0)) throw ConfigError("filter thresholds must be positive");
    if (roughness_samples == 0 || occlusion_rays == 0) throw ConfigError("sample counts must be positive");
    if (!(angle_increment > 0.0)) throw ConfigError("angle increment must be positive");
    const double steps = 360.0 / angle_increment;
    if (std::abs(steps - std::round(steps)) > 1e-9) throw ConfigError("angle increment must divide 360");
}

std::vector<CandidateBox> filter_by_loss(std::span<const CandidateBox> candidates, double threshold) {
    std::vector<CandidateBox> out;
    for (const auto& c : candidates)
        if (c.loss < threshold) out.push_back(c);
    return out;
}

std::vector<std::uint32_t> vertices_in_box(const Mesh& mesh, const BoxGeom& box) {
    std::vector<std::uint32_t> out;
    // cheap reject on the box's bounding sphere
    const double r2 = squared_norm(box.half_extents) * (1.0 + 1e-9) + 1e-18;
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
        if (squared_norm(mesh.vertex(v) - box.center) <= r2 && box.contains(mesh.vertex(v)))
            out.push_back(static_cast<std::uint32_t>(v));
    return out;
}

double roughness_score(const Mesh& mesh, const BoxGeom& geom, std::size_t n, std::uint64_t seed) {
    std::vector<std::uint32_t> inside;
    for (auto v : vertices_in_box(mesh, geom))
        if (!mesh.vertex_normal_degenerate(v)) inside.push_back(v);
    if (inside.empty() || n == 0) return std::numeric_limits<double>::infinity();
    if (inside.size() > n) {
        std::mt19937_64 rng(seed);
        std::shuffle(inside.begin(), inside.end(), rng);
        inside.resize(n);
    }
    double s = 0.0;
    for (auto j : inside)
        for (auto k : inside) {
            const double c = std::clamp(dot(mesh.vertex_normals()[j], mesh.vertex_normals()[k]), 0.05, 1.0);
            s += 1.0 / c;
        }
    return s / static_cast<double>(inside.size() * inside.size());
}

std::vector<CandidateBox> filter_by_roughness(const Mesh& mesh, std::span<const CandidateBox> candidates,
                                              double threshold, std::size_t n, std::uint64_t seed) {
    std::vector<CandidateBox> out;
    for (const auto& c : candidates)
        if (roughness_score(mesh, c.geom, n, seed + c.id) < threshold) out.push_back(c);
    return out;
}

std::vector<CandidateBox> filter_salient(const Mesh& mesh, const SaliencyField& field,
                                         std::span<const CandidateBox> candidates) {
    std::vector<CandidateBox> out;
    for (const auto& c : candidates)
        if (saliency_vote(mesh, field, c.geom).value_or(0) == 0) out.push_back(c);
    return out;
}

std::vector<CandidateBox> filter_occluded(std::span<const CandidateBox> candidates, const SpatialIndex& index,
                                          std::size_t n_rays) {
    std::vector<CandidateBox> out;
    for (const auto& c : candidates)
        if (front_face_unobstructed(index, c.geom, c.geom.front_normal(), n_rays)) out.push_back(c);
    return out;
}

namespace {

bool disjoint_sorted(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return false;
        a[i] < b[j] ? ++i : ++j;
    }
    return true;
}

}  // namespace

std::vector<CandidateBox> filter_overlaps(std::span<const CandidateBox> candidates, const Mesh& mesh,
                                          std::uint64_t seed) {
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<std::uint32_t>> sets(candidates.size());
    std::vector<std::size_t> accepted;
    std::vector<bool> keep(candidates.size(), false);
    for (std::size_t i : order) {
        sets[i] = vertices_in_box(mesh, candidates[i].geom);
        bool ok = true;
        for (std::size_t a : accepted)
            if (!disjoint_sorted(sets[i], sets[a]) || boxes_overlap(candidates[i].geom, candidates[a].geom)) {
                ok = false;
                break;
            }
        if (ok) {
            accepted.push_back(i);
            keep[i] = true;
        }
    }
    std::vector<CandidateBox> out;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (keep[i]) out.push_back(candidates[i]);
    return out;
}

int octant_of(const Vec3& p) { return (p.x >= 0 ? 1 : 0) | (p.y >= 0 ? 2 : 0) | (p.z >= 0 ? 4 : 0); }

std::vector<CandidateBox> select_octants(std::span<const CandidateBox> candidates) {
    std::array<std::vector<std::size_t>, 8> buckets;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        buckets[static_cast<std::size_t>(octant_of(candidates[i].geom.center))].push_back(i);
    std::vector<std::size_t> chosen;
    for (int o = 0; o < 8; ++o) {
        const auto& b = buckets[static_cast<std::size_t>(o)];
        if (b.empty()) continue;
        std::size_t best = b.front();
        if (chosen.empty()) {
            const Vec3 diag = normalized(Vec3{o & 1 ? 1.0 : -1.0, o & 2 ? 1.0 : -1.0, o & 4 ? 1.0 : -1.0});
            double best_cos = -HUGE_VAL;
            for (std::size_t i : b) {
                const double c = dot(normalized(candidates[i].geom.center), diag);
                if (c > best_cos) {
                    best_cos = c;
                    best = i;
                }
            }
        } else {
            double best_d = -HUGE_VAL;
            for (std::size_t i : b) {
                double d = HUGE_VAL;
                for (std::size_t s : chosen) d = std::min(d, distance(candidates[i].geom.center, candidates[s].geom.center));
                if (d > best_d) {
                    best_d = d;
                    best = i;
                }
            }
        }
        chosen.push_back(best);
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<CandidateBox> out;
    for (std::size_t i : chosen) out.push_back(candidates[i]);
    return out;
}

double Coverage::fraction() const {
    if (directions.empty()) return 1.0;
    const auto n = std::count_if(covered_by.begin(), covered_by.end(), [](int c) { return c >= 0; });
    return static_cast<double>(n) / static_cast<double>(directions.size());
}

namespace {

bool faces_view(const BoxGeom& g, const Vec3& dir) {
    return dot(g.front_normal(), dir) >= std::cos(kViewConeDeg * M_PI / 180.0) - 1e-12;
}

}  // namespace

Coverage coverage(std::span<const CandidateBox> selected, const SpatialIndex& index, const ViewSet& views,
                  std::size_t n_rays) {
    Coverage cov;
    cov.directions = views.directions;
    cov.covered_by.assign(views.directions.size(), -1);
    for (std::size_t d = 0; d < views.directions.size(); ++d)
        for (const auto& c : selected)
            if (faces_view(c.geom, views.directions[d]) &&
                front_face_unobstructed(index, c.geom, views.directions[d], n_rays)) {
                cov.covered_by[d] = static_cast<int>(c.id);
                break;
            }
    return cov;
}

std::vector<CandidateBox> add_multi_angle(std::span<const CandidateBox> pool, std::span<const CandidateBox> selected,
                                          const Mesh& mesh, const SpatialIndex& index, double angle_increment,
                                          std::size_t n_rays) {
    const ViewSet views = make_views(angle_increment);
    std::vector<CandidateBox> out(selected.begin(), selected.end());
    std::vector<std::vector<std::uint32_t>> sets;
    for (const auto& c : out) sets.push_back(vertices_in_box(mesh, c.geom));
    auto taken = [&](const CandidateBox& c) {
        return std::any_of(out.begin(), out.end(), [&](const CandidateBox& s) { return s.id == c.id; });
    };
    for (const Vec3& dir : views.directions) {
        if (coverage(out, index, ViewSet{{dir}, angle_increment}, n_rays).covered_by[0] >= 0) continue;
        // candidates sorted by angle to the direction, lowest index on ties
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (!taken(pool[i]) && faces_view(pool[i].geom, dir)) order.push_back(i);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return dot(pool[a].geom.front_normal(), dir) > dot(pool[b].geom.front_normal(), dir);
        });
        for (std::size_t i : order) {
            const CandidateBox& c = pool[i];
            if (!front_face_unobstructed(index, c.geom, dir, n_rays)) continue;
            auto set = vertices_in_box(mesh, c.geom);
            bool clash = false;
            for (std::size_t s = 0; s < out.size() && !clash; ++s)
                clash = !disjoint_sorted(set, sets[s]) || boxes_overlap(c.geom, out[s].geom);
            if (clash) continue;
            out.push_back(c);
            sets.push_back(std::move(set));
            break;
        }
    }
    return out;
}

std::vector<CandidateBox> filter_cascade(const Mesh& mesh, const SpatialIndex& index,
                                         std::span<const CandidateBox> candidates, const FilterConfig& cfg,
                                         CascadeTrace* trace) {
    cfg.validate();
    CascadeTrace t;
    t.initial = candidates.size();
    auto c = filter_by_loss(candidates, cfg.loss_threshold);
    t.after_loss = c.size();
    c = filter_by_roughness(mesh, c, cfg.roughness_threshold, cfg.roughness_samples, cfg.seed);
    t.after_roughness = c.size();
    const SaliencyField field = compute_saliency(mesh);
    c = filter_salient(mesh, field, c);
    t.after_saliency = c.size();
    // every unoccluded candidate up to here may later fill an uncovered view
    const auto pool = filter_occluded(c, index, cfg.occlusion_rays);
    c = filter_overlaps(c, mesh, cfg.seed);
    t.after_overlap = c.size();
    c = filter_occluded(c, index, cfg.occlusion_rays);
    t.after_occlusion = c.size();
    c = select_octants(c);
    t.after_octant = c.size();
    c = add_multi_angle(pool, c, mesh, index, cfg.angle_increment, cfg.occlusion_rays);
    t.final_count = c.size();
    if (trace) *trace = t;
    return c;
}

}  // namespace wmark
