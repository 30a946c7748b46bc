#include "wmark/placement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wmark {

Mat3 align_z_to(const Vec3& normal) {
    const Vec3 n = normalized(normal);
    const Vec3 z{0, 0, 1};
    if (squared_norm(n - Vec3{0, 0, -1}) <= 1e-12) return rotation_x(M_PI);
    const Vec3 axis = cross(z, n);
    const double s = norm(axis);
    if (s < 1e-15) return Mat3::identity();
    return rotation_axis_angle(axis / s, std::atan2(s, dot(z, n)));
}

BoxGeom apply_params(const BoxGeom& base, const RigidParams& params) {
    BoxGeom g = base;
    g.center = base.center + params.translation();
    g.rotation = params.rotation() * base.rotation;
    return g;
}

std::vector<CandidateBox> init_candidates(const Mesh& mesh, const BoxGeom& box_template, std::size_t sample_count,
                                          double min_spacing, std::uint64_t seed) {
    if (sample_count == 0) throw ConfigError("H_s must be positive");
    if (!(min_spacing > 0.0)) throw ConfigError("H_r must be positive");
    const auto samples = surface_sample(mesh, sample_count, seed);
    std::vector<SurfacePoint> kept;
    const double r2 = min_spacing * min_spacing;
    for (const auto& s : samples) {
        const bool close = std::any_of(kept.begin(), kept.end(),
                                       [&](const SurfacePoint& k) { return squared_norm(k.position - s.position) < r2; });
        if (!close) kept.push_back(s);
    }
    if (kept.empty()) throw GeometryError("no candidate survived spacing rejection; use a smaller H_r");

    std::vector<CandidateBox> out;
    out.reserve(kept.size());
    for (const auto& s : kept) {
        const Mat3 r = align_z_to(s.normal);
        CandidateBox c;
        c.base.half_extents = box_template.half_extents;
        c.base.rotation = r * box_template.rotation;
        c.base.center = s.position + r * box_template.center;
        c.geom = c.base;
        c.anchor = s;
        c.id = static_cast<std::uint32_t>(out.size());
        out.push_back(c);
    }
    return out;
}

std::array<Vec3, 8> transform_vertices(const CandidateBox& candidate) {
    auto v = candidate.base_vertices();
    const Vec3 t = candidate.params.translation();
    Vec3 centroid;
    for (auto& p : v) {
        p += t;
        centroid += p;
    }
    centroid /= 8.0;
    const Mat3 r = candidate.params.rotation();
    for (auto& p : v) p = r * (p - centroid) + centroid;
    return v;
}

namespace {

std::vector<Vec3> probes_from_corners(const std::array<Vec3, 8>& c, std::size_t count) {
    std::array<Vec3, 4> mid;
    for (std::size_t k = 0; k < 4; ++k) mid[k] = (c[k] + c[k + 4]) * 0.5;
    std::vector<Vec3> out;
    out.reserve(count);
    const std::size_t extra = count >= 4 ? count - 4 : 0;
    std::array<double, 4> len{};
    double total = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        len[k] = distance(mid[k], mid[(k + 1) % 4]);
        total += len[k];
    }
    // largest-remainder allocation proportional to segment length
    std::array<std::size_t, 4> n{};
    std::array<double, 4> frac{};
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < 4; ++k) {
        double ideal = total > 0.0 ? static_cast<double>(extra) * len[k] / total : extra / 4.0;
        // quantized so that a rigidly moved box gets the same allocation
        ideal = std::round(ideal * 1e6) / 1e6;
        n[k] = static_cast<std::size_t>(std::floor(ideal));
        frac[k] = ideal - static_cast<double>(n[k]);
        assigned += n[k];
    }
    std::array<std::size_t, 4> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (std::size_t i = 0; assigned < extra; ++i, ++assigned) ++n[order[i % 4]];

    for (std::size_t k = 0; k < 4; ++k) {
        const Vec3& a = mid[k];
        const Vec3& b = mid[(k + 1) % 4];
        out.push_back(a);
        for (std::size_t i = 1; i <= n[k]; ++i)
            out.push_back(a + (b - a) * (static_cast<double>(i) / static_cast<double>(n[k] + 1)));
    }
    return out;
}

}  // namespace

std::vector<Vec3> sample_probe_points(const BoxGeom& geom, std::size_t count) {
    if (count < 4) throw ConfigError("probe count must be at least 4");
    return probes_from_corners(geom.corners(), count);
}

double alignment_loss(std::span<const Vec3> points, const SpatialIndex& index) {
    if (points.empty()) return 0.0;
    double s = 0.0;
    for (const auto& p : points) {
        const double d = index.closest_point(p).distance;
        s += d * d;
    }
    return s / static_cast<double>(points.size());
}

double loss_and_gradient(const CandidateBox& candidate, const SpatialIndex& index, std::size_t probe_count,
                         std::array<double, 6>* gradient) {
    // probes are affine in the corners, so probe(transformed box) = transform(probe(base box))
    const auto base_probes = sample_probe_points(candidate.base, probe_count);
    const RigidParams& p = candidate.params;
    const Mat3 rx = rotation_x(p.alpha), ry = rotation_y(p.beta), rz = rotation_z(p.gamma);
    const Mat3 r = rz * ry * rx;
    const Vec3 t = p.translation();
    const Vec3 c0 = candidate.base.center;

    // derivatives of the elementary rotations
    const double ca = std::cos(p.alpha), sa = std::sin(p.alpha);
    const double cb = std::cos(p.beta), sb = std::sin(p.beta);
    const double cg = std::cos(p.gamma), sg = std::sin(p.gamma);
    Mat3 drx, dry, drz;
    drx.m = {0, 0, 0, 0, -sa, -ca, 0, ca, -sa};
    dry.m = {-sb, 0, cb, 0, 0, 0, -cb, 0, -sb};
    drz.m = {-sg, -cg, 0, cg, -sg, 0, 0, 0, 0};
    const Mat3 d_alpha = rz * ry * drx;
    const Mat3 d_beta = rz * dry * rx;
    const Mat3 d_gamma = drz * ry * rx;

    std::array<double, 6> g{};
    double loss = 0.0;
    for (const auto& s0 : base_probes) {
        const Vec3 local = s0 - c0;
        const Vec3 s = r * local + c0 + t;
        const ClosestHit hit = index.closest_point(s);
        const Vec3 residual = s - hit.point;
        loss += squared_norm(residual);
        if (gradient) {
            g[0] += 2.0 * dot(residual, d_alpha * local);
            g[1] += 2.0 * dot(residual, d_beta * local);
            g[2] += 2.0 * dot(residual, d_gamma * local);
            g[3] += 2.0 * residual.x;
            g[4] += 2.0 * residual.y;
            g[5] += 2.0 * residual.z;
        }
    }
    const double inv = 1.0 / static_cast<double>(base_probes.size());
    if (gradient) {
        for (auto& v : g) v *= inv;
        *gradient = g;
    }
    return loss * inv;
}

std::array<double, 6> loss_gradient(const CandidateBox& candidate, const SpatialIndex& index,
                                    std::size_t probe_count) {
    std::array<double, 6> g{};
    loss_and_gradient(candidate, index, probe_count, &g);
    return g;
}

std::vector<CandidateBox> optimize(std::vector<CandidateBox> candidates, const SpatialIndex& index,
                                   const OptimizerOptions& opts) {
    if (opts.max_steps == 0 || !(opts.learning_rate > 0.0) || !(opts.stop_mean_loss > 0.0))
        throw ConfigError("optimizer options must be positive");
    for (auto& c : candidates) {
        RigidParams best_params = c.params;
        double best_loss = HUGE_VAL;
        std::array<double, 6> grad{};
        std::size_t steps = 0;
        for (;;) {
            const double loss = loss_and_gradient(c, index, opts.probe_count, &grad);
            if (steps == 0) c.initial_loss = loss;
            if (loss < best_loss) {
                best_loss = loss;
                best_params = c.params;
            }
            if (loss < opts.stop_mean_loss || steps >= opts.max_steps) break;
            auto a = c.params.as_array();
            for (std::size_t i = 0; i < 6; ++i) a[i] -= opts.learning_rate * grad[i];
            c.params = RigidParams::from_array(a);
            ++steps;
        }
        c.params = best_params;
        c.loss = best_loss;
        c.steps = steps;
        c.geom = apply_params(c.base, c.params);
    }
    return candidates;
}

}  // namespace wmark
