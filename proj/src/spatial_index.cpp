#include "wmark/spatial_index.hpp"

#include <algorithm>

namespace wmark {

// Ericson, Real-Time Collision Detection, 5.1.5.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

    const Vec3 cp = p - c;
    const double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));

    const double sum = va + vb + vc;
    if (!(sum > 0.0)) {
        // degenerate triangle: fall back to the closest of its edges
        auto seg = [&](const Vec3& s, const Vec3& e) {
            const Vec3 d = e - s;
            const double l2 = dot(d, d);
            const double t = l2 > 0.0 ? std::clamp(dot(p - s, d) / l2, 0.0, 1.0) : 0.0;
            return s + d * t;
        };
        Vec3 best = seg(a, b);
        for (const Vec3& q : {seg(b, c), seg(c, a)})
            if (squared_norm(q - p) < squared_norm(best - p)) best = q;
        return best;
    }
    const double denom = 1.0 / sum;
    const double v = vb * denom, w = vc * denom;
    return a + ab * v + ac * w;
}

std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                                   const Vec3& c, double t_min) {
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 pv = cross(dir, e2);
    const double det = dot(e1, pv);
    if (det == 0.0) return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 tv = origin - a;
    const double u = dot(tv, pv) * inv;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 qv = cross(tv, e1);
    const double v = dot(dir, qv) * inv;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    const double t = dot(e2, qv) * inv;
    if (!(t > t_min)) return std::nullopt;
    return t;
}

namespace {

double box_distance2(const Aabb& b, const Vec3& p) {
    double d = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double v = p[static_cast<std::size_t>(i)];
        const double lo = b.lo[static_cast<std::size_t>(i)], hi = b.hi[static_cast<std::size_t>(i)];
        if (v < lo) d += (lo - v) * (lo - v);
        else if (v > hi) d += (v - hi) * (v - hi);
    }
    return d;
}

// Slab test; returns entry parameter or +inf on miss.
double ray_box(const Aabb& b, const Vec3& o, const Vec3& inv, double t_min, double t_max) {
    double t0 = t_min, t1 = t_max;
    for (std::size_t i = 0; i < 3; ++i) {
        double tn = (b.lo[i] - o[i]) * inv[i];
        double tf = (b.hi[i] - o[i]) * inv[i];
        if (tn > tf) std::swap(tn, tf);
        // NaN from 0 * inf means the ray lies in the slab plane; keep the interval
        if (tn == tn) t0 = std::max(t0, tn);
        if (tf == tf) t1 = std::min(t1, tf);
        if (t0 > t1) return HUGE_VAL;
    }
    return t0;
}

Vec3 reciprocal(const Vec3& d) { return {1.0 / d.x, 1.0 / d.y, 1.0 / d.z}; }

}  // namespace

SpatialIndex::SpatialIndex(const Mesh& mesh) {
    tris_.reserve(mesh.face_count());
    std::vector<Vec3> centroids;
    centroids.reserve(mesh.face_count());
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        tris_.push_back(mesh.triangle(f));
        centroids.push_back((tris_.back()[0] + tris_.back()[1] + tris_.back()[2]) / 3.0);
    }
    order_.resize(tris_.size());
    for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
    if (!tris_.empty()) {
        nodes_.reserve(2 * tris_.size() / kLeafSize + 2);
        build(0, static_cast<std::uint32_t>(tris_.size()), centroids);
    }
}

std::uint32_t SpatialIndex::build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Aabb bounds, cbounds;
    for (std::uint32_t i = begin; i < end; ++i) {
        for (const auto& v : tris_[order_[i]]) bounds.expand(v);
        cbounds.expand(centroids[order_[i]]);
    }
    nodes_[id].bounds = bounds;
    if (end - begin <= kLeafSize) {
        nodes_[id].first = begin;
        nodes_[id].count = end - begin;
        return id;
    }
    const Vec3 e = cbounds.extent();
    const std::size_t axis = (e.x >= e.y && e.x >= e.z) ? 0 : (e.y >= e.z ? 1 : 2);
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double ca = centroids[a][axis], cb = centroids[b][axis];
                         return ca < cb || (ca == cb && a < b);
                     });
    const std::uint32_t left = build(begin, mid, centroids);
    const std::uint32_t right = build(mid, end, centroids);
    nodes_[id].first = left;
    nodes_[id].right = right;
    nodes_[id].count = 0;
    return id;
}

ClosestHit SpatialIndex::closest_point(const Vec3& q) const {
    ClosestHit best;
    if (tris_.empty()) return best;
    double best2 = HUGE_VAL;
    std::uint32_t stack[128];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& n = nodes_[stack[--sp]];
        if (box_distance2(n.bounds, q) >= best2) continue;
        if (n.leaf()) {
            for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
                const auto f = order_[i];
                const auto& t = tris_[f];
                const Vec3 p = closest_point_on_triangle(q, t[0], t[1], t[2]);
                const double d2 = squared_norm(p - q);
                if (d2 < best2 || (d2 == best2 && f < best.face_index)) {
                    best2 = d2;
                    best.point = p;
                    best.face_index = f;
                }
            }
            continue;
        }
        const double dl = box_distance2(nodes_[n.first].bounds, q);
        const double dr = box_distance2(nodes_[n.right].bounds, q);
        // push the farther child first so the nearer one is popped next
        if (dl < dr) {
            stack[sp++] = n.right;
            stack[sp++] = n.first;
        } else {
            stack[sp++] = n.first;
            stack[sp++] = n.right;
        }
    }
    best.distance = std::sqrt(best2);
    return best;
}

std::optional<RayHit> SpatialIndex::ray_intersect(const Vec3& o, const Vec3& d, double t_min,
                                                  double t_max) const {
    if (tris_.empty()) return std::nullopt;
    const Vec3 inv = reciprocal(d);
    std::optional<RayHit> best;
    double best_t = t_max;
    std::uint32_t stack[128];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& n = nodes_[stack[--sp]];
        if (ray_box(n.bounds, o, inv, t_min, best_t) == HUGE_VAL) continue;
        if (n.leaf()) {
            for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
                const auto f = order_[i];
                const auto& t = tris_[f];
                if (auto hit = ray_triangle(o, d, t[0], t[1], t[2], t_min)) {
                    if (*hit < best_t || (best && *hit == best_t && f < best->face_index)) {
                        best_t = *hit;
                        best = RayHit{*hit, f};
                    }
                }
            }
            continue;
        }
        stack[sp++] = n.first;
        stack[sp++] = n.right;
    }
    return best;
}

bool SpatialIndex::any_hit(const Vec3& o, const Vec3& d, double t_min, double t_max) const {
    if (tris_.empty()) return false;
    const Vec3 inv = reciprocal(d);
    std::uint32_t stack[128];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& n = nodes_[stack[--sp]];
        if (ray_box(n.bounds, o, inv, t_min, t_max) == HUGE_VAL) continue;
        if (n.leaf()) {
            for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
                const auto& t = tris_[order_[i]];
                if (auto hit = ray_triangle(o, d, t[0], t[1], t[2], t_min); hit && *hit < t_max) return true;
            }
            continue;
        }
        stack[sp++] = n.first;
        stack[sp++] = n.right;
    }
    return false;
}

std::size_t SpatialIndex::count_crossings(const Vec3& o, const Vec3& d, double t_min) const {
    if (tris_.empty()) return 0;
    const Vec3 inv = reciprocal(d);
    std::size_t count = 0;
    std::uint32_t stack[128];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& n = nodes_[stack[--sp]];
        if (ray_box(n.bounds, o, inv, t_min, HUGE_VAL) == HUGE_VAL) continue;
        if (n.leaf()) {
            for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
                const auto& t = tris_[order_[i]];
                if (ray_triangle(o, d, t[0], t[1], t[2], t_min)) ++count;
            }
            continue;
        }
        stack[sp++] = n.first;
        stack[sp++] = n.right;
    }
    return count;
}

void SpatialIndex::faces_overlapping(const Aabb& box, std::vector<std::uint32_t>& out) const {
    if (tris_.empty()) return;
    std::uint32_t stack[128];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& n = nodes_[stack[--sp]];
        if (!n.bounds.overlaps(box)) continue;
        if (n.leaf()) {
            for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
                const auto f = order_[i];
                Aabb tb;
                for (const auto& v : tris_[f]) tb.expand(v);
                if (tb.overlaps(box)) out.push_back(f);
            }
            continue;
        }
        stack[sp++] = n.first;
        stack[sp++] = n.right;
    }
}

}  // namespace wmark
