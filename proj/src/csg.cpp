#include "wmark/csg.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>
#include <unordered_set>

#include "wmark/cdt.hpp"
#include "wmark/predicates.hpp"
#include "wmark/spatial_index.hpp"
#include "wmark/topology.hpp"

namespace wmark {

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t{a} << 32) | b;
}

struct PointKey {
    std::uint64_t edge;
    std::uint32_t face;
    bool operator==(const PointKey&) const = default;
};

struct PointKeyHash {
    std::size_t operator()(const PointKey& k) const {
        return static_cast<std::size_t>(k.edge * 0x9E3779B97F4A7C15ull ^ (std::uint64_t{k.face} * 0xC2B2AE3D27D4EB4Full));
    }
};

struct FaceSplit {
    std::array<std::vector<std::uint32_t>, 3> edge_points;
    std::vector<std::uint32_t> interior;
    std::vector<Edge2> segments;
};

class Builder {
public:
    Builder(const Mesh& a, const Mesh& b, const Vec3& delta) {
        na_ = static_cast<std::uint32_t>(a.vertex_count());
        arr_.vertices.assign(a.vertices().begin(), a.vertices().end());
        for (const auto& v : b.vertices()) arr_.vertices.push_back(v + delta);
        faces_[0].assign(a.faces().begin(), a.faces().end());
        for (const auto& f : b.faces()) faces_[1].push_back({f[0] + na_, f[1] + na_, f[2] + na_});
    }

    Arrangement run(const Mesh& a, const Mesh& b_moved, bool classify_b);

private:
    const Vec3& P(std::uint32_t id) const { return arr_.vertices[id]; }

    int side(std::uint32_t v, const Face& f) const {
        const int s = orient3d(P(f[0]), P(f[1]), P(f[2]), P(v));
        return s == 0 ? 1 : s;
    }

    // orientation of two edges, independent of vertex order up to the permutation sign
    int edge_edge(std::uint32_t p, std::uint32_t q, std::uint32_t x, std::uint32_t y) const {
        int s = 1;
        if (p > q) {
            std::swap(p, q);
            s = -s;
        }
        if (x > y) {
            std::swap(x, y);
            s = -s;
        }
        int o = p < x ? orient3d(P(p), P(q), P(x), P(y)) : orient3d(P(x), P(y), P(p), P(q));
        if (o == 0) o = 1;
        return s * o;
    }

    bool crosses(std::uint32_t p, std::uint32_t q, const Face& t) const {
        const int e0 = edge_edge(p, q, t[0], t[1]);
        const int e1 = edge_edge(p, q, t[1], t[2]);
        const int e2 = edge_edge(p, q, t[2], t[0]);
        return e0 == e1 && e1 == e2;
    }

    std::uint32_t point(int operand, std::uint32_t p, std::uint32_t q, std::uint32_t face, const Face& plane) {
        const PointKey key{edge_key(p, q) | (std::uint64_t(operand) << 63), face};
        auto it = points_.find(key);
        if (it != points_.end()) return it->second;
        if (p > q) std::swap(p, q);
        const double op = orient3d_value(P(plane[0]), P(plane[1]), P(plane[2]), P(p));
        const double oq = orient3d_value(P(plane[0]), P(plane[1]), P(plane[2]), P(q));
        double t = op / (op - oq);
        if (!(t >= 0.0)) t = 0.0;
        if (t > 1.0) t = 1.0;
        const auto id = static_cast<std::uint32_t>(arr_.vertices.size());
        arr_.vertices.push_back(P(p) + (P(q) - P(p)) * t);
        points_.emplace(key, id);
        return id;
    }

    void intersect_pair(std::uint32_t fa, std::uint32_t fb);
    void split_faces(int operand);
    void classify(int operand, const SpatialIndex& other, const Aabb& other_box);

    std::uint32_t na_ = 0;
    Arrangement arr_;
    std::array<std::vector<Face>, 2> faces_;
    std::array<std::unordered_map<std::uint32_t, FaceSplit>, 2> split_;
    std::unordered_map<PointKey, std::uint32_t, PointKeyHash> points_;
    std::unordered_set<std::uint64_t> curve_;
};

void Builder::intersect_pair(std::uint32_t fa, std::uint32_t fb) {
    const Face& A = faces_[0][fa];
    const Face& B = faces_[1][fb];
    std::array<int, 3> sa{}, sb{};
    for (int i = 0; i < 3; ++i) sa[static_cast<std::size_t>(i)] = side(A[static_cast<std::size_t>(i)], B);
    if (sa[0] == sa[1] && sa[1] == sa[2]) return;
    for (int i = 0; i < 3; ++i) sb[static_cast<std::size_t>(i)] = side(B[static_cast<std::size_t>(i)], A);
    if (sb[0] == sb[1] && sb[1] == sb[2]) return;

    struct Hit {
        int operand;
        int edge;
        std::uint32_t id;
    };
    std::array<Hit, 6> hits{};
    int n = 0;
    for (int i = 0; i < 3; ++i) {
        const auto j = static_cast<std::size_t>((i + 1) % 3);
        const auto ii = static_cast<std::size_t>(i);
        if (sa[ii] != sa[j] && crosses(A[ii], A[j], B)) hits[static_cast<std::size_t>(n++)] = {0, i, point(0, A[ii], A[j], fb, B)};
        if (sb[ii] != sb[j] && crosses(B[ii], B[j], A)) hits[static_cast<std::size_t>(n++)] = {1, i, point(1, B[ii], B[j], fa, A)};
    }
    if (n == 0) return;
    if (n != 2) throw CsgError("inconsistent triangle-triangle intersection");
    FaceSplit& sa_rec = split_[0][fa];
    FaceSplit& sb_rec = split_[1][fb];
    for (int k = 0; k < 2; ++k) {
        const Hit& h = hits[static_cast<std::size_t>(k)];
        if (h.operand == 0) {
            sa_rec.edge_points[static_cast<std::size_t>(h.edge)].push_back(h.id);
            sb_rec.interior.push_back(h.id);
        } else {
            sa_rec.interior.push_back(h.id);
            sb_rec.edge_points[static_cast<std::size_t>(h.edge)].push_back(h.id);
        }
    }
    sa_rec.segments.push_back({hits[0].id, hits[1].id});
    sb_rec.segments.push_back({hits[0].id, hits[1].id});
    curve_.insert(edge_key(hits[0].id, hits[1].id));
}

void Builder::split_faces(int operand) {
    auto& out_faces = arr_.faces[static_cast<std::size_t>(operand)];
    auto& out_source = arr_.source[static_cast<std::size_t>(operand)];
    const auto& faces = faces_[static_cast<std::size_t>(operand)];
    const auto& splits = split_[static_cast<std::size_t>(operand)];
    for (std::uint32_t f = 0; f < faces.size(); ++f) {
        auto it = splits.find(f);
        const Face& c = faces[f];
        if (it == splits.end()) {
            out_faces.push_back(c);
            out_source.push_back(f);
            continue;
        }
        const FaceSplit& rec = it->second;
        const Vec3 n = cross(P(c[1]) - P(c[0]), P(c[2]) - P(c[0]));
        int axis = 2;
        if (std::abs(n.x) >= std::abs(n.y) && std::abs(n.x) >= std::abs(n.z)) axis = 0;
        else if (std::abs(n.y) >= std::abs(n.z)) axis = 1;
        const bool flip = n[static_cast<std::size_t>(axis)] < 0.0;
        auto proj = [&](const Vec3& p) {
            Vec2 q;
            if (axis == 0) q = {p.y, p.z};
            else if (axis == 1) q = {p.z, p.x};
            else q = {p.x, p.y};
            if (flip) std::swap(q.x, q.y);
            return q;
        };

        std::vector<Vec2> pts;
        std::vector<std::uint32_t> global;
        std::unordered_map<std::uint32_t, std::uint32_t> local;
        auto add = [&](std::uint32_t g, const Vec2& q) {
            auto [pos, inserted] = local.try_emplace(g, static_cast<std::uint32_t>(pts.size()));
            if (inserted) {
                pts.push_back(q);
                global.push_back(g);
            }
            return pos->second;
        };
        std::array<Vec2, 3> corner2{proj(P(c[0])), proj(P(c[1])), proj(P(c[2]))};
        std::vector<Edge2> cons;
        std::vector<std::uint32_t> loop;
        for (int e = 0; e < 3; ++e) {
            const auto ei = static_cast<std::size_t>(e);
            const auto ej = static_cast<std::size_t>((e + 1) % 3);
            loop.push_back(add(c[ei], corner2[ei]));
            const Vec3 p0 = P(c[ei]), d = P(c[ej]) - p0;
            const double dd = dot(d, d);
            std::vector<std::pair<double, std::uint32_t>> along;
            for (auto id : rec.edge_points[ei]) along.emplace_back(dd > 0 ? dot(P(id) - p0, d) / dd : 0.0, id);
            std::sort(along.begin(), along.end());
            along.erase(std::unique(along.begin(), along.end(),
                                    [](const auto& x, const auto& y) { return x.second == y.second; }),
                        along.end());
            for (const auto& [t, id] : along) {
                const Vec2 q{corner2[ei].x + (corner2[ej].x - corner2[ei].x) * t,
                             corner2[ei].y + (corner2[ej].y - corner2[ei].y) * t};
                loop.push_back(add(id, q));
            }
        }
        for (std::size_t i = 0; i < loop.size(); ++i) cons.push_back({loop[i], loop[(i + 1) % loop.size()]});
        for (auto id : rec.interior) add(id, proj(P(id)));
        for (const auto& s : rec.segments) cons.push_back({local.at(s[0]), local.at(s[1])});

        for (const auto& t : constrained_triangulation(pts, cons)) {
            out_faces.push_back({global[t[0]], global[t[1]], global[t[2]]});
            out_source.push_back(f);
        }
    }
}

void Builder::classify(int operand, const SpatialIndex& other, const Aabb& other_box) {
    const auto& faces = arr_.faces[static_cast<std::size_t>(operand)];
    auto& inside = arr_.inside[static_cast<std::size_t>(operand)];
    const auto nf = static_cast<std::uint32_t>(faces.size());
    UnionFind uf(nf);
    std::unordered_map<std::uint64_t, std::uint32_t> first;
    first.reserve(faces.size() * 2);
    for (std::uint32_t f = 0; f < nf; ++f)
        for (int i = 0; i < 3; ++i) {
            const auto k = edge_key(faces[f][static_cast<std::size_t>(i)], faces[f][static_cast<std::size_t>((i + 1) % 3)]);
            if (curve_.count(k)) continue;
            auto [it, inserted] = first.try_emplace(k, f);
            if (!inserted) uf.unite(it->second, f);
        }
    // representative piece per region: the largest one
    std::unordered_map<std::uint32_t, std::pair<double, std::uint32_t>> best;
    std::unordered_map<std::uint32_t, Aabb> bounds;
    for (std::uint32_t f = 0; f < nf; ++f) {
        const auto r = uf.find(f);
        const Vec3 &p = P(faces[f][0]), &q = P(faces[f][1]), &s = P(faces[f][2]);
        const double area = norm(cross(q - p, s - p));
        auto [it, inserted] = best.try_emplace(r, area, f);
        if (!inserted && area > it->second.first) it->second = {area, f};
        Aabb& b = bounds[r];
        b.expand(p);
        b.expand(q);
        b.expand(s);
    }
    std::unordered_map<std::uint32_t, std::uint8_t> verdict;
    for (const auto& [r, rep] : best) {
        if (!bounds[r].overlaps(other_box)) {
            verdict[r] = 0;
            continue;
        }
        const Face& f = faces[rep.second];
        const Vec3 centroid = (P(f[0]) + P(f[1]) + P(f[2])) / 3.0;
        verdict[r] = inside_by_parity(other, centroid) ? 1 : 0;
    }
    inside.resize(nf);
    for (std::uint32_t f = 0; f < nf; ++f) inside[f] = verdict[uf.find(f)];
}

Arrangement Builder::run(const Mesh& a, const Mesh& b_moved, bool classify_b) {
    const SpatialIndex ib(b_moved);
    const Aabb box_b = b_moved.bounds();
    std::vector<std::uint32_t> cand;
    for (std::uint32_t fa = 0; fa < faces_[0].size(); ++fa) {
        Aabb box;
        for (auto v : faces_[0][fa]) box.expand(P(v));
        if (!box.overlaps(box_b, 1e-9)) continue;
        box.lo -= Vec3{1e-9, 1e-9, 1e-9};
        box.hi += Vec3{1e-9, 1e-9, 1e-9};
        cand.clear();
        ib.faces_overlapping(box, cand);
        std::sort(cand.begin(), cand.end());
        for (auto fb : cand) intersect_pair(fa, fb);
    }
    arr_.curve_edges = curve_.size();
    split_faces(0);
    split_faces(1);
    const SpatialIndex ia(a);
    classify(0, ib, box_b);
    if (classify_b) classify(1, ia, a.bounds());
    return std::move(arr_);
}

constexpr std::array<Vec3, 4> kPerturbations{Vec3{1.3e-7, 0.9e-7, 0.7e-7}, Vec3{-0.8e-7, 1.1e-7, 0.6e-7},
                                              Vec3{0.5e-7, -0.7e-7, 1.2e-7}, Vec3{-1.0e-7, -0.6e-7, -0.9e-7}};

}  // namespace

bool inside_by_parity(const SpatialIndex& index, const Vec3& p) {
    static const std::array<Vec3, 3> dirs{normalized(Vec3{0.5773, 0.6123, 0.5401}),
                                          normalized(Vec3{-0.6951, 0.2317, 0.6806}),
                                          normalized(Vec3{0.1187, -0.8129, -0.5703})};
    int votes = 0;
    for (const auto& d : dirs) votes += static_cast<int>(index.count_crossings(p, d, 0.0) % 2);
    return votes >= 2;
}

std::span<const Vec3> csg_perturbations() { return kPerturbations; }

Arrangement build_arrangement(const Mesh& a, const Mesh& b, const Vec3& perturbation, bool classify_b) {
    const Mesh moved = b.transformed(Mat3::identity(), perturbation);
    Builder builder(a, b, perturbation);
    return builder.run(a, moved, classify_b);
}

CsgResult boolean_op(const Mesh& a, const Mesh& b, BoolOp op, std::span<const std::string> labels_a,
                     std::span<const std::string> labels_b) {
    if (a.empty() || b.empty()) throw EmptyMeshError("boolean operand is empty");
    for (const auto& [m, name] : {std::pair{&a, "first"}, std::pair{&b, "second"}}) {
        const auto open = boundary_edge_count(*m);
        if (open != 0)
            throw CsgError(std::string(name) + " operand is not closed: " + std::to_string(open) + " boundary edges");
    }
    if (!labels_a.empty() && labels_a.size() != a.face_count()) throw CsgError("label count does not match faces");
    if (!labels_b.empty() && labels_b.size() != b.face_count()) throw CsgError("label count does not match faces");

    std::string last_error = "boolean operation failed";
    CsgResult fallback;
    bool have_fallback = false;
    for (const Vec3& delta : csg_perturbations()) {
        Arrangement arr;
        try {
            arr = build_arrangement(a, b, delta, true);
        } catch (const CsgError& e) {
            last_error = e.what();
            continue;
        }
        std::vector<Face> faces;
        CsgResult r;
        for (int operand = 0; operand < 2; ++operand) {
            const auto o = static_cast<std::size_t>(operand);
            for (std::size_t i = 0; i < arr.faces[o].size(); ++i) {
                const bool in = arr.inside[o][i] != 0;
                bool keep = false, reverse = false;
                switch (op) {
                    case BoolOp::Union: keep = !in; break;
                    case BoolOp::Intersection: keep = in; break;
                    case BoolOp::Difference:
                        keep = operand == 0 ? !in : in;
                        reverse = operand == 1;
                        break;
                }
                if (!keep) continue;
                Face f = arr.faces[o][i];
                if (reverse) std::swap(f[1], f[2]);
                faces.push_back(f);
                const std::uint32_t src = arr.source[o][i];
                r.origins.push_back({static_cast<std::uint8_t>(operand), src});
                const auto& labels = operand == 0 ? labels_a : labels_b;
                r.provenance_labels.push_back(labels.empty() ? (operand == 0 ? "a" : "b") : labels[src]);
            }
        }
        r.mesh = faces.empty() ? Mesh{} : remove_unreferenced_vertices(Mesh(std::move(arr.vertices), std::move(faces)));
        r.boundary_edge_count = r.mesh.empty() ? 0 : boundary_edge_count(r.mesh);
        if (r.boundary_edge_count == 0) return r;
        last_error = "result has " + std::to_string(r.boundary_edge_count) + " boundary edges";
        if (!have_fallback) {
            fallback = std::move(r);
            have_fallback = true;
        }
    }
    if (have_fallback) return fallback;
    throw CsgError(last_error);
}

}  // namespace wmark
