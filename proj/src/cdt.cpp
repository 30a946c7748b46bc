#include "wmark/cdt.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "wmark/error.hpp"

namespace wmark {

namespace {

constexpr std::uint32_t kNone = static_cast<std::uint32_t>(-1);

struct Tri {
    std::array<std::uint32_t, 3> v{};
    std::array<std::uint32_t, 3> n{kNone, kNone, kNone};  // n[i] is across edge (v[i], v[i+1])
    std::array<bool, 3> fixed{};
};

class Triangulation {
public:
    explicit Triangulation(std::vector<Vec2> pts) : p_(std::move(pts)) {}

    std::vector<Tri2> run(std::span<const Edge2> constraints, std::size_t real_count);

private:
    std::uint32_t add(const std::array<std::uint32_t, 3>& v) {
        Tri t;
        t.v = v;
        tris_.push_back(t);
        const auto id = static_cast<std::uint32_t>(tris_.size() - 1);
        for (auto x : v) vtri_[x] = id;
        return id;
    }
    void set(std::uint32_t id, const std::array<std::uint32_t, 3>& v) {
        tris_[id].v = v;
        for (auto x : v) vtri_[x] = id;
    }
    void relink(std::uint32_t t, std::uint32_t from, std::uint32_t to) {
        if (t == kNone) return;
        for (auto& x : tris_[t].n)
            if (x == from) x = to;
    }
    static int index_of(const Tri& t, std::uint32_t v) {
        for (int i = 0; i < 3; ++i)
            if (t.v[static_cast<std::size_t>(i)] == v) return i;
        return -1;
    }
    void rotate(std::uint32_t id, int k) {
        Tri& t = tris_[id];
        std::rotate(t.v.begin(), t.v.begin() + k, t.v.end());
        std::rotate(t.n.begin(), t.n.begin() + k, t.n.end());
        std::rotate(t.fixed.begin(), t.fixed.begin() + k, t.fixed.end());
    }
    int edge_index(std::uint32_t t, std::uint32_t nb) const {
        for (int i = 0; i < 3; ++i)
            if (tris_[t].n[static_cast<std::size_t>(i)] == nb) return i;
        return -1;
    }

    std::uint32_t locate(const Vec2& q, std::uint32_t start) const;
    std::uint32_t insert(std::uint32_t idx, std::uint32_t hint);
    void flip(std::uint32_t t, int e);
    void legalize(std::uint32_t t, std::uint32_t p);
    // triangle holding directed edge a -> b at edge index 0 after rotation, or kNone
    std::uint32_t find_edge(std::uint32_t a, std::uint32_t b);
    void insert_constraint(std::uint32_t a, std::uint32_t b, int depth);
    void mark_fixed(std::uint32_t a, std::uint32_t b);

    std::vector<Vec2> p_;
    std::vector<Tri> tris_;
    std::vector<std::uint32_t> vtri_;
};

std::uint32_t Triangulation::locate(const Vec2& q, std::uint32_t start) const {
    std::uint32_t t = start;
    const std::size_t cap = 4 * tris_.size() + 64;
    for (std::size_t step = 0; step < cap; ++step) {
        const Tri& tr = tris_[t];
        bool moved = false;
        for (int i = 0; i < 3; ++i) {
            const auto a = tr.v[static_cast<std::size_t>(i)], b = tr.v[static_cast<std::size_t>((i + 1) % 3)];
            if (orient2d(p_[a], p_[b], q) < 0 && tr.n[static_cast<std::size_t>(i)] != kNone) {
                t = tr.n[static_cast<std::size_t>(i)];
                moved = true;
                break;
            }
        }
        if (!moved) return t;
    }
    // fallback: exhaustive search
    for (std::uint32_t i = 0; i < tris_.size(); ++i) {
        const Tri& tr = tris_[i];
        if (orient2d(p_[tr.v[0]], p_[tr.v[1]], q) >= 0 && orient2d(p_[tr.v[1]], p_[tr.v[2]], q) >= 0 &&
            orient2d(p_[tr.v[2]], p_[tr.v[0]], q) >= 0)
            return i;
    }
    throw CsgError("triangulation point location failed");
}

void Triangulation::flip(std::uint32_t t, int e) {
    rotate(t, e);
    const std::uint32_t u = tris_[t].n[0];
    rotate(u, edge_index(u, t));
    const Tri T = tris_[t], U = tris_[u];
    // T = (a, b, c), U = (b, a, d)  ->  (c, a, d), (d, b, c)
    const auto a = T.v[0], b = T.v[1], c = T.v[2], d = U.v[2];
    set(t, {c, a, d});
    set(u, {d, b, c});
    tris_[t].n = {T.n[2], U.n[1], u};
    tris_[t].fixed = {T.fixed[2], U.fixed[1], false};
    tris_[u].n = {U.n[2], T.n[1], t};
    tris_[u].fixed = {U.fixed[2], T.fixed[1], false};
    relink(U.n[1], u, t);
    relink(T.n[1], t, u);
}

void Triangulation::legalize(std::uint32_t t0, std::uint32_t p) {
    std::vector<std::uint32_t> stack{t0};
    while (!stack.empty()) {
        const std::uint32_t t = stack.back();
        stack.pop_back();
        const int k = index_of(tris_[t], p);
        if (k < 0) continue;
        const int e = (k + 1) % 3;  // edge opposite p
        const std::uint32_t u = tris_[t].n[static_cast<std::size_t>(e)];
        if (u == kNone || tris_[t].fixed[static_cast<std::size_t>(e)]) continue;
        const int back = edge_index(u, t);
        const std::uint32_t d = tris_[u].v[static_cast<std::size_t>((back + 2) % 3)];
        const Tri& tr = tris_[t];
        if (incircle(p_[tr.v[0]], p_[tr.v[1]], p_[tr.v[2]], p_[d]) > 0) {
            flip(t, e);
            stack.push_back(t);
            stack.push_back(u);
        }
    }
}

std::uint32_t Triangulation::insert(std::uint32_t idx, std::uint32_t hint) {
    const Vec2& q = p_[idx];
    const std::uint32_t t = locate(q, hint);
    const Tri tr = tris_[t];
    std::array<int, 3> o{};
    for (int i = 0; i < 3; ++i)
        o[static_cast<std::size_t>(i)] = orient2d(p_[tr.v[static_cast<std::size_t>(i)]], p_[tr.v[static_cast<std::size_t>((i + 1) % 3)]], q);
    const int zeros = static_cast<int>(std::count(o.begin(), o.end(), 0));
    if (zeros >= 2) {
        // coincides with a vertex
        for (auto v : tr.v)
            if (p_[v] == q) return v;
        throw CsgError("triangulation found a degenerate triangle");
    }
    if (zeros == 0) {
        const auto a = tr.v[0], b = tr.v[1], c = tr.v[2];
        const std::uint32_t t1 = add({b, c, idx}), t2 = add({c, a, idx});
        set(t, {a, b, idx});
        tris_[t].n = {tr.n[0], t1, t2};
        tris_[t1].n = {tr.n[1], t2, t};
        tris_[t2].n = {tr.n[2], t, t1};
        relink(tr.n[1], t, t1);
        relink(tr.n[2], t, t2);
        legalize(t, idx);
        legalize(t1, idx);
        legalize(t2, idx);
        return idx;
    }
    // on an edge: split both neighbors
    const int e = static_cast<int>(std::find(o.begin(), o.end(), 0) - o.begin());
    rotate(t, e);
    const Tri T = tris_[t];
    const std::uint32_t u = T.n[0];
    const auto a = T.v[0], b = T.v[1], c = T.v[2];
    if (u == kNone) {
        const std::uint32_t t2 = add({idx, b, c});
        set(t, {a, idx, c});
        tris_[t].n = {kNone, t2, T.n[2]};
        tris_[t2].n = {kNone, T.n[1], t};
        relink(T.n[1], t, t2);
        legalize(t, idx);
        legalize(t2, idx);
        return idx;
    }
    rotate(u, edge_index(u, t));
    const Tri U = tris_[u];
    const auto d = U.v[2];
    const std::uint32_t t2 = add({idx, b, c}), u2 = add({idx, a, d});
    set(t, {a, idx, c});
    set(u, {b, idx, d});
    tris_[t].n = {u2, t2, T.n[2]};
    tris_[t2].n = {u, T.n[1], t};
    tris_[u].n = {t2, u2, U.n[2]};
    tris_[u2].n = {t, U.n[1], u};
    relink(T.n[1], t, t2);
    relink(U.n[1], u, u2);
    legalize(t, idx);
    legalize(t2, idx);
    legalize(u, idx);
    legalize(u2, idx);
    return idx;
}

std::uint32_t Triangulation::find_edge(std::uint32_t a, std::uint32_t b) {
    // walk the star of a in both directions
    const std::uint32_t start = vtri_[a];
    for (int dir = 0; dir < 2; ++dir) {
        std::uint32_t t = start;
        for (std::size_t guard = 0; guard < tris_.size() + 1 && t != kNone; ++guard) {
            const int k = index_of(tris_[t], a);
            if (tris_[t].v[static_cast<std::size_t>((k + 1) % 3)] == b) {
                rotate(t, k);
                return t;
            }
            t = dir == 0 ? tris_[t].n[static_cast<std::size_t>((k + 2) % 3)] : tris_[t].n[static_cast<std::size_t>(k)];
            if (t == start) break;
        }
    }
    return kNone;
}

void Triangulation::mark_fixed(std::uint32_t a, std::uint32_t b) {
    for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
        const std::uint32_t t = find_edge(x, y);
        if (t != kNone) tris_[t].fixed[0] = true;
    }
}

void Triangulation::insert_constraint(std::uint32_t a, std::uint32_t b, int depth) {
    if (a == b) return;
    if (depth > 10000) throw CsgError("constraint insertion did not terminate");
    if (find_edge(a, b) != kNone || find_edge(b, a) != kNone) {
        mark_fixed(a, b);
        return;
    }
    const Vec2 pa = p_[a], pb = p_[b];
    // find the triangle around a that the segment leaves through
    std::uint32_t t = vtri_[a];
    std::uint32_t left = kNone, right = kNone;
    for (std::size_t guard = 0; guard < tris_.size() + 1; ++guard) {
        const int k = index_of(tris_[t], a);
        const auto x = tris_[t].v[static_cast<std::size_t>((k + 1) % 3)];
        const auto y = tris_[t].v[static_cast<std::size_t>((k + 2) % 3)];
        const int ox = orient2d(pa, pb, p_[x]), oy = orient2d(pa, pb, p_[y]);
        auto ahead = [&](std::uint32_t w) {
            return (p_[w].x - pa.x) * (pb.x - pa.x) + (p_[w].y - pa.y) * (pb.y - pa.y) > 0.0;
        };
        if (ox == 0 && ahead(x)) {
            insert_constraint(a, x, depth + 1);
            insert_constraint(x, b, depth + 1);
            return;
        }
        if (oy == 0 && ahead(y)) {
            insert_constraint(a, y, depth + 1);
            insert_constraint(y, b, depth + 1);
            return;
        }
        if (ox < 0 && oy > 0) {
            right = x;
            left = y;
            break;
        }
        t = tris_[t].n[static_cast<std::size_t>((k + 2) % 3)];
        if (t == kNone) throw CsgError("constraint start not found");
    }
    if (left == kNone) throw CsgError("constraint start not found");

    std::deque<Edge2> crossed;
    std::uint32_t cur = t;
    for (std::size_t guard = 0;; ++guard) {
        if (guard > tris_.size() + 1) throw CsgError("constraint walk did not terminate");
        const int k = index_of(tris_[cur], right);
        if (tris_[cur].v[static_cast<std::size_t>((k + 1) % 3)] != left)
            throw CsgError("inconsistent constraint walk");
        if (tris_[cur].fixed[static_cast<std::size_t>(k)]) throw CsgError("constraints cross");
        crossed.push_back({right, left});
        const std::uint32_t nb = tris_[cur].n[static_cast<std::size_t>(k)];
        if (nb == kNone) throw CsgError("constraint leaves the triangulation");
        const int back = edge_index(nb, cur);
        const auto w = tris_[nb].v[static_cast<std::size_t>((back + 2) % 3)];
        if (w == b) break;
        const int ow = orient2d(pa, pb, p_[w]);
        if (ow == 0) {
            // passes through a vertex: split there
            crossed.clear();
            insert_constraint(a, w, depth + 1);
            insert_constraint(w, b, depth + 1);
            return;
        }
        if (ow > 0) left = w;
        else right = w;
        cur = nb;
    }

    const std::size_t cap = 64 * (crossed.size() + 4) * (crossed.size() + 4);
    for (std::size_t iter = 0; !crossed.empty(); ++iter) {
        if (iter > cap) throw CsgError("constraint recovery did not converge");
        const Edge2 e = crossed.front();
        crossed.pop_front();
        const std::uint32_t t1 = find_edge(e[0], e[1]);
        if (t1 == kNone) continue;
        const std::uint32_t t2 = tris_[t1].n[0];
        const auto p = tris_[t1].v[2];
        const auto q = tris_[t2].v[static_cast<std::size_t>((edge_index(t2, t1) + 2) % 3)];
        const int s0 = orient2d(p_[p], p_[q], p_[e[0]]), s1 = orient2d(p_[p], p_[q], p_[e[1]]);
        if (s0 * s1 >= 0) {
            crossed.push_back(e);
            continue;
        }
        flip(t1, 0);
        if (p != a && p != b && q != a && q != b && orient2d(pa, pb, p_[p]) * orient2d(pa, pb, p_[q]) < 0)
            crossed.push_back({p, q});
    }
    mark_fixed(a, b);
}

std::vector<Tri2> Triangulation::run(std::span<const Edge2> constraints, std::size_t real_count) {
    vtri_.assign(p_.size(), kNone);
    const auto s0 = static_cast<std::uint32_t>(real_count);
    add({s0, s0 + 1, s0 + 2});
    std::vector<std::uint32_t> alias(real_count);
    std::uint32_t hint = 0;
    for (std::uint32_t i = 0; i < real_count; ++i) {
        alias[i] = insert(i, hint);
        hint = vtri_[alias[i]];
    }
    for (const auto& c : constraints) insert_constraint(alias[c[0]], alias[c[1]], 0);

    // flood the exterior from super-vertex triangles without crossing constraints
    std::vector<char> outside(tris_.size(), 0);
    std::vector<std::uint32_t> stack;
    for (std::uint32_t i = 0; i < tris_.size(); ++i)
        for (auto v : tris_[i].v)
            if (v >= s0 && !outside[i]) {
                outside[i] = 1;
                stack.push_back(i);
            }
    while (!stack.empty()) {
        const auto t = stack.back();
        stack.pop_back();
        for (int i = 0; i < 3; ++i) {
            const auto nb = tris_[t].n[static_cast<std::size_t>(i)];
            if (nb != kNone && !tris_[t].fixed[static_cast<std::size_t>(i)] && !outside[nb]) {
                outside[nb] = 1;
                stack.push_back(nb);
            }
        }
    }
    std::vector<Tri2> out;
    for (std::uint32_t i = 0; i < tris_.size(); ++i)
        if (!outside[i]) out.push_back(tris_[i].v);
    return out;
}

}  // namespace

std::vector<Tri2> constrained_triangulation(std::span<const Vec2> points, std::span<const Edge2> constraints) {
    if (points.size() < 3) return {};
    double x0 = points[0].x, x1 = x0, y0 = points[0].y, y1 = y0;
    for (const auto& p : points) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    double span = std::max(x1 - x0, y1 - y0);
    if (!(span > 0.0)) span = 1.0;
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    std::vector<Vec2> pts(points.begin(), points.end());
    pts.push_back({cx - 20 * span, cy - 10 * span});
    pts.push_back({cx + 20 * span, cy - 10 * span});
    pts.push_back({cx, cy + 20 * span});
    for (const auto& c : constraints)
        if (c[0] >= points.size() || c[1] >= points.size()) throw CsgError("constraint references a missing point");
    Triangulation tri(std::move(pts));
    return tri.run(constraints, points.size());
}

}  // namespace wmark
