#include "wmark/topology.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace wmark {

namespace {

struct CellKey {
    std::int64_t x, y, z;
    bool operator==(const CellKey&) const = default;
};

struct CellHash {
    std::size_t operator()(const CellKey& k) const {
        std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
        h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
        h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t{a} << 32) | b;
}

}  // namespace

std::vector<std::uint32_t> weld_vertices(const Mesh& mesh, double eps) {
    const auto n = static_cast<std::uint32_t>(mesh.vertex_count());
    UnionFind uf(n);
    if (eps > 0.0) {
        const double cell = eps;
        std::unordered_map<CellKey, std::vector<std::uint32_t>, CellHash> grid;
        grid.reserve(n);
        auto key_of = [&](const Vec3& p) {
            return CellKey{static_cast<std::int64_t>(std::floor(p.x / cell)),
                           static_cast<std::int64_t>(std::floor(p.y / cell)),
                           static_cast<std::int64_t>(std::floor(p.z / cell))};
        };
        for (std::uint32_t v = 0; v < n; ++v) grid[key_of(mesh.vertex(v))].push_back(v);
        const double eps2 = eps * eps;
        for (std::uint32_t v = 0; v < n; ++v) {
            const Vec3& p = mesh.vertex(v);
            const CellKey k = key_of(p);
            for (std::int64_t dx = -1; dx <= 1; ++dx)
                for (std::int64_t dy = -1; dy <= 1; ++dy)
                    for (std::int64_t dz = -1; dz <= 1; ++dz) {
                        auto it = grid.find({k.x + dx, k.y + dy, k.z + dz});
                        if (it == grid.end()) continue;
                        for (auto w : it->second)
                            if (w > v && squared_norm(mesh.vertex(w) - p) <= eps2) uf.unite(v, w);
                    }
        }
    }
    std::vector<std::uint32_t> rep(n);
    for (std::uint32_t v = 0; v < n; ++v) rep[v] = uf.find(v);
    return rep;
}

Components connected_components(const Mesh& mesh, double weld_eps) {
    const auto rep = weld_vertices(mesh, weld_eps);
    const auto nf = static_cast<std::uint32_t>(mesh.face_count());
    // faces sharing a (welded) vertex are connected: union each face with its vertices
    UnionFind uf(nf + mesh.vertex_count());
    for (std::uint32_t f = 0; f < nf; ++f)
        for (auto v : mesh.face(f)) uf.unite(f, nf + rep[v]);
    Components out;
    out.labels.resize(nf);
    std::unordered_map<std::uint32_t, std::uint32_t> dense;
    for (std::uint32_t f = 0; f < nf; ++f) {
        auto [it, inserted] = dense.try_emplace(uf.find(f), static_cast<std::uint32_t>(dense.size()));
        out.labels[f] = it->second;
    }
    out.count = dense.size();
    return out;
}

std::size_t boundary_edge_count(const Mesh& mesh, double weld_eps) {
    const auto rep = weld_eps > 0.0 ? weld_vertices(mesh, weld_eps) : std::vector<std::uint32_t>{};
    auto id = [&](std::uint32_t v) { return rep.empty() ? v : rep[v]; };
    std::unordered_map<std::uint64_t, std::uint32_t> uses;
    uses.reserve(mesh.face_count() * 3);
    for (const auto& f : mesh.faces())
        for (int i = 0; i < 3; ++i) {
            const auto a = id(f[static_cast<std::size_t>(i)]), b = id(f[static_cast<std::size_t>((i + 1) % 3)]);
            if (a != b) ++uses[edge_key(a, b)];
        }
    std::size_t count = 0;
    for (const auto& [k, c] : uses)
        if (c == 1) ++count;
    return count;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> boundary_edges(const Mesh& mesh) {
    std::unordered_map<std::uint64_t, int> balance;
    balance.reserve(mesh.face_count() * 3);
    for (const auto& f : mesh.faces())
        for (int i = 0; i < 3; ++i) {
            const auto a = f[static_cast<std::size_t>(i)], b = f[static_cast<std::size_t>((i + 1) % 3)];
            balance[edge_key(a, b)] += a < b ? 1 : -1;
        }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (const auto& f : mesh.faces())
        for (int i = 0; i < 3; ++i) {
            const auto a = f[static_cast<std::size_t>(i)], b = f[static_cast<std::size_t>((i + 1) % 3)];
            const int bal = balance[edge_key(a, b)];
            // an unmatched directed edge leaves a nonzero balance in its own direction
            if ((a < b && bal > 0) || (a > b && bal < 0)) out.emplace_back(a, b);
        }
    return out;
}

Mesh remove_unreferenced_vertices(const Mesh& mesh) {
    constexpr auto kUnused = static_cast<std::uint32_t>(-1);
    std::vector<std::uint32_t> remap(mesh.vertex_count(), kUnused);
    for (const auto& f : mesh.faces())
        for (auto v : f) remap[v] = 0;
    std::vector<Vec3> verts;
    for (std::size_t v = 0; v < remap.size(); ++v)
        if (remap[v] != kUnused) {
            remap[v] = static_cast<std::uint32_t>(verts.size());
            verts.push_back(mesh.vertex(v));
        }
    std::vector<Face> faces;
    faces.reserve(mesh.face_count());
    for (const auto& f : mesh.faces()) faces.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
    return Mesh(std::move(verts), std::move(faces));
}

}  // namespace wmark
