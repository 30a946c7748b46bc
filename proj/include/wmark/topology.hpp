#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "wmark/mesh.hpp"

namespace wmark {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
        return true;
    }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint8_t> rank_;
};

struct Components {
    std::size_t count = 0;
    std::vector<std::uint32_t> labels;  // per face, dense in [0, count)
};

inline constexpr double kDefaultWeldEpsilon = 1e-6;

/// Face components after merging vertices closer than `weld_eps`.
/// Labels are numbered in order of each component's lowest face index.
Components connected_components(const Mesh& mesh, double weld_eps = kDefaultWeldEpsilon);

/// Representative index per vertex after welding within `eps` (spatial hash +
/// union-find). Vertices in the same class share the representative.
std::vector<std::uint32_t> weld_vertices(const Mesh& mesh, double eps);

/// Edges used by exactly one face (counted on welded vertex ids).
std::size_t boundary_edge_count(const Mesh& mesh, double weld_eps = 0.0);

/// Directed boundary edges (a, b) in face winding order, on raw vertex ids.
std::vector<std::pair<std::uint32_t, std::uint32_t>> boundary_edges(const Mesh& mesh);

/// Drops vertices no face references, preserving relative order.
Mesh remove_unreferenced_vertices(const Mesh& mesh);

}  // namespace wmark
