#include "wmark/emboss.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "wmark/spatial_index.hpp"
#include "wmark/topology.hpp"

namespace wmark {

std::string watermark_label(std::size_t index, const std::string& part) {
    return "watermark_" + std::to_string(index) + "_" + part;
}

std::optional<LabelInfo> parse_watermark_label(const std::string& label) {
    constexpr std::string_view prefix = "watermark_";
    if (label.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    const char* begin = label.data() + prefix.size();
    const char* end = label.data() + label.size();
    LabelInfo info;
    auto [ptr, ec] = std::from_chars(begin, end, info.index);
    if (ec != std::errc{} || ptr == begin || ptr == end || *ptr != '_') return std::nullopt;
    info.part.assign(ptr + 1, end);
    if (info.part.empty()) return std::nullopt;
    return info;
}

bool is_watermark_label(const std::string& label) { return parse_watermark_label(label).has_value(); }

namespace {

// Lifts `patch` (faces over `verts`) by `offset` and walls it to its own
// boundary. Appends to verts / faces / labels.
void lift_patch(std::vector<Vec3>& verts, std::vector<Face>& out_faces, std::vector<std::string>& labels,
                std::span<const Face> patch, const Vec3& offset, const std::string& top_label,
                const std::string& side_label) {
    std::unordered_map<std::uint32_t, std::uint32_t> lifted;
    auto up = [&](std::uint32_t v) {
        auto [it, inserted] = lifted.try_emplace(v, static_cast<std::uint32_t>(verts.size()));
        if (inserted) verts.push_back(verts[v] + offset);
        return it->second;
    };
    // boundary edges of the patch on its own vertex ids
    std::vector<Face> owned(patch.begin(), patch.end());
    std::vector<std::pair<std::uint32_t, std::uint32_t>> rim;
    {
        std::unordered_map<std::uint64_t, int> balance;
        auto key = [](std::uint32_t a, std::uint32_t b) {
            return (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
        };
        for (const auto& f : owned)
            for (std::size_t i = 0; i < 3; ++i) balance[key(f[i], f[(i + 1) % 3])] += f[i] < f[(i + 1) % 3] ? 1 : -1;
        for (const auto& f : owned)
            for (std::size_t i = 0; i < 3; ++i) {
                const auto a = f[i], b = f[(i + 1) % 3];
                const int bal = balance[key(a, b)];
                if ((a < b && bal > 0) || (a > b && bal < 0)) rim.emplace_back(a, b);
            }
    }
    for (const auto& f : owned) {
        out_faces.push_back({up(f[0]), up(f[1]), up(f[2])});
        labels.push_back(top_label);
    }
    for (auto [a, b] : rim) {
        const auto a2 = up(a), b2 = up(b);
        out_faces.push_back({a, b, b2});
        out_faces.push_back({a, b2, a2});
        labels.push_back(side_label);
        labels.push_back(side_label);
    }
}

}  // namespace

Mesh extrude_along(const Mesh& patch, const Vec3& direction, double distance) {
    if (!(distance > 0.0)) throw ConfigError("extrusion distance must be positive");
    if (patch.empty() || patch.face_count() == 0 || !(patch.total_area() > 0.0))
        throw GeometryError("cannot extrude a patch with zero area");
    const Vec3 d = normalized(direction);
    if (squared_norm(d) == 0.0) throw ConfigError("extrusion direction is zero");
    std::vector<Vec3> verts(patch.vertices().begin(), patch.vertices().end());
    std::vector<Face> faces;
    std::vector<std::string> labels;
    for (const auto& f : patch.faces()) faces.push_back({f[0], f[2], f[1]});
    lift_patch(verts, faces, labels, patch.faces(), d * distance, "top", "side");
    return Mesh(std::move(verts), std::move(faces));
}

FuseResult curve_matching_fuse(const Mesh& target, std::span<const PlacedWatermark> watermarks, double strength,
                               FuseMode mode) {
    if (!(strength > 0.0)) throw ConfigError("extrude strength must be positive");
    if (target.empty()) throw EmptyMeshError();
    const auto open = boundary_edge_count(target);
    if (open != 0) throw CsgError("target is not closed: " + std::to_string(open) + " boundary edges");

    const SpatialIndex original(target);
    FuseResult res;
    res.mesh = target;
    res.labels.assign(target.face_count(), "target");

    for (std::size_t w = 0; w < watermarks.size(); ++w) {
        const PlacedWatermark& wm = watermarks[w];
        const ClosestHit hit = original.closest_point(wm.box.center);
        const Vec3 normal = target.face_normals()[hit.face_index];
        const Vec3 offset = normal * (mode == FuseMode::Emboss ? strength : -strength);

        std::string why = "does not intersect the surface";
        bool done = false;
        for (const Vec3& delta : csg_perturbations()) {
            Arrangement arr;
            try {
                arr = build_arrangement(res.mesh, wm.mesh, delta, false);
            } catch (const Error& e) {
                why = e.what();
                continue;
            }
            std::vector<Face> faces, patch;
            std::vector<std::string> labels;
            for (std::size_t i = 0; i < arr.faces[0].size(); ++i) {
                if (arr.inside[0][i]) {
                    patch.push_back(arr.faces[0][i]);
                } else {
                    faces.push_back(arr.faces[0][i]);
                    labels.push_back(res.labels[arr.source[0][i]]);
                }
            }
            if (patch.empty()) {
                why = "does not intersect the surface";
                break;
            }
            lift_patch(arr.vertices, faces, labels, patch, offset, watermark_label(w, "top"),
                       watermark_label(w, "side"));
            Mesh fused = remove_unreferenced_vertices(Mesh(std::move(arr.vertices), std::move(faces)));
            const auto open_edges = boundary_edge_count(fused);
            if (open_edges != 0) {
                why = "fused surface has " + std::to_string(open_edges) + " boundary edges";
                continue;
            }
            res.mesh = std::move(fused);
            res.labels = std::move(labels);
            done = true;
            break;
        }
        if (done) {
            res.fused.push_back(w);
        } else {
            res.skipped.push_back(w);
            res.warnings.push_back("watermark " + std::to_string(w) + " skipped: " + why);
        }
    }
    res.boundary_edge_count = boundary_edge_count(res.mesh);
    return res;
}

FuseResult flat_union(const Mesh& target, std::span<const PlacedWatermark> watermarks) {
    FuseResult res;
    res.mesh = target;
    res.labels.assign(target.face_count(), "target");
    for (std::size_t w = 0; w < watermarks.size(); ++w) {
        const PlacedWatermark& wm = watermarks[w];
        const Vec3 front = wm.box.front_normal();
        std::vector<std::string> glyph_labels;
        for (const auto& n : wm.mesh.face_normals()) {
            const double c = dot(n, front);
            glyph_labels.push_back(watermark_label(w, c > 0.5 ? "top" : (c < -0.5 ? "bottom" : "side")));
        }
        try {
            CsgResult r = boolean_op(res.mesh, wm.mesh, BoolOp::Union, res.labels, glyph_labels);
            res.mesh = std::move(r.mesh);
            res.labels = std::move(r.provenance_labels);
            res.fused.push_back(w);
        } catch (const Error& e) {
            res.skipped.push_back(w);
            res.warnings.push_back("watermark " + std::to_string(w) + " skipped: " + e.what());
        }
    }
    res.boundary_edge_count = res.mesh.empty() ? 0 : boundary_edge_count(res.mesh);
    return res;
}

std::string write_sidecar(std::span<const std::string> labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out += std::to_string(i);
        out += ' ';
        out += labels[i];
        out += '\n';
    }
    return out;
}

std::vector<std::string> parse_sidecar(std::string_view text, std::size_t face_count) {
    std::vector<std::string> labels(face_count);
    std::vector<bool> seen(face_count, false);
    std::size_t line_no = 0, pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        std::istringstream ss{std::string(line)};
        long long idx = -1;
        std::string label, extra;
        if (!(ss >> idx >> label) || (ss >> extra))
            throw SidecarError("sidecar line " + std::to_string(line_no) + ": expected 'face_index label'");
        if (idx < 0 || static_cast<std::size_t>(idx) >= face_count)
            throw SidecarError("sidecar line " + std::to_string(line_no) + ": face index " + std::to_string(idx) +
                               " out of range");
        const auto u = static_cast<std::size_t>(idx);
        if (seen[u]) throw SidecarError("sidecar line " + std::to_string(line_no) + ": duplicate face " + std::to_string(idx));
        seen[u] = true;
        labels[u] = std::move(label);
    }
    for (std::size_t i = 0; i < face_count; ++i)
        if (!seen[i]) throw SidecarError("sidecar has no label for face " + std::to_string(i));
    return labels;
}

std::vector<std::string> read_sidecar_file(const std::string& path, std::size_t face_count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_sidecar(ss.str(), face_count);
}

void write_sidecar_file(std::span<const std::string> labels, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
    out << write_sidecar(labels);
    if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
}

}  // namespace wmark
