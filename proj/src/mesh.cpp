#include "wmark/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace wmark {

Mesh::Mesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
    const auto n = vertices_.size();
    for (std::size_t f = 0; f < faces_.size(); ++f)
        for (auto idx : faces_[f])
            if (idx >= n)
                throw StructureError("face " + std::to_string(f) + " references vertex " +
                                     std::to_string(idx) + " but mesh has " + std::to_string(n) +
                                     " vertices");

    face_normals_.resize(faces_.size());
    face_areas_.resize(faces_.size());
    std::vector<Vec3> accum(n);
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        const auto [a, b, c] = triangle(f);
        const Vec3 cr = cross(b - a, c - a);
        const double len = norm(cr);
        face_areas_[f] = 0.5 * len;
        face_normals_[f] = len > 0.0 ? cr / len : Vec3{};
        for (auto idx : faces_[f]) accum[idx] += cr;
    }
    vertex_normals_.resize(n);
    degenerate_normal_.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        const double len = norm(accum[v]);
        if (len > 0.0) {
            vertex_normals_[v] = accum[v] / len;
        } else {
            degenerate_normal_[v] = 1;
        }
    }
}

Aabb Mesh::bounds() const {
    Aabb box;
    for (const auto& v : vertices_) box.expand(v);
    return box;
}

double Mesh::total_area() const {
    double s = 0.0;
    for (double a : face_areas_) s += a;
    return s;
}

double Mesh::signed_volume() const {
    double s = 0.0;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        const auto [a, b, c] = triangle(f);
        s += dot(a, cross(b, c));
    }
    return s / 6.0;
}

Vec3 Mesh::vertex_centroid() const {
    Vec3 c;
    for (const auto& v : vertices_) c += v;
    return vertices_.empty() ? c : c / static_cast<double>(vertices_.size());
}

Mesh Mesh::transformed(const Mat3& rotation, const Vec3& translation) const {
    std::vector<Vec3> out;
    out.reserve(vertices_.size());
    for (const auto& v : vertices_) out.push_back(rotation * v + translation);
    return Mesh(std::move(out), faces_);
}

Mesh Mesh::scaled_translated(double scale, const Vec3& translation) const {
    std::vector<Vec3> out;
    out.reserve(vertices_.size());
    for (const auto& v : vertices_) out.push_back(v * scale + translation);
    return Mesh(std::move(out), faces_);
}

Mesh Mesh::flipped() const {
    std::vector<Face> out = faces_;
    for (auto& f : out) std::swap(f[1], f[2]);
    return Mesh(vertices_, std::move(out));
}

Mesh merge(std::span<const Mesh> meshes) {
    std::vector<Vec3> verts;
    std::vector<Face> faces;
    for (const auto& m : meshes) {
        const auto offset = static_cast<std::uint32_t>(verts.size());
        verts.insert(verts.end(), m.vertices().begin(), m.vertices().end());
        for (const auto& f : m.faces()) faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
    }
    return Mesh(std::move(verts), std::move(faces));
}

// --- OBJ -----------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

double parse_double(std::string_view tok, std::size_t line) {
    double v = 0.0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw ParseError(line, "invalid number '" + std::string(tok) + "'");
    return v;
}

long long parse_index(std::string_view tok, std::size_t line) {
    const auto slash = tok.find('/');
    const auto head = tok.substr(0, slash);
    long long v = 0;
    const auto* end = head.data() + head.size();
    auto [ptr, ec] = std::from_chars(head.data(), end, v);
    if (head.empty() || ec != std::errc() || ptr != end || v == 0)
        throw ParseError(line, "invalid face index '" + std::string(tok) + "'");
    return v;
}

}  // namespace

Mesh parse_obj(std::string_view text) {
    std::vector<Vec3> verts;
    std::vector<Face> faces;
    std::vector<std::size_t> face_lines;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    std::vector<long long> poly;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto toks = split_ws(line);
        const auto key = toks.front();
        if (key == "v") {
            if (toks.size() < 4) throw ParseError(line_no, "vertex needs 3 coordinates");
            verts.push_back({parse_double(toks[1], line_no), parse_double(toks[2], line_no),
                             parse_double(toks[3], line_no)});
        } else if (key == "f") {
            if (toks.size() < 4) throw ParseError(line_no, "face needs at least 3 indices");
            poly.clear();
            for (std::size_t i = 1; i < toks.size(); ++i) {
                long long idx = parse_index(toks[i], line_no);
                // negative indices are relative to the vertices read so far
                if (idx < 0) idx = static_cast<long long>(verts.size()) + idx + 1;
                if (idx <= 0) throw StructureError("line " + std::to_string(line_no) + ": face index out of range");
                poly.push_back(idx - 1);
            }
            for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
                faces.push_back({static_cast<std::uint32_t>(poly[0]), static_cast<std::uint32_t>(poly[i]),
                                 static_cast<std::uint32_t>(poly[i + 1])});
                face_lines.push_back(line_no);
            }
        } else if (key == "vt" || key == "vn" || key == "vp" || key == "g" || key == "o" || key == "s" ||
                   key == "usemtl" || key == "mtllib" || key == "l") {
            continue;
        } else {
            throw ParseError(line_no, "unsupported statement '" + std::string(key) + "'");
        }
    }
    if (verts.empty()) throw EmptyMeshError();
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (auto idx : faces[f])
            if (idx >= verts.size())
                throw StructureError("line " + std::to_string(face_lines[f]) + ": face index " +
                                     std::to_string(idx + 1) + " out of range (" +
                                     std::to_string(verts.size()) + " vertices)");
    return Mesh(std::move(verts), std::move(faces));
}

Mesh read_obj_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_obj(ss.str());
}

namespace {
void append_double(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}
}  // namespace

std::string write_obj(const Mesh& mesh) {
    if (mesh.empty()) throw EmptyMeshError("refusing to write an empty mesh");
    std::string out;
    out.reserve(mesh.vertex_count() * 40 + mesh.face_count() * 24);
    for (const auto& v : mesh.vertices()) {
        out += "v ";
        append_double(out, v.x);
        out += ' ';
        append_double(out, v.y);
        out += ' ';
        append_double(out, v.z);
        out += '\n';
    }
    for (const auto& f : mesh.faces()) {
        out += "f ";
        out += std::to_string(f[0] + 1);
        out += ' ';
        out += std::to_string(f[1] + 1);
        out += ' ';
        out += std::to_string(f[2] + 1);
        out += '\n';
    }
    return out;
}

void write_obj_file(const Mesh& mesh, const std::string& path) {
    const auto text = write_obj(mesh);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::ios_base::failure("write failed for '" + path + "'");
}

// --- normalization ---------------------------------------------------------

Similarity normalization_for(const Mesh& mesh, double target_size) {
    if (mesh.empty()) throw EmptyMeshError();
    const Aabb box = mesh.bounds();
    const Vec3 e = box.extent();
    const double largest = std::max({e.x, e.y, e.z});
    if (!(largest > 0.0)) throw GeometryError("mesh has zero extent; cannot normalize");
    Similarity s;
    s.scale = target_size / largest;
    s.translation = -(mesh.vertex_centroid() * s.scale);
    return s;
}

Mesh normalize_model(const Mesh& mesh, double target_size) {
    const Similarity s = normalization_for(mesh, target_size);
    return mesh.scaled_translated(s.scale, s.translation);
}

// --- sampling ----------------------------------------------------------------

std::vector<SurfacePoint> surface_sample(const Mesh& mesh, std::size_t count, std::uint64_t seed) {
    std::vector<SurfacePoint> out;
    if (count == 0) return out;
    std::vector<double> cdf(mesh.face_count());
    double acc = 0.0;
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        acc += mesh.face_areas()[f];
        cdf[f] = acc;
    }
    if (!(acc > 0.0)) throw GeometryError("cannot sample a surface with zero total area");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double r = uni(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
        if (it == cdf.end()) --it;
        const auto f = static_cast<std::size_t>(it - cdf.begin());
        const double r1 = std::sqrt(uni(rng));
        const double r2 = uni(rng);
        const double a = 1.0 - r1, b = r1 * (1.0 - r2), c = r1 * r2;
        const auto [p0, p1, p2] = mesh.triangle(f);
        out.push_back({p0 * a + p1 * b + p2 * c, mesh.face_normals()[f], static_cast<std::uint32_t>(f)});
    }
    return out;
}

// --- simplification --------------------------------------------------------

namespace {

Mesh cluster_once(const Mesh& mesh, double cell) {
    const Aabb box = mesh.bounds();
    std::unordered_map<std::uint64_t, std::uint32_t> cell_id;
    std::vector<Vec3> sums;
    std::vector<std::uint32_t> counts;
    std::vector<std::uint32_t> remap(mesh.vertex_count());
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        const Vec3 q = (mesh.vertex(v) - box.lo) / cell;
        const auto ix = static_cast<std::uint64_t>(q.x), iy = static_cast<std::uint64_t>(q.y),
                   iz = static_cast<std::uint64_t>(q.z);
        const std::uint64_t key = (ix << 42) ^ (iy << 21) ^ iz;
        auto [it, inserted] = cell_id.try_emplace(key, static_cast<std::uint32_t>(sums.size()));
        if (inserted) {
            sums.emplace_back();
            counts.push_back(0);
        }
        sums[it->second] += mesh.vertex(v);
        ++counts[it->second];
        remap[v] = it->second;
    }
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] /= static_cast<double>(counts[i]);
    std::vector<Face> faces;
    std::unordered_set<std::uint64_t> seen;
    for (const auto& f : mesh.faces()) {
        Face g{remap[f[0]], remap[f[1]], remap[f[2]]};
        if (g[0] == g[1] || g[1] == g[2] || g[0] == g[2]) continue;
        std::array<std::uint32_t, 3> s = g;
        std::sort(s.begin(), s.end());
        const std::uint64_t key = (std::uint64_t{s[0]} << 42) ^ (std::uint64_t{s[1]} << 21) ^ s[2];
        if (!seen.insert(key).second) continue;
        faces.push_back(g);
    }
    return Mesh(std::move(sums), std::move(faces));
}

}  // namespace

Mesh decimate_vertex_clustering(const Mesh& mesh, std::size_t max_vertices) {
    if (mesh.vertex_count() <= max_vertices) return mesh;
    const Vec3 e = mesh.bounds().extent();
    const double diag = norm(e);
    // start near the cell size that would give max_vertices on a closed surface
    double cell = diag * std::sqrt(2.0 / static_cast<double>(max_vertices));
    for (int iter = 0; iter < 64; ++iter) {
        Mesh out = cluster_once(mesh, cell);
        if (out.vertex_count() <= max_vertices) return out;
        cell *= 1.15;
    }
    throw GeometryError("vertex clustering failed to reach the vertex cap");
}

}  // namespace wmark
