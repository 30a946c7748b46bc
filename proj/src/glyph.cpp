#include "wmark/glyph.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace wmark {

bool BoxGeom::contains(const Vec3& p, double slack) const {
    const Vec3 l = to_local(p);
    return std::abs(l.x) <= half_extents.x + slack && std::abs(l.y) <= half_extents.y + slack &&
           std::abs(l.z) <= half_extents.z + slack;
}

std::array<Vec3, 8> BoxGeom::corners() const {
    const Vec3& h = half_extents;
    const std::array<Vec3, 4> xy{Vec3{-h.x, -h.y, 0}, Vec3{h.x, -h.y, 0}, Vec3{h.x, h.y, 0}, Vec3{-h.x, h.y, 0}};
    std::array<Vec3, 8> out;
    for (std::size_t i = 0; i < 4; ++i) {
        out[i] = to_world(xy[i] + Vec3{0, 0, h.z});
        out[i + 4] = to_world(xy[i] - Vec3{0, 0, h.z});
    }
    return out;
}

bool boxes_overlap(const BoxGeom& a, const BoxGeom& b) {
    std::array<Vec3, 15> axes;
    std::size_t n = 0;
    for (int i = 0; i < 3; ++i) axes[n++] = a.axis(i);
    for (int i = 0; i < 3; ++i) axes[n++] = b.axis(i);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const Vec3 c = cross(a.axis(i), b.axis(j));
            if (squared_norm(c) > 1e-18) axes[n++] = normalized(c);
        }
    const Vec3 d = b.center - a.center;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec3& ax = axes[k];
        double ra = 0.0, rb = 0.0;
        for (int i = 0; i < 3; ++i) {
            ra += a.half_extents[static_cast<std::size_t>(i)] * std::abs(dot(a.axis(i), ax));
            rb += b.half_extents[static_cast<std::size_t>(i)] * std::abs(dot(b.axis(i), ax));
        }
        if (std::abs(dot(d, ax)) > ra + rb) return false;
    }
    return true;
}

namespace {

constexpr int kCols = 5;
constexpr int kRows = 7;
// 15% of the glyph width
constexpr double kSpacing = 0.15 * kCols;

using Bitmap = std::array<const char*, kRows>;

// Block font: every glyph is one 4-connected set of cells and never has two
// cells touching only at a corner, so each character extrudes to a manifold
// closed prism.
const std::map<char, Bitmap>& font() {
    static const std::map<char, Bitmap> table{
        {'A', {"#####", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"}},
        {'B', {"####.", "#..#.", "#..#.", "#####", "#...#", "#...#", "#####"}},
        {'C', {"#####", "#....", "#....", "#....", "#....", "#....", "#####"}},
        {'D', {"####.", "#..##", "#...#", "#...#", "#...#", "#..##", "####."}},
        {'E', {"#####", "#....", "#....", "####.", "#....", "#....", "#####"}},
        {'F', {"#####", "#....", "#....", "####.", "#....", "#....", "#...."}},
        {'G', {"#####", "#....", "#....", "#..##", "#...#", "#...#", "#####"}},
        {'H', {"#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"}},
        {'I', {".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."}},
        {'J', {"....#", "....#", "....#", "....#", "#...#", "#...#", "#####"}},
        {'K', {"#...#", "#..##", "#.##.", "###..", "#.##.", "#..##", "#...#"}},
        {'L', {"#....", "#....", "#....", "#....", "#....", "#....", "#####"}},
        {'M', {"#####", "#.#.#", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"}},
        {'N', {"#...#", "##..#", "###.#", "#.###", "#..##", "#...#", "#...#"}},
        {'O', {"#####", "#...#", "#...#", "#...#", "#...#", "#...#", "#####"}},
        {'P', {"#####", "#...#", "#...#", "#####", "#....", "#....", "#...."}},
        {'Q', {"#####", "#...#", "#...#", "#...#", "#..##", "#####", "....#"}},
        {'R', {"#####", "#...#", "#...#", "#####", "#.##.", "#..##", "#...#"}},
        {'S', {"#####", "#....", "#....", "#####", "....#", "....#", "#####"}},
        {'T', {"#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."}},
        {'U', {"#...#", "#...#", "#...#", "#...#", "#...#", "#...#", "#####"}},
        {'V', {"#...#", "#...#", "#...#", "#...#", "##.##", ".###.", "..#.."}},
        {'W', {"#...#", "#...#", "#...#", "#.#.#", "#.#.#", "#.#.#", "#####"}},
        {'X', {"#...#", "##.##", ".###.", "..#..", ".###.", "##.##", "#...#"}},
        {'Y', {"#...#", "#...#", "##.##", ".###.", "..#..", "..#..", "..#.."}},
        {'Z', {"#####", "...##", "..##.", ".##..", "##...", "#....", "#####"}},
        {'0', {"#####", "#...#", "#..##", "#...#", "##..#", "#...#", "#####"}},
        {'1', {".##..", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."}},
        {'2', {"#####", "....#", "....#", "#####", "#....", "#....", "#####"}},
        {'3', {"#####", "....#", "....#", ".####", "....#", "....#", "#####"}},
        {'4', {"#...#", "#...#", "#...#", "#####", "....#", "....#", "....#"}},
        {'5', {"#####", "#....", "#....", "#####", "....#", "....#", "#####"}},
        {'6', {"#####", "#....", "#....", "#####", "#...#", "#...#", "#####"}},
        {'7', {"#####", "....#", "....#", "...##", "...#.", "...#.", "...#."}},
        {'8', {"#####", "#...#", "#...#", "#####", "#...#", "#...#", "#####"}},
        {'9', {"#####", "#...#", "#...#", "#####", "....#", "....#", "#####"}},
    };
    return table;
}

// Unsupported code points are reported as whole UTF-8 sequences.
std::vector<std::string> unsupported_chars(const std::string& text) {
    std::vector<std::string> bad;
    for (std::size_t i = 0; i < text.size();) {
        const auto c = static_cast<unsigned char>(text[i]);
        std::size_t len = 1;
        if (c >= 0xF0) len = 4;
        else if (c >= 0xE0) len = 3;
        else if (c >= 0xC0) len = 2;
        len = std::min(len, text.size() - i);
        const std::string ch = text.substr(i, len);
        if (len > 1 || !glyph_supported(static_cast<char>(c)))
            if (std::find(bad.begin(), bad.end(), ch) == bad.end()) bad.push_back(ch);
        i += len;
    }
    return bad;
}

struct Layout {
    std::string text;
    double scale = 1.0;
    Vec3 offset;  // added after scaling
};

Layout layout_for(const WatermarkSpec& spec) {
    if (!(spec.size > 0.0)) throw ConfigError("watermark size must be positive");
    if (!(spec.thickness > 0.0)) throw ConfigError("watermark thickness must be positive");
    Layout l;
    l.text = validate_watermark_text(spec.text);
    // bounding box of the filled cells in font units
    double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
    double pen = 0.0;
    for (char ch : l.text) {
        if (ch != ' ') {
            const Bitmap& bm = font().at(ch);
            for (int r = 0; r < kRows; ++r)
                for (int c = 0; c < kCols; ++c)
                    if (bm[static_cast<std::size_t>(r)][c] == '#') {
                        xmin = std::min(xmin, pen + c);
                        xmax = std::max(xmax, pen + c + 1);
                        ymin = std::min(ymin, double(kRows - 1 - r));
                        ymax = std::max(ymax, double(kRows - r));
                    }
        }
        pen += kCols + kSpacing;
    }
    l.scale = spec.size / std::max(xmax - xmin, ymax - ymin);
    l.offset = {-0.5 * (xmin + xmax) * l.scale, -0.5 * (ymin + ymax) * l.scale, 0.0};
    return l;
}

template <typename CellFn>
void for_each_cell(const Layout& l, CellFn&& fn) {
    double pen = 0.0;
    int char_index = 0;
    for (char ch : l.text) {
        if (ch != ' ') {
            fn(char_index, font().at(ch), pen);
            ++char_index;
        }
        pen += kCols + kSpacing;
    }
}

}  // namespace

bool glyph_supported(char c) {
    if (c == ' ') return true;
    const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return font().count(u) != 0;
}

std::string validate_watermark_text(const std::string& text) {
    const auto bad = unsupported_chars(text);
    if (!bad.empty()) {
        std::string msg = "unsupported watermark character(s):";
        for (const auto& b : bad) msg += " '" + b + "'";
        throw ConfigError(msg);
    }
    std::string out;
    for (char c : text) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const auto first = out.find_first_not_of(' ');
    if (first == std::string::npos) throw ConfigError("watermark text is empty");
    const auto last = out.find_last_not_of(' ');
    return out.substr(first, last - first + 1);
}

std::vector<Rect2> glyph_cells(const WatermarkSpec& spec) {
    const Layout l = layout_for(spec);
    std::vector<Rect2> cells;
    for_each_cell(l, [&](int, const Bitmap& bm, double pen) {
        for (int r = 0; r < kRows; ++r)
            for (int c = 0; c < kCols; ++c)
                if (bm[static_cast<std::size_t>(r)][c] == '#') {
                    const double x0 = (pen + c) * l.scale + l.offset.x;
                    const double y0 = (kRows - 1 - r) * l.scale + l.offset.y;
                    cells.push_back({x0, y0, x0 + l.scale, y0 + l.scale});
                }
    });
    return cells;
}

std::size_t glyph_count(const WatermarkSpec& spec) {
    const auto text = validate_watermark_text(spec.text);
    return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) { return c != ' '; }));
}

Mesh text_to_3d(const WatermarkSpec& spec) {
    const Layout l = layout_for(spec);
    const double hz = 0.5 * spec.thickness;
    std::vector<Vec3> verts;
    std::vector<Face> faces;
    for_each_cell(l, [&](int, const Bitmap& bm, double pen) {
        auto filled = [&](int c, int r) {
            return c >= 0 && c < kCols && r >= 0 && r < kRows && bm[static_cast<std::size_t>(r)][c] == '#';
        };
        // grid corner (gx, gy) with gy counted upward; one index per side
        std::map<std::array<int, 3>, std::uint32_t> ids;
        auto vid = [&](int gx, int gy, int side) {
            auto [it, inserted] = ids.try_emplace({gx, gy, side}, static_cast<std::uint32_t>(verts.size()));
            if (inserted)
                verts.push_back({(pen + gx) * l.scale + l.offset.x, gy * l.scale + l.offset.y,
                                 side == 0 ? hz : -hz});
            return it->second;
        };
        for (int r = 0; r < kRows; ++r)
            for (int c = 0; c < kCols; ++c) {
                if (!filled(c, r)) continue;
                const int y0 = kRows - 1 - r, y1 = y0 + 1, x0 = c, x1 = c + 1;
                faces.push_back({vid(x0, y0, 0), vid(x1, y0, 0), vid(x1, y1, 0)});
                faces.push_back({vid(x0, y0, 0), vid(x1, y1, 0), vid(x0, y1, 0)});
                faces.push_back({vid(x0, y0, 1), vid(x1, y1, 1), vid(x1, y0, 1)});
                faces.push_back({vid(x0, y0, 1), vid(x0, y1, 1), vid(x1, y1, 1)});
                // walls along counter-clockwise boundary edges p -> q
                auto wall = [&](int px, int py, int qx, int qy) {
                    const auto pf = vid(px, py, 0), pb = vid(px, py, 1);
                    const auto qf = vid(qx, qy, 0), qb = vid(qx, qy, 1);
                    faces.push_back({pf, pb, qb});
                    faces.push_back({pf, qb, qf});
                };
                if (!filled(c, r + 1)) wall(x0, y0, x1, y0);  // bottom
                if (!filled(c + 1, r)) wall(x1, y0, x1, y1);  // right
                if (!filled(c, r - 1)) wall(x1, y1, x0, y1);  // top
                if (!filled(c - 1, r)) wall(x0, y1, x0, y0);  // left
            }
    });
    return Mesh(std::move(verts), std::move(faces));
}

BoxGeom oriented_bounding_box(const Mesh& mesh) {
    if (mesh.empty()) throw EmptyMeshError();
    const Aabb b = mesh.bounds();
    BoxGeom g;
    g.center = b.center();
    g.half_extents = b.extent() * 0.5;
    g.rotation = Mat3::identity();
    return g;
}

}  // namespace wmark
