#pragma once

#include <array>
#include <string>
#include <vector>

#include "wmark/mesh.hpp"

namespace wmark {

/// Box with arbitrary orientation. Column 2 of `rotation` is the front normal.
struct BoxGeom {
    Vec3 center;
    Vec3 half_extents{0.5, 0.5, 0.5};
    Mat3 rotation = Mat3::identity();

    Vec3 axis(int i) const { return rotation.column(i); }
    Vec3 front_normal() const { return rotation.column(2); }
    Vec3 to_local(const Vec3& p) const { return rotation.transposed() * (p - center); }
    Vec3 to_world(const Vec3& local) const { return rotation * local + center; }
    bool contains(const Vec3& p, double slack = 1e-9) const;
    double front_area() const { return 4.0 * half_extents.x * half_extents.y; }
    double volume() const { return 8.0 * half_extents.x * half_extents.y * half_extents.z; }

    /// Front corners t1..t4 (counter-clockwise seen from the front), then the
    /// matching back corners b1..b4.
    std::array<Vec3, 8> corners() const;
};

/// Separating-axis test for two oriented boxes (touching counts as overlap).
bool boxes_overlap(const BoxGeom& a, const BoxGeom& b);

/// Watermark text and glyph dimensions.
///
/// `size` is the scale of the text mesh: its largest in-plane extent. For a
/// single tall character that is the glyph height.
struct WatermarkSpec {
    std::string text = "watermark";
    double size = 4.0;
    double thickness = 0.5;
};

struct Rect2 {
    double x0, y0, x1, y1;
};

/// Characters the embedded block font can render (letters are case-folded).
bool glyph_supported(char c);

/// Uppercased, trimmed text; throws ConfigError for an empty string or for
/// characters outside the font (all of them are listed in the message).
std::string validate_watermark_text(const std::string& text);

/// Filled font cells of the laid-out text in the glyph's local XY frame.
std::vector<Rect2> glyph_cells(const WatermarkSpec& spec);

/// Number of characters that produce geometry (spaces do not).
std::size_t glyph_count(const WatermarkSpec& spec);

/// Closed, outward-oriented text mesh centered at the origin, front face
/// toward +Z, one disjoint prism per character.
Mesh text_to_3d(const WatermarkSpec& spec);

/// Axis-aligned box of a mesh generated at the origin facing +Z.
BoxGeom oriented_bounding_box(const Mesh& mesh);

}  // namespace wmark
