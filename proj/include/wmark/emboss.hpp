#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wmark/csg.hpp"
#include "wmark/glyph.hpp"
#include "wmark/mesh.hpp"

namespace wmark {

enum class FuseMode { Emboss, Deboss };

/// A glyph mesh already posed in the target's frame, plus its box.
struct PlacedWatermark {
    Mesh mesh;
    BoxGeom box;
};

struct FuseResult {
    Mesh mesh;
    std::vector<std::string> labels;  // per face
    std::size_t boundary_edge_count = 0;
    std::vector<std::size_t> fused;    // watermark indices that made it in
    std::vector<std::size_t> skipped;  // and those that did not
    std::vector<std::string> warnings;
};

/// Labels: "target", "watermark_<i>_top", "watermark_<i>_side" (and
/// "watermark_<i>_bottom" for flat glyph unions).
std::string watermark_label(std::size_t index, const std::string& part);

struct LabelInfo {
    std::size_t index = 0;
    std::string part;
};
/// Parsed watermark label, or nullopt for target faces / unknown tags.
std::optional<LabelInfo> parse_watermark_label(const std::string& label);
bool is_watermark_label(const std::string& label);

/// Closed solid swept from an open surface patch: the patch itself
/// (reversed) as the bottom, the patch moved by distance * direction as the
/// top, and walls along its boundary.
Mesh extrude_along(const Mesh& patch, const Vec3& direction, double distance);

/// Curve-matching fusion. For every watermark, the part of the (current)
/// target surface inside the glyph solid is lifted by `strength` along the
/// target normal nearest the glyph centre (sunk for deboss) and joined to the
/// rest of the surface by side walls. Equivalent to union / difference with
/// the extruded intersection patch, but never creates coplanar contacts.
/// Watermarks that do not touch the surface are skipped with a warning.
FuseResult curve_matching_fuse(const Mesh& target, std::span<const PlacedWatermark> watermarks, double strength,
                               FuseMode mode = FuseMode::Emboss);

/// Plain boolean union of the glyph solids onto the target, no curve matching.
FuseResult flat_union(const Mesh& target, std::span<const PlacedWatermark> watermarks);

/// Sidecar text: one `face_index label` line per face.
std::string write_sidecar(std::span<const std::string> labels);
/// Throws SidecarError unless every face in [0, face_count) appears exactly once.
std::vector<std::string> parse_sidecar(std::string_view text, std::size_t face_count);
std::vector<std::string> read_sidecar_file(const std::string& path, std::size_t face_count);
void write_sidecar_file(std::span<const std::string> labels, const std::string& path);

}  // namespace wmark
