#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wmark/emboss.hpp"
#include "wmark/filtering.hpp"
#include "wmark/placement.hpp"

namespace wmark {

struct PipelineConfig {
    std::string input_path;
    std::string output_path;
    std::string text = "watermark";
    double size = 4.0;
    double thickness = 0.5;
    double model_scale = 30.0;
    std::size_t H_s = 300;
    double H_r = 1.0;
    std::size_t J = 179;
    std::size_t steps = 200;
    double stop_loss = 0.005;
    double learning_rate = 0.05;
    double loss_threshold = 0.005;
    double roughness_threshold = 1.25;
    double angle_increment = 30.0;
    double extrude_strength = 0.05;
    std::string mode = "emboss";
    std::uint64_t seed = 42;
    std::size_t vertex_cap = 80000;

    /// Throws ConfigError on a non-positive number or an unknown mode.
    void validate() const;
    std::string to_json() const;
    /// Overrides fields present in the JSON object; unknown keys are errors.
    void merge_json(const std::string& json_text);
};

struct StageTimings {
    std::vector<std::pair<std::string, double>> seconds;
};

struct PipelineResult {
    Mesh normalized;                 // input in the normalized frame
    Similarity normalization;
    std::size_t work_vertex_count = 0;  // after the vertex cap
    std::vector<CandidateBox> candidates;  // optimized
    CascadeTrace trace;
    std::vector<CandidateBox> selected;
    FuseResult fused;
    StageTimings timings;

    /// Boxes of the watermarks that were fused into the output.
    std::vector<BoxGeom> fused_boxes() const;
    std::string manifest_json(const PipelineConfig& cfg, bool with_timings) const;
};

/// Normalize, place, filter and fuse. Throws on failure.
PipelineResult run_pipeline(const Mesh& input, const PipelineConfig& cfg);

/// Default side-file paths next to the watermarked OBJ.
std::string sidecar_path_for(const std::string& output_path);
std::string manifest_path_for(const std::string& output_path);

/// Boxes and normalization recorded in a manifest.
struct ManifestInfo {
    Similarity normalization;
    std::vector<BoxGeom> boxes;
};
ManifestInfo parse_manifest(const std::string& json_text);

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitIo = 2, kExitPipeline = 3, kExitSidecar = 4 };

int cmd_watermark(const PipelineConfig& cfg, bool timings, std::ostream& out, std::ostream& err);

struct EvaluateArgs {
    std::string original_path, watermarked_path, sidecar_path, manifest_path, report_path;
    bool require_lce = false;
    bool normalize_original = false;
    double model_scale = 30.0;
    EvaluateOptions options;
};
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);

struct AttackArgs {
    std::string input_path, sidecar_path, output_path, output_sidecar_path;
    std::string kind;  // crop | removal
    std::optional<Vec3> plane_point, plane_normal;
    std::optional<double> fraction;
    Vec3 axis{1, 0, 0};
};
int cmd_attack(const AttackArgs& args, std::ostream& out, std::ostream& err);

/// Full command line (argv[0] is the program name).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wmark
