#include <CLI11.hpp>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "wmark/attacks.hpp"
#include "wmark/error.hpp"
#include "wmark/metrics.hpp"
#include "wmark/pipeline.hpp"
#include "wmark/topology.hpp"

namespace wmark {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::ios_base::failure("cannot write '" + path + "'");
}

// Input OBJ failures (open or parse) are I/O class errors.
Mesh load_mesh(const std::string& path) { return read_obj_file(path); }

}  // namespace

int cmd_watermark(const PipelineConfig& cfg, bool timings, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (cfg.input_path.empty() || cfg.output_path.empty()) {
        err << "error: input and output paths are required\n";
        return kExitUsage;
    }
    Mesh input;
    try {
        input = load_mesh(cfg.input_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    PipelineResult r;
    try {
        r = run_pipeline(input, cfg);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitPipeline;
    }
    for (const auto& w : r.fused.warnings) err << "warning: " << w << "\n";
    try {
        write_obj_file(r.fused.mesh, cfg.output_path);
        write_sidecar_file(r.fused.labels, sidecar_path_for(cfg.output_path));
        spit(manifest_path_for(cfg.output_path), r.manifest_json(cfg, timings));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    out << "candidates " << r.candidates.size() << ", selected " << r.selected.size() << ", fused "
        << r.fused.fused.size() << "\n";
    if (timings)
        for (const auto& [name, s] : r.timings.seconds) out << "  " << name << " " << s << " s\n";
    return kExitOk;
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
    Mesh original, marked;
    try {
        original = load_mesh(args.original_path);
        marked = load_mesh(args.watermarked_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    if (args.require_lce && args.sidecar_path.empty()) {
        err << "error: LCE needs a provenance sidecar\n";
        return kExitSidecar;
    }
    std::vector<std::string> labels;
    if (!args.sidecar_path.empty()) {
        try {
            labels = read_sidecar_file(args.sidecar_path, marked.face_count());
        } catch (const std::exception& e) {
            err << "error: sidecar: " << e.what() << "\n";
            return kExitSidecar;
        }
    }
    std::vector<BoxGeom> boxes;
    try {
        if (!args.manifest_path.empty()) {
            const ManifestInfo m = parse_manifest(slurp(args.manifest_path));
            const auto& s = m.normalization;
            original = original.scaled_translated(s.scale, s.translation);
            boxes = m.boxes;
        } else {
            if (args.normalize_original) original = normalize_model(original, args.model_scale);
            if (!labels.empty()) boxes = boxes_from_labels(marked, labels);
        }
    } catch (const std::ios_base::failure& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    MetricsReport rep;
    try {
        rep = evaluate(original, marked, boxes, labels, args.options);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitPipeline;
    }
    if (args.require_lce && !rep.lce) {
        err << "error: no watermark top faces in the sidecar; LCE unavailable\n";
        return kExitSidecar;
    }
    for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
    out << rep.to_table();
    if (!args.report_path.empty()) {
        try {
            spit(args.report_path, rep.to_json());
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return kExitIo;
        }
    }
    return kExitOk;
}

int cmd_attack(const AttackArgs& args, std::ostream& out, std::ostream& err) {
    if (args.kind != "crop" && args.kind != "removal") {
        err << "error: unknown attack kind '" << args.kind << "' (crop or removal)\n";
        return kExitUsage;
    }
    if (args.kind == "crop" && !args.fraction && !(args.plane_point && args.plane_normal)) {
        err << "error: crop needs --fraction or both --plane-point and --plane-normal\n";
        return kExitUsage;
    }
    Mesh mesh;
    try {
        mesh = load_mesh(args.input_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    std::vector<std::string> labels;
    if (args.kind == "removal" && args.sidecar_path.empty()) {
        err << "error: removal needs a provenance sidecar\n";
        return kExitSidecar;
    }
    if (!args.sidecar_path.empty()) {
        try {
            labels = read_sidecar_file(args.sidecar_path, mesh.face_count());
        } catch (const std::exception& e) {
            err << "error: sidecar: " << e.what() << "\n";
            return kExitSidecar;
        }
    }
    AttackResult r;
    try {
        if (args.kind == "removal") r = removal_attack(mesh, labels);
        else if (args.fraction) r = crop_fraction_attack(mesh, labels, *args.fraction, args.axis);
        else r = crop_attack(mesh, labels, Plane{*args.plane_point, *args.plane_normal});
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitPipeline;
    }
    for (const auto& w : r.warnings) err << "warning: " << w << "\n";
    try {
        write_obj_file(r.mesh, args.output_path);
        if (!labels.empty() || !args.output_sidecar_path.empty()) {
            const std::string sc =
                args.output_sidecar_path.empty() ? sidecar_path_for(args.output_path) : args.output_sidecar_path;
            write_sidecar_file(r.labels, sc);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    out << args.kind << ": " << r.mesh.face_count() << " faces, " << boundary_edge_count(r.mesh)
        << " boundary edges\n";
    return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Visible 3D text watermarks for triangle meshes"};
    app.require_subcommand(1);

    // watermark: flags are bound to a scratch config and applied over the
    // config file only when given, so explicit flags win.
    auto* wm = app.add_subcommand("watermark", "embed watermarks into an OBJ");
    PipelineConfig flags;
    std::string config_file;
    bool timings = false;
    std::vector<std::pair<CLI::Option*, std::function<void(PipelineConfig&)>>> overrides;
    auto bind = [&](const std::string& name, auto PipelineConfig::*field, const std::string& help) {
        auto* opt = wm->add_option("--" + name, flags.*field, help);
        overrides.emplace_back(opt, [&flags, field](PipelineConfig& c) { c.*field = flags.*field; });
        return opt;
    };
    bind("input_path", &PipelineConfig::input_path, "input OBJ");
    bind("output_path", &PipelineConfig::output_path, "watermarked OBJ");
    bind("text", &PipelineConfig::text, "watermark text");
    bind("size", &PipelineConfig::size, "text extent");
    bind("thickness", &PipelineConfig::thickness, "glyph thickness");
    bind("model_scale", &PipelineConfig::model_scale, "normalized model size");
    bind("H_s", &PipelineConfig::H_s, "surface samples");
    bind("H_r", &PipelineConfig::H_r, "minimum sample spacing");
    bind("J", &PipelineConfig::J, "probe points per box");
    bind("steps", &PipelineConfig::steps, "optimizer steps");
    bind("stop_loss", &PipelineConfig::stop_loss, "early stop loss");
    bind("learning_rate", &PipelineConfig::learning_rate, "step size");
    bind("loss_threshold", &PipelineConfig::loss_threshold, "loss filter threshold");
    bind("roughness_threshold", &PipelineConfig::roughness_threshold, "roughness filter threshold");
    bind("angle_increment", &PipelineConfig::angle_increment, "view increment in degrees");
    bind("extrude_strength", &PipelineConfig::extrude_strength, "emboss depth");
    bind("mode", &PipelineConfig::mode, "emboss or deboss");
    bind("seed", &PipelineConfig::seed, "random seed");
    bind("vertex_cap", &PipelineConfig::vertex_cap, "decimate above this many vertices");
    wm->add_option("--config", config_file, "JSON config file");
    wm->add_flag("--timings", timings, "record stage timings in the manifest");

    auto* ev = app.add_subcommand("evaluate", "score a watermarked mesh");
    EvaluateArgs ea;
    ev->add_option("--original", ea.original_path, "original OBJ")->required();
    ev->add_option("--watermarked", ea.watermarked_path, "watermarked OBJ")->required();
    ev->add_option("--sidecar", ea.sidecar_path, "provenance sidecar");
    ev->add_option("--manifest", ea.manifest_path, "run manifest (boxes and normalization)");
    ev->add_option("--report", ea.report_path, "JSON report path");
    ev->add_flag("--lce", ea.require_lce, "require local curvature error");
    ev->add_flag("--normalize-original", ea.normalize_original, "normalize the original to --model_scale");
    ev->add_option("--model_scale", ea.model_scale, "normalized model size");
    ev->add_option("--angle_increment", ea.options.view_increment_deg, "view increment in degrees");
    ev->add_option("--rays", ea.options.n_rays, "rays per front face");
    ev->add_option("--samples", ea.options.smse_samples, "surface samples for SMSE");
    ev->add_option("--seed", ea.options.seed, "random seed");

    auto* at = app.add_subcommand("attack", "simulate an attack");
    AttackArgs aa;
    std::vector<double> pp, pn, ax;
    double fraction = 0.0;
    at->add_option("--kind", aa.kind, "crop or removal")->required();
    at->add_option("--input", aa.input_path, "watermarked OBJ")->required();
    at->add_option("--sidecar", aa.sidecar_path, "provenance sidecar");
    at->add_option("--output", aa.output_path, "attacked OBJ")->required();
    at->add_option("--output-sidecar", aa.output_sidecar_path, "filtered sidecar path");
    auto* o_pp = at->add_option("--plane-point", pp, "crop plane point")->expected(3);
    auto* o_pn = at->add_option("--plane-normal", pn, "crop plane normal (that side is cut)")->expected(3);
    auto* o_fr = at->add_option("--fraction", fraction, "volume fraction to cut");
    auto* o_ax = at->add_option("--axis", ax, "cut direction for --fraction")->expected(3);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    if (wm->parsed()) {
        PipelineConfig cfg;
        if (!config_file.empty()) {
            try {
                cfg.merge_json(slurp(config_file));
            } catch (const std::ios_base::failure& e) {
                err << "error: " << e.what() << "\n";
                return kExitIo;
            } catch (const std::exception& e) {
                err << "error: " << e.what() << "\n";
                return kExitUsage;
            }
        }
        for (auto& [opt, apply] : overrides)
            if (opt->count() > 0) apply(cfg);
        return cmd_watermark(cfg, timings, out, err);
    }
    if (ev->parsed()) return cmd_evaluate(ea, out, err);

    if (o_pp->count()) aa.plane_point = Vec3{pp[0], pp[1], pp[2]};
    if (o_pn->count()) aa.plane_normal = Vec3{pn[0], pn[1], pn[2]};
    if (o_fr->count()) aa.fraction = fraction;
    if (o_ax->count()) aa.axis = Vec3{ax[0], ax[1], ax[2]};
    return cmd_attack(aa, out, err);
}

}  // namespace wmark
