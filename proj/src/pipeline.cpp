#include "wmark/pipeline.hpp"

#include <chrono>
#include <nlohmann/json.hpp>

#include "wmark/topology.hpp"

namespace wmark {

using nlohmann::json;

void PipelineConfig::validate() const {
    auto pos = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
    };
    pos(size, "size");
    pos(thickness, "thickness");
    pos(model_scale, "model_scale");
    pos(static_cast<double>(H_s), "H_s");
    pos(H_r, "H_r");
    if (J < 4) throw ConfigError("J must be at least 4");
    pos(static_cast<double>(steps), "steps");
    pos(stop_loss, "stop_loss");
    pos(learning_rate, "learning_rate");
    pos(loss_threshold, "loss_threshold");
    pos(roughness_threshold, "roughness_threshold");
    pos(angle_increment, "angle_increment");
    const double turns = 360.0 / angle_increment;
    if (std::abs(turns - std::round(turns)) > 1e-9) throw ConfigError("angle_increment must divide 360");
    pos(extrude_strength, "extrude_strength");
    pos(static_cast<double>(vertex_cap), "vertex_cap");
    if (mode != "emboss" && mode != "deboss") throw ConfigError("mode must be 'emboss' or 'deboss'");
}

namespace {

json config_json(const PipelineConfig& c) {
    return json{{"input_path", c.input_path},
                {"output_path", c.output_path},
                {"text", c.text},
                {"size", c.size},
                {"thickness", c.thickness},
                {"model_scale", c.model_scale},
                {"H_s", c.H_s},
                {"H_r", c.H_r},
                {"J", c.J},
                {"steps", c.steps},
                {"stop_loss", c.stop_loss},
                {"learning_rate", c.learning_rate},
                {"loss_threshold", c.loss_threshold},
                {"roughness_threshold", c.roughness_threshold},
                {"angle_increment", c.angle_increment},
                {"extrude_strength", c.extrude_strength},
                {"mode", c.mode},
                {"seed", c.seed},
                {"vertex_cap", c.vertex_cap}};
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 json_vec(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ConfigError("expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string PipelineConfig::to_json() const { return config_json(*this).dump(2) + "\n"; }

void PipelineConfig::merge_json(const std::string& text_in) {
    json j;
    try {
        j = json::parse(text_in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const json& v = it.value();
        try {
            auto uint = [&](auto& field) {
                if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(k + " must be a nonnegative integer");
                field = v.get<std::remove_reference_t<decltype(field)>>();
            };
            auto num = [&](double& field) {
                if (!v.is_number()) throw ConfigError(k + " must be a number");
                field = v.get<double>();
            };
            auto str = [&](std::string& field) {
                if (!v.is_string()) throw ConfigError(k + " must be a string");
                field = v.get<std::string>();
            };
            if (k == "input_path") str(input_path);
            else if (k == "output_path") str(output_path);
            else if (k == "text") str(text);
            else if (k == "size") num(size);
            else if (k == "thickness") num(thickness);
            else if (k == "model_scale") num(model_scale);
            else if (k == "H_s") uint(H_s);
            else if (k == "H_r") num(H_r);
            else if (k == "J") uint(J);
            else if (k == "steps") uint(steps);
            else if (k == "stop_loss") num(stop_loss);
            else if (k == "learning_rate") num(learning_rate);
            else if (k == "loss_threshold") num(loss_threshold);
            else if (k == "roughness_threshold") num(roughness_threshold);
            else if (k == "angle_increment") num(angle_increment);
            else if (k == "extrude_strength") num(extrude_strength);
            else if (k == "mode") str(mode);
            else if (k == "seed") uint(seed);
            else if (k == "vertex_cap") uint(vertex_cap);
            else throw ConfigError("unknown config field '" + k + "'");
        } catch (const json::exception& e) {
            throw ConfigError("config field '" + k + "': " + e.what());
        }
    }
}

std::vector<BoxGeom> PipelineResult::fused_boxes() const {
    std::vector<BoxGeom> out;
    for (std::size_t i : fused.fused) out.push_back(selected[i].geom);
    return out;
}

std::string PipelineResult::manifest_json(const PipelineConfig& cfg, bool with_timings) const {
    json j;
    j["config"] = config_json(cfg);
    j["normalization"] = {{"scale", normalization.scale}, {"translation", vec_json(normalization.translation)}};
    j["vertex_count"] = normalized.vertex_count();
    j["face_count"] = normalized.face_count();
    j["work_vertex_count"] = work_vertex_count;
    j["H"] = candidates.size();
    json init = json::array(), fin = json::array();
    double mi = 0.0, mf = 0.0;
    for (const auto& c : candidates) {
        init.push_back(c.initial_loss);
        fin.push_back(c.loss);
        mi += c.initial_loss;
        mf += c.loss;
    }
    j["initial_losses"] = init;
    j["losses"] = fin;
    j["mean_initial_loss"] = candidates.empty() ? 0.0 : mi / static_cast<double>(candidates.size());
    j["mean_loss"] = candidates.empty() ? 0.0 : mf / static_cast<double>(candidates.size());
    j["filter"] = {{"initial", trace.initial},         {"after_loss", trace.after_loss},
                   {"after_roughness", trace.after_roughness}, {"after_saliency", trace.after_saliency},
                   {"after_overlap", trace.after_overlap},     {"after_occlusion", trace.after_occlusion},
                   {"after_octant", trace.after_octant},       {"final", trace.final_count}};
    j["H_f"] = selected.size();
    j["fused"] = fused.fused.size();
    j["skipped"] = fused.skipped;
    j["warnings"] = fused.warnings;
    json boxes = json::array();
    for (std::size_t i = 0; i < selected.size(); ++i) {
        const auto& c = selected[i];
        const bool ok = std::find(fused.fused.begin(), fused.fused.end(), i) != fused.fused.end();
        boxes.push_back({{"watermark", i},
                         {"candidate", c.id},
                         {"fused", ok},
                         {"loss", c.loss},
                         {"center", vec_json(c.geom.center)},
                         {"half_extents", vec_json(c.geom.half_extents)},
                         {"rotation", c.geom.rotation.m}});
    }
    j["boxes"] = boxes;
    if (with_timings) {
        json t = json::object();
        for (const auto& [name, s] : timings.seconds) t[name] = s;
        j["timings"] = t;
    }
    return j.dump(2) + "\n";
}

ManifestInfo parse_manifest(const std::string& text_in) {
    ManifestInfo info;
    try {
        const json j = json::parse(text_in);
        info.normalization.scale = j.at("normalization").at("scale").get<double>();
        info.normalization.translation = json_vec(j.at("normalization").at("translation"));
        for (const auto& b : j.at("boxes")) {
            if (!b.value("fused", true)) continue;
            BoxGeom g;
            g.center = json_vec(b.at("center"));
            g.half_extents = json_vec(b.at("half_extents"));
            const auto r = b.at("rotation").get<std::vector<double>>();
            if (r.size() != 9) throw ConfigError("rotation needs 9 entries");
            std::copy(r.begin(), r.end(), g.rotation.m.begin());
            info.boxes.push_back(g);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad manifest: ") + e.what());
    }
    return info;
}

PipelineResult run_pipeline(const Mesh& input, const PipelineConfig& cfg) {
    cfg.validate();
    using clock = std::chrono::steady_clock;
    PipelineResult r;
    auto t0 = clock::now();
    auto lap = [&](const char* name) {
        const auto now = clock::now();
        r.timings.seconds.emplace_back(name, std::chrono::duration<double>(now - t0).count());
        t0 = now;
    };

    const WatermarkSpec spec{cfg.text, cfg.size, cfg.thickness};
    const Mesh glyph = text_to_3d(spec);
    const BoxGeom tmpl = oriented_bounding_box(glyph);

    r.normalization = normalization_for(input, cfg.model_scale);
    r.normalized = input.scaled_translated(r.normalization.scale, r.normalization.translation);
    const Mesh work = r.normalized.vertex_count() > cfg.vertex_cap
                          ? decimate_vertex_clustering(r.normalized, cfg.vertex_cap)
                          : r.normalized;
    r.work_vertex_count = work.vertex_count();
    const SpatialIndex index(work);
    lap("prepare");

    auto cands = init_candidates(work, tmpl, cfg.H_s, cfg.H_r, cfg.seed);
    lap("initialize");
    OptimizerOptions opt;
    opt.max_steps = cfg.steps;
    opt.stop_mean_loss = cfg.stop_loss;
    opt.learning_rate = cfg.learning_rate;
    opt.probe_count = cfg.J;
    r.candidates = optimize(std::move(cands), index, opt);
    lap("optimize");

    FilterConfig fc;
    fc.loss_threshold = cfg.loss_threshold;
    fc.roughness_threshold = cfg.roughness_threshold;
    fc.angle_increment = cfg.angle_increment;
    fc.seed = cfg.seed;
    r.selected = filter_cascade(work, index, r.candidates, fc, &r.trace);
    lap("filter");
    if (r.selected.empty()) throw GeometryError("no candidate survived filtering");

    std::vector<PlacedWatermark> placed;
    for (const auto& c : r.selected) {
        BoxGeom pose = c.geom;
        pose.half_extents = tmpl.half_extents;
        placed.push_back({pose_mesh(glyph, tmpl, pose), pose});
    }
    r.fused = curve_matching_fuse(r.normalized, placed, cfg.extrude_strength,
                                  cfg.mode == "deboss" ? FuseMode::Deboss : FuseMode::Emboss);
    lap("emboss");
    if (r.fused.fused.empty()) throw GeometryError("no watermark could be fused into the surface");
    return r;
}

std::string sidecar_path_for(const std::string& output_path) {
    const auto dot = output_path.rfind('.');
    const auto slash = output_path.find_last_of("/\\");
    const std::string stem =
        dot != std::string::npos && (slash == std::string::npos || dot > slash) ? output_path.substr(0, dot) : output_path;
    return stem + ".labels.txt";
}

std::string manifest_path_for(const std::string& output_path) {
    const auto dot = output_path.rfind('.');
    const auto slash = output_path.find_last_of("/\\");
    const std::string stem =
        dot != std::string::npos && (slash == std::string::npos || dot > slash) ? output_path.substr(0, dot) : output_path;
    return stem + ".manifest.json";
}

}  // namespace wmark
