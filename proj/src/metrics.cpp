#include "wmark/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <unordered_set>

#include "wmark/emboss.hpp"
#include "wmark/topology.hpp"

namespace wmark {

ViewSet make_views(double increment_deg) {
    if (!(increment_deg > 0.0) || increment_deg > 360.0) throw ConfigError("view increment must be in (0, 360]");
    const double steps_f = 360.0 / increment_deg;
    const auto steps = static_cast<int>(std::lround(steps_f));
    if (std::abs(steps_f - steps) > 1e-9) throw ConfigError("view increment must divide 360");
    ViewSet vs;
    vs.increment_deg = increment_deg;
    const Vec3 ref{0, 1, 0};
    auto add = [&](const Vec3& d) {
        for (const auto& e : vs.directions)
            if (squared_norm(e - d) < 1e-12) return;
        vs.directions.push_back(d);
    };
    for (int k = 0; k < steps; ++k) add(rotation_x(k * increment_deg * M_PI / 180.0) * ref);
    for (int k = 0; k < steps; ++k) add(rotation_z(k * increment_deg * M_PI / 180.0) * ref);
    return vs;
}

std::vector<Vec3> front_face_ray_origins(const BoxGeom& box, std::size_t count, double lift) {
    const auto n = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(std::max<std::size_t>(count, 1)))));
    std::vector<Vec3> out;
    out.reserve(n * n);
    const Vec3& h = box.half_extents;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const double u = -h.x + 2.0 * h.x * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
            const double v = -h.y + 2.0 * h.y * (static_cast<double>(j) + 0.5) / static_cast<double>(n);
            out.push_back(box.to_world({u, v, h.z + lift}));
        }
    return out;
}

bool front_face_unobstructed(const SpatialIndex& index, const BoxGeom& box, const Vec3& dir, std::size_t n_rays) {
    const Vec3 d = normalized(dir);
    for (const auto& o : front_face_ray_origins(box, n_rays))
        if (index.any_hit(o, d)) return false;
    return true;
}

double placement_ratio(const Mesh& target, const BoxGeom& box) {
    const Vec3 front = box.front_normal();
    double area = 0.0;
    for (std::size_t f = 0; f < target.face_count(); ++f) {
        const auto t = target.triangle(f);
        if (box.contains(t[0]) && box.contains(t[1]) && box.contains(t[2]))
            area += target.face_areas()[f] * std::abs(dot(target.face_normals()[f], front));
    }
    const double fa = box.front_area();
    return fa > 0.0 ? std::clamp(area / fa, 0.0, 1.0) : 0.0;
}

double wps(const Mesh& target, std::span<const BoxGeom> boxes) {
    if (boxes.empty()) throw ConfigError("WPS needs at least one box");
    double s = 0.0;
    for (const auto& b : boxes) s += placement_ratio(target, b);
    return s / static_cast<double>(boxes.size());
}

RayVisibility ray_visibility_detail(const SpatialIndex& watermarked, std::span<const BoxGeom> boxes,
                                    const ViewSet& views, std::size_t n_rays) {
    RayVisibility rv;
    const double cos_cone = std::cos(kViewConeDeg * M_PI / 180.0);
    rv.per_watermark.assign(boxes.size(), std::vector<int>(views.directions.size(), -1));
    for (std::size_t v = 0; v < views.directions.size(); ++v) {
        const Vec3& dir = views.directions[v];
        double sum = 0.0;
        std::size_t facing = 0;
        for (std::size_t b = 0; b < boxes.size(); ++b) {
            if (dot(boxes[b].front_normal(), dir) < cos_cone - 1e-12) continue;
            ++facing;
            const int ok = front_face_unobstructed(watermarked, boxes[b], dir, n_rays) ? 1 : 0;
            rv.per_watermark[b][v] = ok;
            sum += ok;
        }
        rv.per_view.push_back(facing ? sum / static_cast<double>(facing) : 0.0);
    }
    double total = 0.0;
    for (double s : rv.per_view) total += s;
    rv.score = rv.per_view.empty() ? 0.0 : total / static_cast<double>(rv.per_view.size());
    return rv;
}

double ray_visibility(const Mesh& watermarked, std::span<const BoxGeom> boxes, const ViewSet& views,
                      std::size_t n_rays) {
    const SpatialIndex index(watermarked);
    return ray_visibility_detail(index, boxes, views, n_rays).score;
}

double smse(const Mesh& original, const Mesh& watermarked, std::size_t n_samples, std::uint64_t seed) {
    if (original.empty() || watermarked.empty()) throw EmptyMeshError("SMSE needs two nonempty meshes");
    if (n_samples == 0) return 0.0;
    const SpatialIndex index(original);
    const auto samples = surface_sample(watermarked, n_samples, seed);
    double s = 0.0;
    for (const auto& p : samples) {
        const double d = index.closest_point(p.position).distance;
        s += d * d;
    }
    return s / static_cast<double>(samples.size());
}

std::size_t ipe(const Mesh& original, const Mesh& watermarked) {
    const auto a = original.empty() ? 0 : connected_components(original).count;
    const auto b = watermarked.empty() ? 0 : connected_components(watermarked).count;
    return a > b ? a - b : b - a;
}

std::vector<std::pair<std::size_t, std::vector<double>>> top_distances(const Mesh& original, const Mesh& watermarked,
                                                                       std::span<const std::string> labels) {
    if (labels.size() != watermarked.face_count()) throw SidecarError("label count does not match faces");
    std::map<std::size_t, std::set<std::uint32_t>> verts;
    for (std::size_t f = 0; f < labels.size(); ++f) {
        const auto info = parse_watermark_label(labels[f]);
        if (info && info->part == "top")
            for (auto v : watermarked.face(f)) verts[info->index].insert(v);
    }
    std::vector<std::pair<std::size_t, std::vector<double>>> out;
    if (verts.empty()) return out;
    const SpatialIndex index(original);
    for (const auto& [w, vs] : verts) {
        std::vector<double> d;
        d.reserve(vs.size());
        for (auto v : vs) d.push_back(index.closest_point(watermarked.vertex(v)).distance);
        out.emplace_back(w, std::move(d));
    }
    return out;
}

namespace {

__extension__ typedef __int128 i128;

double population_variance(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    return v / static_cast<double>(xs.size());
}

}  // namespace

double lce(const Mesh& original, const Mesh& watermarked, std::span<const std::string> labels) {
    std::vector<double> pooled;
    for (auto& [w, d] : top_distances(original, watermarked, labels)) pooled.insert(pooled.end(), d.begin(), d.end());
    if (pooled.empty()) throw GeometryError("no watermark top faces to measure");
    return population_variance(pooled);
}

std::vector<double> saliency_map(const Mesh& mesh) {
    if (mesh.empty()) throw EmptyMeshError();
    const std::size_t nv = mesh.vertex_count();
    std::vector<Vec3> lap(nv);
    std::vector<double> area(nv, 0.0);
    std::vector<std::vector<std::uint32_t>> ring(nv);
    double edge_sum = 0.0;
    std::size_t edge_n = 0;
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const Face& t = mesh.face(f);
        const double a = mesh.face_areas()[f];
        for (std::size_t i = 0; i < 3; ++i) {
            ring[t[i]].push_back(t[(i + 1) % 3]);
            ring[t[i]].push_back(t[(i + 2) % 3]);
            edge_sum += distance(mesh.vertex(t[i]), mesh.vertex(t[(i + 1) % 3]));
            ++edge_n;
        }
        if (!(a > 0.0)) continue;
        for (std::size_t i = 0; i < 3; ++i) {
            const std::uint32_t vi = t[i], vj = t[(i + 1) % 3], vk = t[(i + 2) % 3];
            const Vec3 e1 = mesh.vertex(vj) - mesh.vertex(vi), e2 = mesh.vertex(vk) - mesh.vertex(vi);
            const double cot = dot(e1, e2) / (2.0 * a);
            const Vec3 e = mesh.vertex(vk) - mesh.vertex(vj);
            lap[vj] += e * cot;
            lap[vk] -= e * cot;
            area[vi] += a / 3.0;
        }
    }
    const double mean_edge = edge_n ? edge_sum / static_cast<double>(edge_n) : 0.0;
    std::vector<double> raw(nv, 0.0);
    for (std::size_t v = 0; v < nv; ++v) {
        if (area[v] <= 0.0 || mesh.vertex_normal_degenerate(v)) continue;
        raw[v] = std::abs(dot(lap[v], mesh.vertex_normals()[v])) / (2.0 * area[v]);
    }
    for (auto& r : ring) {
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
    }
    std::vector<double> smooth(nv, 0.0);
    const double sigma2 = mean_edge > 0.0 ? mean_edge * mean_edge : 1.0;
    std::vector<std::uint32_t> hood;
    for (std::size_t v = 0; v < nv; ++v) {
        hood.assign(1, static_cast<std::uint32_t>(v));
        for (auto n : ring[v]) {
            hood.push_back(n);
            hood.insert(hood.end(), ring[n].begin(), ring[n].end());
        }
        std::sort(hood.begin(), hood.end());
        hood.erase(std::unique(hood.begin(), hood.end()), hood.end());
        double wsum = 0.0, s = 0.0;
        for (auto n : hood) {
            const double w = std::exp(-squared_norm(mesh.vertex(n) - mesh.vertex(v)) / (2.0 * sigma2));
            wsum += w;
            s += w * raw[n];
        }
        smooth[v] = wsum > 0.0 ? s / wsum : 0.0;
    }
    const double mx = *std::max_element(smooth.begin(), smooth.end());
    // curvature below 1e-9 per unit edge length is rounding noise
    if (!(mx * std::max(mean_edge, 1e-300) > 1e-9)) return std::vector<double>(nv, 0.0);
    for (auto& s : smooth) s /= mx;
    return smooth;
}

double otsu_threshold(std::span<const double> values) {
    {
        std::vector<double> sorted(values.begin(), values.end());
        std::sort(sorted.begin(), sorted.end());
        if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() < 2)
            throw GeometryError("Otsu threshold needs at least two distinct values");
    }
    constexpr int kBins = 256;
    std::array<long long, kBins> count{};
    for (double v : values) {
        const int b = std::clamp(static_cast<int>(std::floor(std::clamp(v, 0.0, 1.0) * kBins)), 0, kBins - 1);
        ++count[static_cast<std::size_t>(b)];
    }
    long long n = 0, total = 0;
    for (int b = 0; b < kBins; ++b) {
        n += count[static_cast<std::size_t>(b)];
        total += static_cast<long long>(b) * count[static_cast<std::size_t>(b)];
    }
    // between-class variance up to a common factor: (w1*S0 - w0*S1)^2 / (w0*w1),
    // compared exactly while it fits in 128 bits
    const bool exact = n <= 300000;
    struct Score {
        i128 num = 0, den = 1;
        long double approx = 0;
    };
    auto better = [&](const Score& a, const Score& b) {  // a > b
        return exact ? a.num * b.den > b.num * a.den : a.approx > b.approx;
    };
    auto equal = [&](const Score& a, const Score& b) {
        return exact ? a.num * b.den == b.num * a.den : a.approx == b.approx;
    };
    std::array<Score, kBins - 1> score{};
    long long w0 = 0, s0 = 0;
    for (int k = 0; k < kBins - 1; ++k) {
        w0 += count[static_cast<std::size_t>(k)];
        s0 += static_cast<long long>(k) * count[static_cast<std::size_t>(k)];
        const long long w1 = n - w0, s1 = total - s0;
        Score& sc = score[static_cast<std::size_t>(k)];
        if (w0 == 0 || w1 == 0) continue;
        const i128 diff = static_cast<i128>(w1) * s0 - static_cast<i128>(w0) * s1;
        if (exact) {
            sc.num = diff * diff;
            sc.den = static_cast<i128>(w0) * w1;
        } else {
            const long double d = static_cast<long double>(diff);
            sc.approx = d * d / (static_cast<long double>(w0) * static_cast<long double>(w1));
        }
    }
    int lo = 0;
    for (int k = 1; k < kBins - 1; ++k)
        if (better(score[static_cast<std::size_t>(k)], score[static_cast<std::size_t>(lo)])) lo = k;
    int hi = lo;
    while (hi + 1 < kBins - 1 && equal(score[static_cast<std::size_t>(hi + 1)], score[static_cast<std::size_t>(lo)])) ++hi;
    return ((lo + hi) / 2.0 + 1.0) / kBins;
}

SaliencyField compute_saliency(const Mesh& mesh) {
    SaliencyField f;
    f.values = saliency_map(mesh);
    f.salient.assign(f.values.size(), 0);
    const auto [mn, mx] = std::minmax_element(f.values.begin(), f.values.end());
    if (f.values.empty() || *mx - *mn < kSaliencyMinContrast) return f;
    f.threshold = otsu_threshold(f.values);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.salient[i] = f.values[i] > *f.threshold ? 1 : 0;
    return f;
}

std::optional<int> saliency_vote(const Mesh& mesh, const SaliencyField& field, const BoxGeom& box) {
    std::size_t inside = 0, salient = 0;
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
        if (box.contains(mesh.vertex(v))) {
            ++inside;
            salient += field.salient[v];
        }
    if (inside == 0) return std::nullopt;
    return static_cast<double>(salient) / static_cast<double>(inside) > 0.5 ? 1 : 0;
}

double saliency_error(const Mesh& original, std::span<const BoxGeom> boxes, std::vector<int>* votes,
                      std::vector<std::string>* warnings) {
    if (boxes.empty()) throw ConfigError("saliency error needs at least one box");
    const SaliencyField field = compute_saliency(original);
    double s = 0.0;
    for (std::size_t b = 0; b < boxes.size(); ++b) {
        const auto v = saliency_vote(original, field, boxes[b]);
        if (!v && warnings) warnings->push_back("box " + std::to_string(b) + " contains no vertex; saliency vote 0");
        const int vote = v.value_or(0);
        if (votes) votes->push_back(vote);
        s += vote;
    }
    return s / static_cast<double>(boxes.size());
}

std::vector<BoxGeom> boxes_from_labels(const Mesh& mesh, std::span<const std::string> labels,
                                       double min_half_thickness) {
    if (labels.size() != mesh.face_count()) throw SidecarError("label count does not match faces");
    struct Acc {
        Vec3 normal;
        std::set<std::uint32_t> top, all;
    };
    std::map<std::size_t, Acc> acc;
    for (std::size_t f = 0; f < labels.size(); ++f) {
        const auto info = parse_watermark_label(labels[f]);
        if (!info) continue;
        Acc& a = acc[info->index];
        for (auto v : mesh.face(f)) a.all.insert(v);
        if (info->part == "top") {
            a.normal += mesh.face_normals()[f] * mesh.face_areas()[f];
            for (auto v : mesh.face(f)) a.top.insert(v);
        }
    }
    std::vector<BoxGeom> out;
    for (const auto& [w, a] : acc) {
        if (a.top.empty() || squared_norm(a.normal) == 0.0) continue;
        const Vec3 n = normalized(a.normal);
        const Vec3 helper = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        const Vec3 e1 = normalized(cross(helper, n)), e2 = cross(n, e1);
        Vec3 c;
        for (auto v : a.top) c += mesh.vertex(v);
        c /= static_cast<double>(a.top.size());
        double sxx = 0, sxy = 0, syy = 0;
        for (auto v : a.top) {
            const Vec3 d = mesh.vertex(v) - c;
            const double x = dot(d, e1), y = dot(d, e2);
            sxx += x * x;
            sxy += x * y;
            syy += y * y;
        }
        const double ang = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
        const Vec3 u = e1 * std::cos(ang) + e2 * std::sin(ang);
        const Vec3 v2 = cross(n, u);
        double lo[3] = {HUGE_VAL, HUGE_VAL, HUGE_VAL}, hi[3] = {-HUGE_VAL, -HUGE_VAL, -HUGE_VAL};
        const Vec3 ax[3] = {u, v2, n};
        for (auto v : a.all)
            for (int k = 0; k < 3; ++k) {
                const double p = dot(mesh.vertex(v) - c, ax[k]);
                lo[k] = std::min(lo[k], p);
                hi[k] = std::max(hi[k], p);
            }
        BoxGeom b;
        b.rotation = Mat3::from_columns(u, v2, n);
        Vec3 mid{0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])};
        b.half_extents = {0.5 * (hi[0] - lo[0]), 0.5 * (hi[1] - lo[1]), std::max(0.5 * (hi[2] - lo[2]), min_half_thickness)};
        b.center = c + b.rotation * mid;
        out.push_back(b);
    }
    return out;
}

MetricsReport evaluate(const Mesh& original, const Mesh& watermarked, std::span<const BoxGeom> boxes,
                       std::span<const std::string> labels, const EvaluateOptions& opts) {
    MetricsReport r;
    const ViewSet views = make_views(opts.view_increment_deg);
    r.views = views.directions;
    r.smse = smse(original, watermarked, opts.smse_samples, opts.seed);
    r.ipe = ipe(original, watermarked);
    r.per_watermark.resize(boxes.size());
    r.h_f = boxes.size();
    if (!boxes.empty()) {
        for (std::size_t b = 0; b < boxes.size(); ++b) r.per_watermark[b].placement_ratio = placement_ratio(original, boxes[b]);
        r.wps = wps(original, boxes);
        const SpatialIndex index(watermarked);
        const RayVisibility rv = ray_visibility_detail(index, boxes, views, opts.n_rays);
        r.ray = rv.score;
        for (std::size_t b = 0; b < boxes.size(); ++b) r.per_watermark[b].visibility = rv.per_watermark[b];
        std::vector<int> votes;
        r.se = saliency_error(original, boxes, &votes, &r.warnings);
        for (std::size_t b = 0; b < boxes.size(); ++b) r.per_watermark[b].saliency_vote = votes[b];
    }
    if (!labels.empty()) {
        const auto groups = top_distances(original, watermarked, labels);
        std::vector<double> pooled;
        for (const auto& [w, d] : groups) {
            pooled.insert(pooled.end(), d.begin(), d.end());
            if (w < r.per_watermark.size()) r.per_watermark[w].curvature_variance = population_variance(d);
        }
        if (!pooled.empty()) r.lce = population_variance(pooled);
        else r.warnings.push_back("no watermark top faces; LCE skipped");
        if (boxes.empty()) r.h_f = groups.size();
    }
    return r;
}

namespace {

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

std::string MetricsReport::to_json() const {
    nlohmann::json j;
    j["wps"] = opt_json(wps);
    j["ray"] = opt_json(ray);
    j["smse"] = opt_json(smse);
    j["ipe"] = ipe ? nlohmann::json(*ipe) : nlohmann::json(nullptr);
    j["lce"] = opt_json(lce);
    j["se"] = opt_json(se);
    j["h_f"] = h_f;
    auto& pw = j["per_watermark"] = nlohmann::json::array();
    for (const auto& w : per_watermark)
        pw.push_back({{"placement_ratio", w.placement_ratio},
                      {"visibility", w.visibility},
                      {"curvature_variance", opt_json(w.curvature_variance)},
                      {"saliency_vote", w.saliency_vote}});
    auto& vs = j["views"] = nlohmann::json::array();
    for (const auto& v : views) vs.push_back({v.x, v.y, v.z});
    j["warnings"] = warnings;
    return j.dump(2) + "\n";
}

std::string MetricsReport::to_table() const {
    std::ostringstream out;
    auto row = [&](const char* name, const std::string& value, const char* note) {
        out << std::left << std::setw(8) << name << std::right << std::setw(14) << value << "  " << note << "\n";
    };
    auto fmt = [](const std::optional<double>& v) {
        if (!v) return std::string("-");
        std::ostringstream s;
        s << std::setprecision(6) << *v;
        return s.str();
    };
    out << std::left << std::setw(8) << "metric" << std::right << std::setw(14) << "value" << "\n";
    row("WPS", fmt(wps), "higher is better");
    row("Ray", fmt(ray), "higher is better");
    row("SMSE", fmt(smse), "lower is better");
    row("IPE", ipe ? std::to_string(*ipe) : "-", "lower is better");
    row("LCE", fmt(lce), "lower is better");
    row("SE", fmt(se), "lower is better (curvature saliency)");
    row("H_f", std::to_string(h_f), "");
    return out.str();
}

}  // namespace wmark
