#include "vcam/workbench/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "vcam/error.hpp"
#include "vcam/trajectory.hpp"
#include "vcam/workbench/http_backend.hpp"

namespace vcam::workbench {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::parse_error, path + ": " + what);
}

struct ParamSpec {
    const char* name;
    const char* type;  // integer, number, boolean, vec3, intrinsics, keyframes
    const char* description;
    std::vector<TrajectoryKind> kinds;  // empty: every kind
};

using K = TrajectoryKind;

const std::vector<ParamSpec>& param_specs() {
    static const std::vector<ParamSpec> specs{
        {"frame_count", "integer", "number of generated cameras", {}},
        {"inputs", "integer", "leading cameras also emitted as input frames", {}},
        {"center", "vec3", "look-at point", {}},
        {"elevation", "number", "radians above the xy plane", {}},
        {"start_azimuth", "number", "radians from +x toward +y", {}},
        {"intrinsics", "intrinsics", "base camera intrinsics", {}},
        {"radius", "number", "orbit radius or spiral horizontal semi-axis", {K::orbit, K::spiral}},
        {"closed", "boolean", "omit the duplicate endpoint of a loop", {K::orbit, K::spiral}},
        {"sweep", "number", "total azimuth travelled, radians", {K::orbit}},
        {"distance", "number", "distance from the center", {K::spiral, K::pan, K::zoom_in, K::zoom_out, K::dolly_zoom}},
        {"vertical_ratio", "number", "vertical / horizontal semi-axis", {K::spiral}},
        {"depth_amplitude", "number", "along-axis oscillation", {K::spiral}},
        {"loops", "number", "revolutions", {K::spiral}},
        {"pan_extent", "number", "total lateral travel", {K::pan}},
        {"focal_scale", "number", "final focal multiplier", {K::zoom_in, K::zoom_out}},
        {"end_distance", "number", "final distance", {K::dolly_zoom}},
        {"keyframes", "keyframes", "list of {camera, time}, strictly increasing times", {K::keyframes}},
    };
    return specs;
}

constexpr TrajectoryKind kAllKinds[] = {K::orbit, K::spiral, K::pan, K::zoom_in, K::zoom_out, K::dolly_zoom, K::keyframes};

// Library defaults, except a level orbit and a focal_scale valid for zoom_out.
TrajectorySpec default_spec(TrajectoryKind kind) {
    TrajectorySpec spec;
    spec.kind = kind;
    spec.params.elevation = 0.0;
    if (kind == K::zoom_out) spec.params.focal_scale = 0.5;
    return spec;
}

Json default_value(const TrajectorySpec& spec, const std::string& name) {
    const auto& p = spec.params;
    if (name == "frame_count") return p.frame_count;
    if (name == "inputs") return 1;
    if (name == "center") return {p.center.x(), p.center.y(), p.center.z()};
    if (name == "elevation") return p.elevation;
    if (name == "start_azimuth") return p.start_azimuth;
    if (name == "intrinsics") return to_json(spec.base_intrinsics);
    if (name == "radius") return p.radius;
    if (name == "closed") return p.closed;
    if (name == "sweep") return p.sweep;
    if (name == "distance") return p.distance;
    if (name == "vertical_ratio") return p.vertical_ratio;
    if (name == "depth_amplitude") return p.depth_amplitude;
    if (name == "loops") return p.loops;
    if (name == "pan_extent") return p.pan_extent;
    if (name == "focal_scale") return p.focal_scale;
    if (name == "end_distance") return p.end_distance;
    return Json::array();
}

bool applies(const ParamSpec& spec, TrajectoryKind kind) {
    return spec.kinds.empty() || std::find(spec.kinds.begin(), spec.kinds.end(), kind) != spec.kinds.end();
}

double number(const Json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int integer(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    const auto v = j.get<std::int64_t>();
    if (v < 0 || v > 1'000'000) fail(path, "out of range");
    return static_cast<int>(v);
}

void apply_param(TrajectorySpec& spec, int& inputs, const std::string& name, const Json& v, const std::string& path) {
    auto& p = spec.params;
    if (name == "frame_count") {
        p.frame_count = integer(v, path);
    } else if (name == "inputs") {
        inputs = integer(v, path);
    } else if (name == "center") {
        if (!v.is_array() || v.size() != 3) fail(path, "expected 3 numbers");
        for (int i = 0; i < 3; ++i) p.center(i) = number(v[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
    } else if (name == "elevation") {
        p.elevation = number(v, path);
    } else if (name == "start_azimuth") {
        p.start_azimuth = number(v, path);
    } else if (name == "intrinsics") {
        spec.base_intrinsics = intrinsics_from_json(v, path);
    } else if (name == "radius") {
        p.radius = number(v, path);
    } else if (name == "closed") {
        if (!v.is_boolean()) fail(path, "expected true or false");
        p.closed = v.get<bool>();
    } else if (name == "sweep") {
        p.sweep = number(v, path);
    } else if (name == "distance") {
        p.distance = number(v, path);
    } else if (name == "vertical_ratio") {
        p.vertical_ratio = number(v, path);
    } else if (name == "depth_amplitude") {
        p.depth_amplitude = number(v, path);
    } else if (name == "loops") {
        p.loops = number(v, path);
    } else if (name == "pan_extent") {
        p.pan_extent = number(v, path);
    } else if (name == "focal_scale") {
        p.focal_scale = number(v, path);
    } else if (name == "end_distance") {
        p.end_distance = number(v, path);
    } else if (name == "keyframes") {
        if (!v.is_array()) fail(path, "expected an array");
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string kp = path + "[" + std::to_string(i) + "]";
            if (!v[i].is_object() || !v[i].contains("camera") || !v[i].contains("time"))
                fail(kp, "expected {camera, time}");
            p.keyframes.push_back({camera_from_json(v[i]["camera"], kp + ".camera"), number(v[i]["time"], kp + ".time")});
        }
    }
}

}  // namespace

Json preset_catalog() {
    Json presets = Json::array();
    for (auto kind : kAllKinds) {
        const TrajectorySpec spec = default_spec(kind);
        Json params = Json::object();
        for (const auto& p : param_specs()) {
            if (!applies(p, kind)) continue;
            params[p.name] = {{"type", p.type}, {"default", default_value(spec, p.name)}, {"description", p.description}};
        }
        presets.push_back({{"kind", to_string(kind)}, {"params", std::move(params)}});
    }
    return {{"presets", std::move(presets)}};
}

TrajectoryFile preset_trajectory(const Json& body) {
    if (!body.is_object()) fail("body", "expected an object");
    if (!body.contains("kind") || !body["kind"].is_string()) fail("kind", "expected a preset name");
    const auto kind = trajectory_kind_from_string(body["kind"].get<std::string>());
    if (!kind) fail("kind", "unknown preset \"" + body["kind"].get<std::string>() + "\"");
    TrajectorySpec spec = default_spec(*kind);
    int inputs = 1;
    if (body.contains("params") && !body["params"].is_null()) {
        const Json& params = body["params"];
        if (!params.is_object()) fail("params", "expected an object");
        for (const auto& [name, value] : params.items()) {
            const std::string path = "params." + name;
            const auto it = std::find_if(param_specs().begin(), param_specs().end(),
                                         [&](const ParamSpec& p) { return name == p.name; });
            if (it == param_specs().end()) fail(path, "unknown parameter");
            if (!applies(*it, *kind)) fail(path, "not used by " + std::string(to_string(*kind)));
            apply_param(spec, inputs, name, value, path);
        }
    }
    if (spec.params.frame_count < 1) fail("params.frame_count", "must be >= 1");
    if (inputs < 1 || inputs > spec.params.frame_count) fail("params.inputs", "must be in [1, frame_count]");
    const auto cameras = generate(spec);
    return TrajectoryFile::from_cameras({cameras.begin(), cameras.begin() + inputs}, cameras);
}

SamplingPlan plan_trajectory(const TrajectoryFile& file, const Json& config, const std::vector<Camera>& priors) {
    const PlannerConfig cfg = planner_config_from_json(config.is_null() ? Json::object() : config);
    ViewRequest request = file.to_request();
    request.anchor_priors = priors;
    return make_plan(request, cfg);
}

std::vector<Frame> preview_frames(const std::vector<Camera>& cameras, std::uint64_t scene_seed, int max_dim) {
    if (max_dim < 1) throw Error(ErrorKind::invalid_argument, "max_dim must be >= 1");
    const SyntheticScene scene = build_scene(scene_seed);
    std::vector<Frame> out;
    out.reserve(cameras.size());
    for (Camera cam : cameras) {
        auto& k = cam.intrinsics;
        const int longest = std::max(k.width, k.height);
        if (longest > max_dim) {
            const double s = static_cast<double>(max_dim) / longest;
            k.fx *= s;
            k.fy *= s;
            k.cx *= s;
            k.cy *= s;
            k.width = std::max(1, static_cast<int>(std::lround(k.width * s)));
            k.height = std::max(1, static_cast<int>(std::lround(k.height * s)));
        }
        out.push_back(render_ground_truth(scene, cam));
    }
    return out;
}

std::unique_ptr<GenerativeRenderer> make_backend(const std::string& spec, const SyntheticScene& scene) {
    if (spec == "oracle") return std::make_unique<OracleRenderer>(scene);
    if (spec.rfind("http:", 0) == 0) {
        std::string url = spec.substr(5);
        if (url.rfind("//", 0) == 0) url = "http:" + url;
        else if (url.find("://") == std::string::npos) url = "http://" + url;
        return std::make_unique<HttpBackend>(url);
    }
    throw Error(ErrorKind::invalid_argument, "unknown backend \"" + spec + "\" (expected oracle or http:<url>)");
}

RunOutput run_plan(const SamplingPlan& plan, GenerativeRenderer& backend, const SyntheticScene& scene,
                   const ExecutionOptions& options) {
    std::vector<Frame> inputs;
    for (const auto& c : plan.request.inputs) inputs.push_back(render_ground_truth(scene, c));
    RunOutput out;
    out.result = execute(plan, backend, inputs, options);
    std::vector<Frame> references;
    for (const auto& c : plan.request.targets) references.push_back(render_ground_truth(scene, c));
    bool ssim_ok = true;
    for (const auto& f : references) ssim_ok = ssim_ok && f.width >= 11 && f.height >= 11;
    if (ssim_ok) {
        out.metrics = evaluate_frames(out.result.frames, references);
    } else {
        for (std::size_t i = 0; i < references.size(); ++i) out.metrics.psnr.push_back(psnr(out.result.frames[i], references[i]));
    }
    const bool traced = std::any_of(out.result.target_traces.begin(), out.result.target_traces.end(),
                                    [](const ResolvedTrace& t) { return !t.empty(); });
    if (traced) out.metrics.disagreement = cross_pass_disagreement(out.result).mean;
    return out;
}

Json run_summary(const SamplingPlan& plan, const RunOutput& run) {
    const auto& r = run.result;
    Json passes = Json::array();
    for (const auto& log : r.per_pass_log) {
        Json hashes = Json::array();
        for (auto h : log.conditioning_hashes) hashes.push_back(hex64(h));
        const auto& pass = plan.passes[static_cast<std::size_t>(log.pass)];
        passes.push_back({{"id", log.pass}, {"kind", to_string(pass.kind)}, {"conditioning_hashes", std::move(hashes)}});
    }
    Json frame_hashes = Json::array();
    for (const auto& f : r.frames) frame_hashes.push_back(hex64(content_hash(f)));
    Json anchor_hashes = Json::array();
    for (const auto& f : r.anchor_frames) anchor_hashes.push_back(hex64(content_hash(f)));
    return {{"strategy", to_string(plan.strategy)},
            {"targets", r.frames.size()},
            {"anchors", r.anchor_frames.size()},
            {"memory_bank_size", r.memory_bank_size},
            {"target_pass", r.target_pass},
            {"anchor_pass", r.anchor_pass},
            {"passes", std::move(passes)},
            {"frame_hashes", std::move(frame_hashes)},
            {"anchor_hashes", std::move(anchor_hashes)},
            {"metrics", to_json(run.metrics)}};
}

Json to_json(const SweepResult& sweep) {
    Json scores = Json::array();
    for (const auto& s : sweep.scores) scores.push_back({{"unit_length", s.unit_length}, {"score", s.score}});
    return {{"best_unit_length", sweep.best_unit_length}, {"scores", std::move(scores)}};
}

}  // namespace vcam::workbench
