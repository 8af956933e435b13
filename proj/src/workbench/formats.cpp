#include "vcam/workbench/formats.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "vcam/error.hpp"

namespace vcam::workbench {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::parse_error, path + ": " + what);
}

std::string at(const std::string& path, std::string_view key) { return path + "." + std::string(key); }
std::string at(const std::string& path, std::size_t index) { return path + "[" + std::to_string(index) + "]"; }

void require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

const Json& field(const Json& j, std::string_view key, const std::string& path) {
    require_object(j, path);
    const auto it = j.find(key);
    if (it == j.end()) fail(at(path, key), "missing");
    return *it;
}

const Json* optional_field(const Json& j, std::string_view key, const std::string& path) {
    require_object(j, path);
    const auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

const Json& array(const Json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array");
    return j;
}

double number(const Json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::int64_t integer64(const Json& j, const std::string& path) {
    if (j.is_number_unsigned()) {
        if (j.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
            fail(path, "integer out of range");
        return static_cast<std::int64_t>(j.get<std::uint64_t>());
    }
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<std::int64_t>();
}

int integer(const Json& j, const std::string& path) {
    const auto v = integer64(j, path);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail(path, "integer out of range");
    return static_cast<int>(v);
}

bool boolean(const Json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
}

std::string string(const Json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

template <typename Enum, typename Parse>
Enum enumeration(const Json& j, const std::string& path, Parse parse) {
    const std::string name = string(j, path);
    const auto value = parse(name);
    if (!value) fail(path, "unknown value \"" + name + "\"");
    return *value;
}

Json number_or_token(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double number_or_token(const Json& j, const std::string& path) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        fail(path, "expected a number, \"inf\", \"-inf\" or \"nan\"");
    }
    return number(j, path);
}

Json cameras_to_json(const std::vector<Camera>& cameras) {
    Json out = Json::array();
    for (const auto& c : cameras) out.push_back(to_json(c));
    return out;
}

std::vector<Camera> cameras_from_json(const Json& j, const std::string& path) {
    std::vector<Camera> out;
    const auto& list = array(j, path);
    for (std::size_t i = 0; i < list.size(); ++i) out.push_back(camera_from_json(list[i], at(path, i)));
    return out;
}

Json ref_to_json(const FrameRef& ref) { return {{"source", to_string(ref.source)}, {"index", ref.index}}; }

FrameRef ref_from_json(const Json& j, const std::string& path) {
    FrameRef ref;
    ref.source = enumeration<FrameRef::Source>(field(j, "source", path), at(path, "source"), frame_source_from_string);
    ref.index = integer(field(j, "index", path), at(path, "index"));
    return ref;
}

Json refs_to_json(const std::vector<FrameRef>& refs) {
    Json out = Json::array();
    for (const auto& r : refs) out.push_back(ref_to_json(r));
    return out;
}

std::vector<FrameRef> refs_from_json(const Json& j, const std::string& path) {
    std::vector<FrameRef> out;
    const auto& list = array(j, path);
    for (std::size_t i = 0; i < list.size(); ++i) out.push_back(ref_from_json(list[i], at(path, i)));
    return out;
}

Json optional_to_json(const std::optional<double>& v) { return v ? number_or_token(*v) : Json(nullptr); }

std::optional<double> optional_metric(const Json& j, std::string_view key, const std::string& path) {
    const Json* v = optional_field(j, key, path);
    if (!v) return std::nullopt;
    return number_or_token(*v, at(path, key));
}

Json values_to_json(const std::vector<double>& values) {
    Json out = Json::array();
    for (double v : values) out.push_back(number_or_token(v));
    return out;
}

std::vector<double> values_from_json(const Json& j, std::string_view key, const std::string& path) {
    std::vector<double> out;
    const Json* list = optional_field(j, key, path);
    if (!list) return out;
    const std::string p = at(path, key);
    array(*list, p);
    for (std::size_t i = 0; i < list->size(); ++i) out.push_back(number_or_token((*list)[i], at(p, i)));
    return out;
}

std::string_view role_name(FrameRole role) { return role == FrameRole::input ? "input" : "target"; }

}  // namespace

TrajectoryFile TrajectoryFile::from_cameras(const std::vector<Camera>& inputs, const std::vector<Camera>& targets,
                                            Task task) {
    TrajectoryFile file;
    file.task = task;
    for (const auto& c : inputs) file.frames.push_back({c, FrameRole::input});
    for (const auto& c : targets) file.frames.push_back({c, FrameRole::target});
    return file;
}

std::vector<Camera> TrajectoryFile::cameras(FrameRole role) const {
    std::vector<Camera> out;
    for (const auto& f : frames)
        if (f.role == role) out.push_back(f.camera);
    return out;
}

ViewRequest TrajectoryFile::to_request() const {
    ViewRequest r;
    r.inputs = cameras(FrameRole::input);
    r.targets = cameras(FrameRole::target);
    r.task = task;
    r.ordered_targets = task == Task::trajectory;
    return r;
}

Json to_json(const Intrinsics& k) {
    return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

Intrinsics intrinsics_from_json(const Json& j, const std::string& path) {
    Intrinsics k;
    k.fx = number(field(j, "fx", path), at(path, "fx"));
    k.fy = number(field(j, "fy", path), at(path, "fy"));
    k.cx = number(field(j, "cx", path), at(path, "cx"));
    k.cy = number(field(j, "cy", path), at(path, "cy"));
    k.width = integer(field(j, "width", path), at(path, "width"));
    k.height = integer(field(j, "height", path), at(path, "height"));
    if (!k.is_valid()) fail(path, "focal lengths must be positive and dimensions at least 1");
    return k;
}

Json to_json(const Camera& camera) {
    Json pose = Json::array();
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) pose.push_back(camera.pose.rotation(r, c));
        pose.push_back(camera.pose.translation(r));
    }
    for (double v : {0.0, 0.0, 0.0, 1.0}) pose.push_back(v);
    return {{"pose", pose}, {"intrinsics", to_json(camera.intrinsics)}};
}

Camera camera_from_json(const Json& j, const std::string& path) {
    Camera camera;
    const std::string pose_path = at(path, "pose");
    const auto& pose = array(field(j, "pose", path), pose_path);
    if (pose.size() != 16) fail(pose_path, "expected 16 numbers");
    double m[16];
    for (std::size_t i = 0; i < 16; ++i) m[i] = number(pose[i], at(pose_path, i));
    if (std::abs(m[12]) > 1e-12 || std::abs(m[13]) > 1e-12 || std::abs(m[14]) > 1e-12 || std::abs(m[15] - 1.0) > 1e-12)
        fail(pose_path, "bottom row must be (0, 0, 0, 1)");
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) camera.pose.rotation(r, c) = m[r * 4 + c];
        camera.pose.translation(r) = m[r * 4 + 3];
    }
    if (!camera.pose.is_valid()) fail(pose_path, "rotation block is not a proper rotation");
    camera.intrinsics = intrinsics_from_json(field(j, "intrinsics", path), at(path, "intrinsics"));
    return camera;
}

Json to_json(const TrajectoryFile& file) {
    Json frames = Json::array();
    for (const auto& f : file.frames) {
        Json entry = to_json(f.camera);
        entry["role"] = role_name(f.role);
        frames.push_back(std::move(entry));
    }
    return {{"version", file.version},
            {"convention", kConvention},
            {"task", to_string(file.task)},
            {"frames", std::move(frames)}};
}

TrajectoryFile trajectory_file_from_json(const Json& j) {
    const std::string root = "trajectory";
    TrajectoryFile file;
    file.version = integer(field(j, "version", root), at(root, "version"));
    if (file.version != kFormatVersion) fail(at(root, "version"), "unsupported version");
    if (string(field(j, "convention", root), at(root, "convention")) != kConvention)
        fail(at(root, "convention"), "expected \"" + std::string(kConvention) + "\"");
    if (const Json* task = optional_field(j, "task", root))
        file.task = enumeration<Task>(*task, at(root, "task"), task_from_string);
    const std::string frames_path = at(root, "frames");
    const auto& frames = array(field(j, "frames", root), frames_path);
    bool has_input = false;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const std::string p = at(frames_path, i);
        TrajectoryFrame frame;
        frame.camera = camera_from_json(frames[i], p);
        const std::string role = string(field(frames[i], "role", p), at(p, "role"));
        if (role == "input") {
            frame.role = FrameRole::input;
            has_input = true;
        } else if (role == "target") {
            frame.role = FrameRole::target;
        } else {
            fail(at(p, "role"), "expected \"input\" or \"target\"");
        }
        file.frames.push_back(frame);
    }
    if (!has_input) fail(frames_path, "at least one input frame is required");
    return file;
}

Json to_json(const PlannerConfig& c) {
    const auto opt = [](const auto& v) { return v ? Json(*v) : Json(nullptr); };
    return {{"context_window", c.context_window},
            {"strategy", to_string(c.strategy)},
            {"cfg_scale", c.cfg_scale},
            {"seed", c.seed},
            {"anchors_per_pass", opt(c.anchors_per_pass)},
            {"retrieval_count", opt(c.retrieval_count)},
            {"allow_extension", opt(c.allow_extension)},
            {"anchor_stride", opt(c.anchor_stride)},
            {"retrieval", to_string(c.retrieval)},
            {"direction_weight", c.direction_weight}};
}

PlannerConfig planner_config_from_json(const Json& j, const std::string& path, const PlannerConfig& base) {
    PlannerConfig c = base;
    require_object(j, path);
    static const std::set<std::string> known{"context_window", "strategy",        "cfg_scale",        "seed",
                                             "anchors_per_pass", "retrieval_count", "anchor_stride",
                                             "allow_extension",  "retrieval",       "direction_weight"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) fail(at(path, key), "unknown key");
    const auto opt_int = [&](std::string_view key, std::optional<int>& out) {
        if (!j.contains(key)) return;
        const Json& v = j.at(std::string(key));
        out = v.is_null() ? std::nullopt : std::optional<int>(integer(v, at(path, key)));
    };
    if (const Json* v = optional_field(j, "context_window", path)) c.context_window = integer(*v, at(path, "context_window"));
    if (const Json* v = optional_field(j, "strategy", path))
        c.strategy = enumeration<Strategy>(*v, at(path, "strategy"), strategy_from_string);
    if (const Json* v = optional_field(j, "cfg_scale", path)) c.cfg_scale = number(*v, at(path, "cfg_scale"));
    if (const Json* v = optional_field(j, "seed", path)) c.seed = integer64(*v, at(path, "seed"));
    opt_int("anchors_per_pass", c.anchors_per_pass);
    opt_int("retrieval_count", c.retrieval_count);
    opt_int("anchor_stride", c.anchor_stride);
    if (j.contains("allow_extension")) {
        const Json& v = j.at("allow_extension");
        c.allow_extension = v.is_null() ? std::nullopt : std::optional<bool>(boolean(v, at(path, "allow_extension")));
    }
    if (const Json* v = optional_field(j, "retrieval", path))
        c.retrieval = enumeration<Retrieval>(*v, at(path, "retrieval"), retrieval_from_string);
    if (const Json* v = optional_field(j, "direction_weight", path))
        c.direction_weight = number(*v, at(path, "direction_weight"));
    return c;
}

Json to_json(const SamplingPlan& plan) {
    Json passes = Json::array();
    for (const auto& p : plan.passes) {
        passes.push_back({{"id", p.id},
                          {"kind", to_string(p.kind)},
                          {"ordered", p.ordered},
                          {"extended", p.extended},
                          {"cond", refs_to_json(p.conditioning)},
                          {"gen", refs_to_json(p.generation)},
                          {"deps", p.deps},
                          {"seed", p.seed},
                          {"cfg_scale", p.cfg_scale}});
    }
    Json anchor_targets = Json::array();
    for (const auto& t : plan.anchor_targets) anchor_targets.push_back(t ? Json(*t) : Json(nullptr));
    Json config = to_json(plan.config);
    config.erase("context_window");
    return {{"version", kFormatVersion},
            {"T", plan.config.context_window},
            {"strategy", to_string(plan.strategy)},
            {"config", std::move(config)},
            {"request",
             {{"task", to_string(plan.request.task)},
              {"ordered_targets", plan.request.ordered_targets},
              {"inputs", cameras_to_json(plan.request.inputs)},
              {"targets", cameras_to_json(plan.request.targets)},
              {"anchor_priors", cameras_to_json(plan.request.anchor_priors)}}},
            {"passes", std::move(passes)},
            {"anchor_cameras", cameras_to_json(plan.anchor_cameras)},
            {"anchor_targets", std::move(anchor_targets)}};
}

SamplingPlan plan_from_json(const Json& j) {
    const std::string root = "plan";
    SamplingPlan plan;
    if (integer(field(j, "version", root), at(root, "version")) != kFormatVersion)
        fail(at(root, "version"), "unsupported version");
    const std::string cfg_path = at(root, "config");
    const Json& cfg = field(j, "config", root);
    if (cfg.is_object() && cfg.contains("context_window")) fail(at(cfg_path, "context_window"), "use the top-level T");
    plan.config = planner_config_from_json(cfg, cfg_path);
    plan.config.context_window = integer(field(j, "T", root), at(root, "T"));
    plan.strategy = enumeration<Strategy>(field(j, "strategy", root), at(root, "strategy"), strategy_from_string);

    const std::string req_path = at(root, "request");
    const Json& req = field(j, "request", root);
    plan.request.task = enumeration<Task>(field(req, "task", req_path), at(req_path, "task"), task_from_string);
    plan.request.ordered_targets = boolean(field(req, "ordered_targets", req_path), at(req_path, "ordered_targets"));
    plan.request.inputs = cameras_from_json(field(req, "inputs", req_path), at(req_path, "inputs"));
    plan.request.targets = cameras_from_json(field(req, "targets", req_path), at(req_path, "targets"));
    plan.request.anchor_priors = cameras_from_json(field(req, "anchor_priors", req_path), at(req_path, "anchor_priors"));

    const std::string passes_path = at(root, "passes");
    const auto& passes = array(field(j, "passes", root), passes_path);
    for (std::size_t i = 0; i < passes.size(); ++i) {
        const std::string p = at(passes_path, i);
        const Json& e = passes[i];
        ForwardPass pass;
        pass.id = integer(field(e, "id", p), at(p, "id"));
        pass.kind = enumeration<PassKind>(field(e, "kind", p), at(p, "kind"), pass_kind_from_string);
        pass.ordered = boolean(field(e, "ordered", p), at(p, "ordered"));
        pass.extended = boolean(field(e, "extended", p), at(p, "extended"));
        pass.conditioning = refs_from_json(field(e, "cond", p), at(p, "cond"));
        pass.generation = refs_from_json(field(e, "gen", p), at(p, "gen"));
        const auto& deps = array(field(e, "deps", p), at(p, "deps"));
        for (std::size_t d = 0; d < deps.size(); ++d) pass.deps.push_back(integer(deps[d], at(at(p, "deps"), d)));
        pass.seed = integer64(field(e, "seed", p), at(p, "seed"));
        pass.cfg_scale = number(field(e, "cfg_scale", p), at(p, "cfg_scale"));
        plan.passes.push_back(std::move(pass));
    }
    plan.anchor_cameras = cameras_from_json(field(j, "anchor_cameras", root), at(root, "anchor_cameras"));
    const std::string targets_path = at(root, "anchor_targets");
    const auto& targets = array(field(j, "anchor_targets", root), targets_path);
    for (std::size_t i = 0; i < targets.size(); ++i)
        plan.anchor_targets.push_back(targets[i].is_null() ? std::nullopt
                                                           : std::optional<int>(integer(targets[i], at(targets_path, i))));
    if (plan.anchor_targets.size() != plan.anchor_cameras.size())
        fail(targets_path, "must have one entry per anchor camera");
    return plan;
}

Json to_json(const SceneManifest& manifest) {
    Json scenes = Json::array();
    for (const auto& s : manifest.scenes) {
        scenes.push_back({{"name", s.name},
                          {"trajectory_file", s.trajectory_file},
                          {"reference_dir", s.reference_dir ? Json(*s.reference_dir) : Json(nullptr)},
                          {"split_tags", s.split_tags}});
    }
    return {{"version", kFormatVersion}, {"scenes", std::move(scenes)}};
}

SceneManifest manifest_from_json(const Json& j) {
    const std::string root = "manifest";
    if (integer(field(j, "version", root), at(root, "version")) != kFormatVersion)
        fail(at(root, "version"), "unsupported version");
    SceneManifest manifest;
    std::set<std::string> names;
    const std::string scenes_path = at(root, "scenes");
    const auto& scenes = array(field(j, "scenes", root), scenes_path);
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        const std::string p = at(scenes_path, i);
        SceneEntry e;
        e.name = string(field(scenes[i], "name", p), at(p, "name"));
        if (!names.insert(e.name).second) fail(at(p, "name"), "duplicate scene name \"" + e.name + "\"");
        e.trajectory_file = string(field(scenes[i], "trajectory_file", p), at(p, "trajectory_file"));
        if (const Json* dir = optional_field(scenes[i], "reference_dir", p)) e.reference_dir = string(*dir, at(p, "reference_dir"));
        if (const Json* tags = optional_field(scenes[i], "split_tags", p)) {
            const std::string tp = at(p, "split_tags");
            array(*tags, tp);
            for (std::size_t t = 0; t < tags->size(); ++t) e.split_tags.push_back(string((*tags)[t], at(tp, t)));
        }
        manifest.scenes.push_back(std::move(e));
    }
    return manifest;
}

Json to_json(const MetricReport& r) {
    return {{"psnr", values_to_json(r.psnr)},
            {"ssim", values_to_json(r.ssim)},
            {"tsed", values_to_json(r.tsed)},
            {"psnr_mean", optional_to_json(r.psnr_mean)},
            {"ssim_mean", optional_to_json(r.ssim_mean)},
            {"tsed_mean", optional_to_json(r.tsed_mean)},
            {"disagreement", optional_to_json(r.disagreement)},
            {"lpips", optional_to_json(r.lpips)},
            {"motion_smoothness", optional_to_json(r.motion_smoothness)}};
}

MetricReport metric_report_from_json(const Json& j) {
    const std::string root = "report";
    require_object(j, root);
    MetricReport r;
    r.psnr = values_from_json(j, "psnr", root);
    r.ssim = values_from_json(j, "ssim", root);
    r.tsed = values_from_json(j, "tsed", root);
    r.psnr_mean = optional_metric(j, "psnr_mean", root);
    r.ssim_mean = optional_metric(j, "ssim_mean", root);
    r.tsed_mean = optional_metric(j, "tsed_mean", root);
    r.disagreement = optional_metric(j, "disagreement", root);
    r.lpips = optional_metric(j, "lpips", root);
    r.motion_smoothness = optional_metric(j, "motion_smoothness", root);
    return r;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::parse_error, std::string("malformed JSON: ") + e.what());
    }
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_json(text.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorKind::io_error, "write failed for " + path.string());
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::uint64_t parse_hex64(const std::string& text, const std::string& path) {
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 16);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty() || text.size() > 16)
        fail(path, "expected up to 16 hex digits");
    return value;
}

}  // namespace vcam::workbench
