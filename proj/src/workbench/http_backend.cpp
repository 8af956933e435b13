#include "vcam/workbench/http_backend.hpp"

#include <httplib.h>

#include "vcam/error.hpp"
#include "vcam/workbench/image_io.hpp"

namespace vcam::workbench {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::parse_error, path + ": " + what);
}

const Json& member(const Json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing");
    return *it;
}

const Json& list(const Json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array");
    return j;
}

}  // namespace

Json frame_to_json(const Frame& frame) {
    return {{"width", frame.width}, {"height", frame.height}, {"png", frame_to_base64(frame)}};
}

Frame frame_from_json(const Json& j, const std::string& path) {
    const Json& png = member(j, "png", path);
    if (!png.is_string()) fail(path + ".png", "expected a base64 string");
    Frame frame;
    try {
        frame = frame_from_base64(png.get<std::string>());
    } catch (const Error& e) {
        fail(path + ".png", e.what());
    }
    const Json& w = member(j, "width", path);
    const Json& h = member(j, "height", path);
    if (!w.is_number_integer() || !h.is_number_integer() || w.get<int>() != frame.width || h.get<int>() != frame.height)
        fail(path, "width/height do not match the PNG");
    return frame;
}

Json to_json(const GenerationRequest& request) {
    Json conditioning = Json::array();
    for (const auto& c : request.conditioning) {
        conditioning.push_back(
            {{"camera", to_json(c.camera)}, {"frame", frame_to_json(c.frame)}, {"content_hash", hex64(c.content_hash)}});
    }
    Json targets = Json::array();
    for (const auto& t : request.targets) targets.push_back(to_json(t));
    return {{"conditioning", std::move(conditioning)},
            {"targets", std::move(targets)},
            {"ordered", request.ordered},
            {"seed", request.seed},
            {"cfg_scale", request.cfg_scale}};
}

GenerationRequest generation_request_from_json(const Json& j) {
    const std::string root = "request";
    GenerationRequest r;
    const auto& cond = list(member(j, "conditioning", root), root + ".conditioning");
    for (std::size_t i = 0; i < cond.size(); ++i) {
        const std::string p = root + ".conditioning[" + std::to_string(i) + "]";
        ConditioningFrame c;
        c.camera = camera_from_json(member(cond[i], "camera", p), p + ".camera");
        c.frame = frame_from_json(member(cond[i], "frame", p), p + ".frame");
        const Json& hash = member(cond[i], "content_hash", p);
        if (!hash.is_string()) fail(p + ".content_hash", "expected a hex string");
        c.content_hash = parse_hex64(hash.get<std::string>(), p + ".content_hash");
        if (c.content_hash != content_hash(c.frame)) fail(p + ".content_hash", "does not match the frame pixels");
        r.conditioning.push_back(std::move(c));
    }
    const auto& targets = list(member(j, "targets", root), root + ".targets");
    for (std::size_t i = 0; i < targets.size(); ++i)
        r.targets.push_back(camera_from_json(targets[i], root + ".targets[" + std::to_string(i) + "]"));
    const Json& ordered = member(j, "ordered", root);
    const Json& seed = member(j, "seed", root);
    const Json& cfg = member(j, "cfg_scale", root);
    if (!ordered.is_boolean()) fail(root + ".ordered", "expected true or false");
    if (!seed.is_number_integer()) fail(root + ".seed", "expected an integer");
    if (!cfg.is_number()) fail(root + ".cfg_scale", "expected a number");
    r.ordered = ordered.get<bool>();
    r.seed = seed.get<std::int64_t>();
    r.cfg_scale = cfg.get<double>();
    return r;
}

Json to_json(const GenerationOutput& output) {
    Json frames = Json::array();
    for (const auto& f : output.frames) frames.push_back(frame_to_json(f));
    return {{"frames", std::move(frames)}};
}

GenerationOutput generation_output_from_json(const Json& j) {
    GenerationOutput out;
    const auto& frames = list(member(j, "frames", "response"), "response.frames");
    for (std::size_t i = 0; i < frames.size(); ++i)
        out.frames.push_back(frame_from_json(frames[i], "response.frames[" + std::to_string(i) + "]"));
    return out;
}

HttpBackend::HttpBackend(std::string base_url, int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {
    while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
    if (base_url_.empty()) throw Error(ErrorKind::invalid_argument, "empty backend URL");
}

GenerationOutput HttpBackend::generate(const GenerationRequest& request) {
    // One client per call: requests may arrive from several worker threads.
    httplib::Client client(base_url_);
    client.set_read_timeout(timeout_seconds_, 0);
    client.set_write_timeout(timeout_seconds_, 0);
    const auto res = client.Post("/api/generate", to_json(request).dump(), "application/json");
    if (!res) throw Error(ErrorKind::backend_failure, base_url_ + ": " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw Error(ErrorKind::backend_failure, base_url_ + " answered " + std::to_string(res->status) + ": " + res->body);
    GenerationOutput out = generation_output_from_json(parse_json(res->body));
    if (out.frames.size() != request.targets.size())
        throw Error(ErrorKind::backend_failure, "backend returned " + std::to_string(out.frames.size()) + " frames for " +
                                                    std::to_string(request.targets.size()) + " targets");
    return out;
}

}  // namespace vcam::workbench
