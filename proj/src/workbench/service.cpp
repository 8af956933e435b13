#include "vcam/workbench/service.hpp"

#include "vcam/error.hpp"
#include "vcam/workbench/http_backend.hpp"
#include "vcam/workbench/pipeline.hpp"

// After Eigen: resolv.h, pulled in by httplib, defines a `_res` macro.
#include <httplib.h>
#include <spdlog/spdlog.h>

namespace vcam::workbench {

namespace {

HttpResponse reply(const Json& body, int status = 200) { return {status, body.dump()}; }

int status_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument:
        case ErrorKind::degenerate_geometry:
        case ErrorKind::invalid_config:
        case ErrorKind::plan_invalid:
        case ErrorKind::parse_error:
            return 400;
        case ErrorKind::backend_failure:
            return 502;
        case ErrorKind::io_error:
            return 500;
    }
    return 500;
}

// The field a failure refers to: the path prefix of a parse error, or the
// configuration key a planner error names.
std::optional<std::string> field_of(const Error& e) {
    const std::string message = e.what();
    if (e.kind() == ErrorKind::parse_error) {
        const auto colon = message.find(": ");
        if (colon != std::string::npos && message.find(' ') > colon) return message.substr(0, colon);
        return std::nullopt;
    }
    if (e.kind() == ErrorKind::invalid_config) {
        for (const char* key : {"context_window", "cfg_scale", "anchors_per_pass", "retrieval_count", "anchor_stride",
                                "direction_weight", "allow_extension"}) {
            if (message.find(key) != std::string::npos) return std::string("config.") + key;
        }
    }
    return std::nullopt;
}

HttpResponse error_reply(const Error& e) {
    Json body{{"error", to_string(e.kind())}, {"detail", e.what()}};
    if (const auto field = field_of(e)) body["field"] = *field;
    return reply(body, status_for(e.kind()));
}

const Json& member(const Json& body, const char* key) {
    if (!body.is_object()) throw Error(ErrorKind::parse_error, "body: expected an object");
    const auto it = body.find(key);
    if (it == body.end()) throw Error(ErrorKind::parse_error, std::string(key) + ": missing");
    return *it;
}

std::uint64_t seed_or(const Json& body, std::uint64_t fallback) {
    if (!body.is_object() || !body.contains("scene_seed") || body["scene_seed"].is_null()) return fallback;
    const Json& v = body["scene_seed"];
    if (!v.is_number_unsigned()) throw Error(ErrorKind::parse_error, "scene_seed: expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::vector<Camera> cameras_of(const Json& list, const std::string& path) {
    if (!list.is_array()) throw Error(ErrorKind::parse_error, path + ": expected an array");
    std::vector<Camera> out;
    for (std::size_t i = 0; i < list.size(); ++i) out.push_back(camera_from_json(list[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Json frames_json(const std::vector<Frame>& frames) {
    Json out = Json::array();
    for (const auto& f : frames) out.push_back(frame_to_json(f));
    return out;
}

}  // namespace

HttpResponse Service::handle(std::string_view method, std::string_view path, std::string_view body_text) {
    static const std::vector<std::pair<std::string_view, std::string_view>> routes{
        {"GET", "/api/health"},  {"GET", "/api/presets"}, {"POST", "/api/trajectory/preset"},
        {"POST", "/api/plan"},   {"POST", "/api/preview"}, {"POST", "/api/run"},
        {"POST", "/api/generate"},
    };
    bool known_path = false;
    bool matched = false;
    for (const auto& [m, p] : routes) {
        if (p != path) continue;
        known_path = true;
        matched = matched || m == method;
    }
    if (!known_path) return reply({{"error", "not_found"}, {"detail", std::string(path)}}, 404);
    if (!matched) return reply({{"error", "method_not_allowed"}, {"detail", std::string(method)}}, 405);

    try {
        if (path == "/api/health") return reply({{"status", "ok"}});
        if (path == "/api/presets") return reply(preset_catalog());

        const Json body = parse_json(body_text);
        if (path == "/api/trajectory/preset") return reply(to_json(preset_trajectory(body)));

        if (path == "/api/plan") {
            const TrajectoryFile file = trajectory_file_from_json(member(body, "trajectory"));
            const Json config = body.contains("config") ? body["config"] : Json::object();
            std::vector<Camera> priors;
            if (body.contains("anchors") && !body["anchors"].is_null())
                priors = trajectory_file_from_json(body["anchors"]).cameras(FrameRole::target);
            return reply(to_json(plan_trajectory(file, config, priors)));
        }

        if (path == "/api/preview") {
            const auto cameras = cameras_of(member(body, "cameras"), "cameras");
            int max_dim = 64;
            if (body.contains("max_dim")) {
                if (!body["max_dim"].is_number_integer()) throw Error(ErrorKind::parse_error, "max_dim: expected an integer");
                max_dim = body["max_dim"].get<int>();
                if (max_dim < 1) throw Error(ErrorKind::parse_error, "max_dim: must be >= 1");
            }
            return reply({{"frames", frames_json(preview_frames(cameras, seed_or(body, options_.scene_seed), max_dim))}});
        }

        if (path == "/api/run") {
            const SamplingPlan plan = plan_from_json(member(body, "plan"));
            const SyntheticScene scene = build_scene(seed_or(body, options_.scene_seed));
            std::string backend_spec = "oracle";
            if (body.contains("backend")) {
                if (!body["backend"].is_string()) throw Error(ErrorKind::parse_error, "backend: expected a string");
                backend_spec = body["backend"].get<std::string>();
            }
            const auto backend = make_backend(backend_spec, scene);
            ExecutionOptions exec;
            exec.workers = options_.workers;
            std::lock_guard lock(run_mutex_);
            const RunOutput run = run_plan(plan, *backend, scene, exec);
            return reply({{"frames", frames_json(run.result.frames)},
                          {"anchor_frames", frames_json(run.result.anchor_frames)},
                          {"summary", run_summary(plan, run)}});
        }

        // /api/generate: the oracle behind the backend wire contract.
        const GenerationRequest request = generation_request_from_json(body);
        const SyntheticScene scene = build_scene(seed_or(body, options_.scene_seed));
        return reply(to_json(oracle_generate(scene, request)));
    } catch (const Error& e) {
        spdlog::debug("{} {} failed: {}", method, path, e.what());
        return error_reply(e);
    } catch (const std::exception& e) {
        spdlog::error("{} {} failed: {}", method, path, e.what());
        return reply({{"error", "internal"}, {"detail", e.what()}}, 500);
    }
}

HttpServer::HttpServer(Service& service) : server_(std::make_unique<httplib::Server>()) {
    const auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
        const HttpResponse out = service.handle(req.method, req.path, req.body);
        res.status = out.status;
        res.set_content(out.body, "application/json");
        res.set_header("Access-Control-Allow-Origin", "*");
    };
    server_->Get(R"(/api/.*)", handler);
    server_->Post(R"(/api/.*)", handler);
    server_->Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
    server_->set_payload_max_length(512u << 20);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
    const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error(ErrorKind::io_error, "cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void HttpServer::listen() {
    if (!server_->listen_after_bind()) throw Error(ErrorKind::io_error, "HTTP server stopped with an error");
}

void HttpServer::stop() { server_->stop(); }

}  // namespace vcam::workbench
