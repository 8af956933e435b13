#include "vcam/workbench/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "vcam/error.hpp"
#include "vcam/workbench/image_io.hpp"
#include "vcam/workbench/pipeline.hpp"
#include "vcam/workbench/service.hpp"

namespace vcam::workbench {

namespace fs = std::filesystem;

namespace {

void configure_logging() {
    static std::once_flag once;
    std::call_once(once, [] {
        auto logger = spdlog::stderr_color_mt("vcam");
        spdlog::set_default_logger(logger);
        spdlog::set_level(spdlog::level::info);
        if (const char* level = std::getenv("VCAM_LOG")) spdlog::set_level(spdlog::level::from_str(level));
    });
}

void emit(std::ostream& out, const std::string& path, const Json& j) {
    if (path.empty() || path == "-") {
        out << dump(j);
    } else {
        write_text_file(path, dump(j));
    }
}

// Planner flags shared by `plan` and `sweep-scale`.
struct PlanFlags {
    int context = 21;
    std::string strategy = "auto";
    std::int64_t seed = 0;
    double cfg = 3.0;
    int anchors_per_pass = 0;
    int retrieval_count = 0;
    int anchor_stride = 0;
    std::string retrieval = "spatial";
    std::string extension = "auto";
    std::string task;
    std::string anchors_file;

    void add(CLI::App& app) {
        app.add_option("-T,--context", context, "context window T")->capture_default_str();
        app.add_option("--strategy", strategy, "one_pass|nearest|gt_nearest|interp|gt_interp|auto")->capture_default_str();
        app.add_option("--seed", seed, "sampling seed")->capture_default_str();
        app.add_option("--cfg", cfg, "guidance scale")->capture_default_str();
        app.add_option("--anchors-per-pass", anchors_per_pass, "memory-bank anchors per pass (G)");
        app.add_option("--retrieval-count", retrieval_count, "memory-bank retrieved frames per pass (R)");
        app.add_option("--anchor-stride", anchor_stride, "override the anchor stride");
        app.add_option("--retrieval", retrieval, "spatial|temporal")->capture_default_str();
        app.add_option("--extension", extension, "on|off|auto")->capture_default_str();
        app.add_option("--task", task, "set|trajectory (default: from the file)");
        app.add_option("--anchors", anchors_file, "trajectory file whose targets are anchor priors");
    }

    Json config(const CLI::App& app) const {
        Json c{{"context_window", context},
               {"strategy", strategy},
               {"seed", seed},
               {"cfg_scale", cfg},
               {"retrieval", retrieval}};
        if (app.count("--anchors-per-pass")) c["anchors_per_pass"] = anchors_per_pass;
        if (app.count("--retrieval-count")) c["retrieval_count"] = retrieval_count;
        if (app.count("--anchor-stride")) c["anchor_stride"] = anchor_stride;
        if (extension == "on") c["allow_extension"] = true;
        else if (extension == "off") c["allow_extension"] = false;
        else if (extension != "auto") throw Error(ErrorKind::invalid_argument, "--extension must be on, off or auto");
        return c;
    }

    TrajectoryFile load(const std::string& path) const {
        TrajectoryFile file = trajectory_file_from_json(read_json_file(path));
        if (!task.empty()) {
            const auto t = task_from_string(task);
            if (!t) throw Error(ErrorKind::invalid_argument, "--task must be set or trajectory");
            file.task = *t;
        }
        return file;
    }

    std::vector<Camera> priors() const {
        if (anchors_file.empty()) return {};
        return trajectory_file_from_json(read_json_file(anchors_file)).cameras(FrameRole::target);
    }
};

void clear_pngs(const fs::path& dir) {
    if (!fs::is_directory(dir)) return;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".png") fs::remove(entry.path());
}

std::string numbered(const char* prefix, std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof name, "%s_%05zu.png", prefix, i);
    return name;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    configure_logging();
    CLI::App app{"Camera-path planning and generative view-synthesis workbench", "vcam"};
    app.require_subcommand(1);

    // preset
    auto* preset = app.add_subcommand("preset", "write a preset trajectory");
    std::string kind, preset_out, keyframes_file;
    int n = 0, inputs = 1, width = 0, height = 0;
    double radius = 0, elevation = 0, sweep = 0, start_azimuth = 0, distance = 0, end_distance = 0, focal_scale = 0,
           vertical_ratio = 0, depth_amplitude = 0, loops = 0, pan_extent = 0, focal = 0;
    std::vector<double> center;
    bool open = false;
    preset->add_option("kind", kind, "orbit|spiral|pan|zoom_in|zoom_out|dolly_zoom|keyframes")->required();
    preset->add_option("--n", n, "number of cameras");
    preset->add_option("--inputs", inputs, "leading cameras also used as inputs")->capture_default_str();
    preset->add_option("--radius", radius);
    preset->add_option("--elevation", elevation, "radians");
    preset->add_option("--center", center)->expected(3);
    preset->add_flag("--open", open, "keep the endpoint of a loop");
    preset->add_option("--sweep", sweep, "orbit azimuth span, radians");
    preset->add_option("--start-azimuth", start_azimuth);
    preset->add_option("--distance", distance);
    preset->add_option("--end-distance", end_distance);
    preset->add_option("--focal-scale", focal_scale);
    preset->add_option("--vertical-ratio", vertical_ratio);
    preset->add_option("--depth-amplitude", depth_amplitude);
    preset->add_option("--loops", loops);
    preset->add_option("--pan-extent", pan_extent);
    preset->add_option("--width", width);
    preset->add_option("--height", height);
    preset->add_option("--focal", focal, "fx = fy");
    preset->add_option("--keyframes", keyframes_file, "trajectory file whose targets are keyframes at times 0, 1, ...");
    preset->add_option("--out", preset_out, "output file (default stdout)");

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "plan a trajectory file");
    std::string plan_in, plan_out;
    PlanFlags plan_flags;
    plan_cmd->add_option("trajectory", plan_in)->required();
    plan_flags.add(*plan_cmd);
    plan_cmd->add_option("--out", plan_out, "output file (default stdout)");

    // run
    auto* run_cmd = app.add_subcommand("run", "execute a plan file");
    std::string run_in, run_out, backend_spec = "oracle";
    std::uint64_t scene_seed = 0;
    int workers = 1;
    run_cmd->add_option("plan", run_in)->required();
    run_cmd->add_option("--backend", backend_spec, "oracle or http:<url>")->capture_default_str();
    run_cmd->add_option("--scene-seed", scene_seed)->capture_default_str();
    run_cmd->add_option("--workers", workers)->capture_default_str();
    run_cmd->add_option("--out", run_out, "output directory")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "score predicted frames against references");
    std::string pred_dir, ref_dir, eval_traj, eval_out;
    std::uint64_t eval_seed = 0;
    eval_cmd->add_option("--pred", pred_dir)->required();
    eval_cmd->add_option("--ref", ref_dir)->required();
    eval_cmd->add_option("--trajectory", eval_traj, "target cameras; enables TSED with oracle correspondences");
    eval_cmd->add_option("--scene-seed", eval_seed)->capture_default_str();
    eval_cmd->add_option("--out", eval_out, "report file (default stdout)");

    // sweep-scale
    auto* sweep_cmd = app.add_subcommand("sweep-scale", "pick the normalization unit length for a single input");
    std::string sweep_in, sweep_ref, sweep_out, sweep_backend = "oracle";
    PlanFlags sweep_flags;
    std::uint64_t sweep_seed = 0;
    double planted = 0, grid_min = 0.1, grid_max = 2.0;
    int grid_n = 20;
    sweep_cmd->add_option("trajectory", sweep_in)->required();
    sweep_flags.add(*sweep_cmd);
    sweep_cmd->add_option("--backend", sweep_backend)->capture_default_str();
    sweep_cmd->add_option("--scene-seed", sweep_seed)->capture_default_str();
    sweep_cmd->add_option("--ref", sweep_ref, "reference frames, one per target");
    sweep_cmd->add_option("--planted", planted, "render oracle references at this unit length");
    sweep_cmd->add_option("--grid-min", grid_min)->capture_default_str();
    sweep_cmd->add_option("--grid-max", grid_max)->capture_default_str();
    sweep_cmd->add_option("--grid-n", grid_n)->capture_default_str();
    sweep_cmd->add_option("--out", sweep_out, "output file (default stdout)");

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "check a plan file's invariants");
    std::string validate_in;
    validate_cmd->add_option("plan", validate_in)->required();

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "HTTP service");
    std::string host = "127.0.0.1";
    int port = 8080;
    std::uint64_t serve_seed = 0;
    int serve_workers = 1;
    serve_cmd->add_option("--host", host)->capture_default_str();
    serve_cmd->add_option("--port", port)->capture_default_str();
    serve_cmd->add_option("--scene-seed", serve_seed)->capture_default_str();
    serve_cmd->add_option("--workers", serve_workers)->capture_default_str();

    const auto error_line = [&err](std::string_view kind, const std::string& detail) {
        err << Json{{"error", kind}, {"detail", detail}}.dump() << "\n";
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        error_line("usage", e.what());
        return 2;
    }

    try {
        if (*preset) {
            Json params = Json::object();
            if (preset->count("--n")) params["frame_count"] = n;
            params["inputs"] = inputs;
            if (preset->count("--radius")) params["radius"] = radius;
            if (preset->count("--elevation")) params["elevation"] = elevation;
            if (preset->count("--center")) params["center"] = center;
            if (open) params["closed"] = false;
            if (preset->count("--sweep")) params["sweep"] = sweep;
            if (preset->count("--start-azimuth")) params["start_azimuth"] = start_azimuth;
            if (preset->count("--distance")) params["distance"] = distance;
            if (preset->count("--end-distance")) params["end_distance"] = end_distance;
            if (preset->count("--focal-scale")) params["focal_scale"] = focal_scale;
            if (preset->count("--vertical-ratio")) params["vertical_ratio"] = vertical_ratio;
            if (preset->count("--depth-amplitude")) params["depth_amplitude"] = depth_amplitude;
            if (preset->count("--loops")) params["loops"] = loops;
            if (preset->count("--pan-extent")) params["pan_extent"] = pan_extent;
            if (preset->count("--width") || preset->count("--height") || preset->count("--focal")) {
                Intrinsics k = TrajectorySpec{}.base_intrinsics;
                if (preset->count("--width")) {
                    k.width = width;
                    k.cx = width / 2.0;
                }
                if (preset->count("--height")) {
                    k.height = height;
                    k.cy = height / 2.0;
                }
                if (preset->count("--focal")) k.fx = k.fy = focal;
                params["intrinsics"] = to_json(k);
            }
            if (!keyframes_file.empty()) {
                const auto keys = trajectory_file_from_json(read_json_file(keyframes_file)).cameras(FrameRole::target);
                Json list = Json::array();
                for (std::size_t i = 0; i < keys.size(); ++i)
                    list.push_back({{"camera", to_json(keys[i])}, {"time", static_cast<double>(i)}});
                params["keyframes"] = std::move(list);
            }
            emit(out, preset_out, to_json(preset_trajectory({{"kind", kind}, {"params", params}})));
            return 0;
        }

        if (*plan_cmd) {
            const TrajectoryFile file = plan_flags.load(plan_in);
            emit(out, plan_out, to_json(plan_trajectory(file, plan_flags.config(*plan_cmd), plan_flags.priors())));
            return 0;
        }

        if (*run_cmd) {
            const SamplingPlan plan = plan_from_json(read_json_file(run_in));
            const SyntheticScene scene = build_scene(scene_seed);
            const auto backend = make_backend(backend_spec, scene);
            ExecutionOptions options;
            options.workers = workers;
            const RunOutput run = run_plan(plan, *backend, scene, options);
            const fs::path dir(run_out);
            clear_pngs(dir / "frames");
            clear_pngs(dir / "anchors");
            fs::create_directories(dir / "frames");
            for (std::size_t i = 0; i < run.result.frames.size(); ++i)
                write_png(dir / "frames" / numbered("frame", i), run.result.frames[i]);
            if (!run.result.anchor_frames.empty()) {
                fs::create_directories(dir / "anchors");
                for (std::size_t i = 0; i < run.result.anchor_frames.size(); ++i)
                    write_png(dir / "anchors" / numbered("anchor", i), run.result.anchor_frames[i]);
            }
            write_text_file(dir / "result.json", dump(run_summary(plan, run)));
            for (const auto& log : run.result.per_pass_log)
                spdlog::debug("pass {} took {:.1f} ms", log.pass, log.duration_ms);
            out << Json{{"frames", run.result.frames.size()}, {"out", dir.string()}}.dump() << "\n";
            return 0;
        }

        if (*eval_cmd) {
            const auto pred = read_png_dir(pred_dir);
            const auto ref = read_png_dir(ref_dir);
            if (pred.size() != ref.size() || pred.empty())
                throw Error(ErrorKind::invalid_argument, "need the same nonzero number of predicted and reference frames (" +
                                                             std::to_string(pred.size()) + " vs " +
                                                             std::to_string(ref.size()) + ")");
            MetricReport report = evaluate_frames(pred, ref);
            if (!eval_traj.empty()) {
                const auto cams = trajectory_file_from_json(read_json_file(eval_traj)).cameras(FrameRole::target);
                if (cams.size() != pred.size()) throw Error(ErrorKind::invalid_argument, "one target camera per frame is required");
                if (cams.size() >= 2) {
                    const SyntheticScene scene = build_scene(eval_seed);
                    std::vector<MatchSet> matches;
                    for (std::size_t i = 0; i + 1 < cams.size(); ++i)
                        matches.push_back(oracle_correspondences(scene, cams[i], cams[i + 1]));
                    const auto t = tsed(pred, cams, matches);
                    report.tsed = t.pair_means;
                    report.tsed_mean = t.mean;
                }
            }
            emit(out, eval_out, to_json(report));
            return 0;
        }

        if (*sweep_cmd) {
            const TrajectoryFile file = sweep_flags.load(sweep_in);
            const PlannerConfig cfg = planner_config_from_json(sweep_flags.config(*sweep_cmd));
            ViewRequest request = file.to_request();
            request.anchor_priors = sweep_flags.priors();
            const SyntheticScene scene = build_scene(sweep_seed);
            std::vector<Frame> inputs;
            for (const auto& c : request.inputs) inputs.push_back(render_ground_truth(scene, c));
            std::vector<Frame> refs;
            if (!sweep_ref.empty()) {
                refs = read_png_dir(sweep_ref);
            } else if (sweep_cmd->count("--planted")) {
                for (const auto& c : normalize_request(request, planted).targets) refs.push_back(render_ground_truth(scene, c));
            } else {
                throw Error(ErrorKind::invalid_argument, "missing references: pass --ref or --planted");
            }
            if (grid_n < 1) throw Error(ErrorKind::invalid_argument, "--grid-n must be >= 1");
            std::vector<double> grid;
            for (int i = 0; i < grid_n; ++i)
                grid.push_back(grid_n == 1 ? grid_min : grid_min + (grid_max - grid_min) * i / (grid_n - 1));
            const auto backend = make_backend(sweep_backend, scene);
            emit(out, sweep_out, to_json(sweep_scale(request, cfg, *backend, inputs, refs, grid)));
            return 0;
        }

        if (*validate_cmd) {
            const auto violations = validate_plan(plan_from_json(read_json_file(validate_in)));
            out << Json{{"valid", violations.empty()}, {"violations", violations}}.dump() << "\n";
            if (violations.empty()) return 0;
            error_line(to_string(ErrorKind::plan_invalid), std::to_string(violations.size()) + " violation(s)");
            return 1;
        }

        if (*serve_cmd) {
            ServiceOptions options;
            options.scene_seed = serve_seed;
            options.workers = serve_workers;
            Service service(options);
            HttpServer server(service);
            const int bound = server.bind(host, port);
            out << Json{{"listening", host + ":" + std::to_string(bound)}}.dump() << std::endl;
            server.listen();
            return 0;
        }
    } catch (const Error& e) {
        error_line(to_string(e.kind()), e.what());
        return 1;
    } catch (const fs::filesystem_error& e) {
        error_line(to_string(ErrorKind::io_error), e.what());
        return 1;
    } catch (const std::exception& e) {
        error_line("internal", e.what());
        return 1;
    }
    return 0;
}

}  // namespace vcam::workbench
