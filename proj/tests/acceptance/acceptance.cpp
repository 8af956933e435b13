// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every check is computed against an independent oracle or
// a closed form, never against another code path of the library under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "../format_samples.hpp"
#include "vcam/error.hpp"
#include "vcam/executor.hpp"
#include "vcam/geometry.hpp"
#include "vcam/metrics.hpp"
#include "vcam/planner.hpp"
#include "vcam/renderer.hpp"
#include "vcam/trajectory.hpp"
#include "vcam/workbench/formats.hpp"

namespace fs = std::filesystem;
using namespace vcam;
using vcam::test::uniform;
using vcam::test::uniform_int;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    std::string name;
    double limit_seconds;
    std::function<Outcome()> run;
};

std::string format(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

// ------------------------------------------------------------------ stride

Outcome stride_arithmetic() {
    Outcome out;
    if (compute_stride(100, 21, 1, false) != 5) return {false, "Q=100 T=21 did not give 5"};
    if (compute_stride(100, 21, 3, true) != 6) return {false, "Q=100 T=21 P=3 gt did not give 6"};
    std::mt19937_64 rng(101);
    int checked = 0, refused = 0;
    for (int i = 0; i < 1000; ++i) {
        const int q = uniform_int(rng, 1, 5000);
        const int t = uniform_int(rng, 3, 64);
        const int p = uniform_int(rng, 1, t);
        const bool gt = test::coin(rng);
        const long den = t - 2 - (gt ? p : 0);
        if (den < 1) {
            try {
                compute_stride(q, t, p, gt);
                return {false, format("Q=%d T=%d P=%d gt=%d accepted a window with no room", q, t, p, gt)};
            } catch (const Error&) {
                ++refused;
                continue;
            }
        }
        // Floor division by repeated subtraction.
        long expected = 0;
        for (long rest = q; rest >= den; rest -= den) ++expected;
        expected = std::max(expected, 1L);
        const int got = compute_stride(q, t, p, gt);
        if (got != expected)
            return {false, format("Q=%d T=%d P=%d gt=%d: got %d, expected %ld", q, t, p, gt, got, expected)};
        ++checked;
    }
    out.detail = format("2 examples + %d random cases exact, %d refused for no room", checked, refused);
    return out;
}

// ------------------------------------------------------------------ plans

std::vector<Camera> orbit(int n, double sweep = 2 * M_PI, double elevation = 0.2) {
    TrajectorySpec spec;
    spec.params.frame_count = n;
    spec.params.radius = 3.0;
    spec.params.sweep = sweep;
    spec.params.elevation = elevation;
    return generate(spec);
}

// Independent re-derivation of the invariants; returns the first problem.
std::string check_plan(const SamplingPlan& plan) {
    const int q = static_cast<int>(plan.request.targets.size());
    const int t = plan.config.context_window;
    std::vector<int> hits(static_cast<std::size_t>(q), 0);
    std::vector<int> anchor_pass(plan.anchor_cameras.size(), -1);
    for (std::size_t i = 0; i < plan.passes.size(); ++i) {
        const auto& pass = plan.passes[i];
        if (!pass.extended && static_cast<int>(pass.length()) != t)
            return format("pass %zu has %zu frames, T=%d", i, pass.length(), t);
        for (int d : pass.deps)
            if (d < 0 || d >= static_cast<int>(i)) return format("pass %zu depends on later pass %d", i, d);
        for (const auto& ref : pass.generation) {
            if (ref.source == FrameRef::Source::target) ++hits[static_cast<std::size_t>(ref.index)];
            if (ref.source == FrameRef::Source::anchor) {
                anchor_pass[static_cast<std::size_t>(ref.index)] = static_cast<int>(i);
                if (const auto& k = plan.anchor_targets[static_cast<std::size_t>(ref.index)])
                    ++hits[static_cast<std::size_t>(*k)];
            }
        }
        for (const auto& ref : pass.conditioning) {
            if (ref.source != FrameRef::Source::anchor) continue;
            const int producer = anchor_pass[static_cast<std::size_t>(ref.index)];
            if (producer < 0) return format("pass %zu conditions on anchor %d before it exists", i, ref.index);
            if (std::find(pass.deps.begin(), pass.deps.end(), producer) == pass.deps.end()) {
                // Transitive dependency is enough; walk the DAG.
                std::vector<int> stack(pass.deps.begin(), pass.deps.end());
                std::vector<bool> seen(plan.passes.size(), false);
                bool found = false;
                while (!stack.empty() && !found) {
                    const int d = stack.back();
                    stack.pop_back();
                    if (seen[static_cast<std::size_t>(d)]) continue;
                    seen[static_cast<std::size_t>(d)] = true;
                    found = d == producer;
                    for (int e : plan.passes[static_cast<std::size_t>(d)].deps) stack.push_back(e);
                }
                if (!found) return format("pass %zu uses anchor %d without depending on its pass", i, ref.index);
            }
        }
    }
    for (int k = 0; k < q; ++k)
        if (hits[static_cast<std::size_t>(k)] != 1) return format("target %d generated %d times", k, hits[static_cast<std::size_t>(k)]);

    if (plan.strategy == Strategy::interp || plan.strategy == Strategy::gt_interp) {
        // Consecutive segments share their boundary anchor.
        int previous_end = -1;
        for (const auto& pass : plan.passes) {
            if (pass.kind != PassKind::chunk_pass) continue;
            std::vector<int> bounds;
            for (const auto& ref : pass.conditioning)
                if (ref.source == FrameRef::Source::anchor) bounds.push_back(ref.index);
            if (bounds.size() != 2) return "interp segment without two boundary anchors";
            if (previous_end >= 0 && bounds[0] != previous_end)
                return format("segment starts at anchor %d, previous ended at %d", bounds[0], previous_end);
            previous_end = bounds[1];
            const int lo = *plan.anchor_targets[static_cast<std::size_t>(bounds[0])];
            const int hi = *plan.anchor_targets[static_cast<std::size_t>(bounds[1])];
            for (const auto& ref : pass.generation)
                if (ref.source != FrameRef::Source::target || ref.index <= lo || ref.index >= hi)
                    return "segment generates a frame outside its boundary anchors";
        }
    }
    return {};
}

Outcome plan_invariants() {
    std::mt19937_64 rng(202);
    const Strategy strategies[] = {Strategy::one_pass, Strategy::nearest, Strategy::gt_nearest,
                                   Strategy::interp, Strategy::gt_interp, Strategy::automatic};
    int planned = 0, refused = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int p = uniform_int(rng, 1, 40);
        const int q = uniform_int(rng, 1, 600);
        PlannerConfig cfg;
        cfg.context_window = test::coin(rng) ? 8 : 21;
        cfg.strategy = strategies[uniform_int(rng, 0, 5)];
        cfg.seed = trial;
        ViewRequest req;
        req.inputs = orbit(p, 2 * M_PI, 0.5);
        req.targets = orbit(q);
        req.task = test::coin(rng) ? Task::set : Task::trajectory;
        req.ordered_targets = req.task == Task::trajectory;
        if (req.task == Task::set && test::coin(rng)) req.anchor_priors = orbit(uniform_int(rng, 1, 30), 2 * M_PI, 0.1);
        SamplingPlan plan;
        try {
            plan = make_plan(req, cfg);
        } catch (const Error& e) {
            // The only refusals allowed: ground-truth strategies whose inputs leave no room in the window.
            const bool no_room = (cfg.strategy == Strategy::gt_interp && p >= cfg.context_window - 2) ||
                                 (cfg.strategy == Strategy::gt_nearest && p >= cfg.context_window - 1);
            if (!no_room) return {false, format("P=%d Q=%d T=%d refused: %s", p, q, cfg.context_window, e.what())};
            ++refused;
            continue;
        }
        ++planned;
        const auto violations = validate_plan(plan);
        if (!violations.empty())
            return {false, format("P=%d Q=%d T=%d %s: %s", p, q, cfg.context_window,
                                  std::string(to_string(plan.strategy)).c_str(), violations.front().c_str())};
        if (const auto problem = check_plan(plan); !problem.empty())
            return {false, format("P=%d Q=%d T=%d %s: %s", p, q, cfg.context_window,
                                  std::string(to_string(plan.strategy)).c_str(), problem.c_str())};
    }
    return {true, format("%d plans with zero violations, %d refused as inputs exhaust window", planned, refused)};
}

// ------------------------------------------------------------------ consistency

Outcome consistency() {
    std::string detail;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SyntheticScene scene = build_scene(seed);
        ViewRequest req;
        req.targets = orbit(80, 2 * M_PI, 0.3);
        req.inputs = {req.targets[0]};
        const std::vector<Frame> inputs{render_ground_truth(scene, req.inputs[0])};
        OracleRenderer oracle(scene);
        AdjacentDisagreement result[2];
        int i = 0;
        for (auto strategy : {Strategy::one_pass, Strategy::interp}) {
            PlannerConfig cfg;
            cfg.strategy = strategy;
            cfg.seed = static_cast<std::int64_t>(seed);
            const auto plan = make_plan(req, cfg);
            result[i++] = adjacent_frame_disagreement(execute(plan, oracle, inputs), plan);
        }
        const auto& one = result[0];
        const auto& interp = result[1];
        if (!(interp.all.mean < one.all.mean))
            return {false, format("seed %llu: interp %.3f not below one-pass %.3f", (unsigned long long)seed,
                                  interp.all.mean, one.all.mean)};
        if (interp.shared_anchor.samples == 0)
            return {false, format("seed %llu: no anchor-pinned cells", (unsigned long long)seed)};
        if (interp.shared_anchor.max != 0.0)
            return {false, format("seed %llu: anchor-pinned cells disagree by %.3f", (unsigned long long)seed,
                                  interp.shared_anchor.max)};
        if (seed == 0)
            detail = format("seed 0: one-pass %.2f vs interp %.2f, %zu pinned cells at 0", one.all.mean, interp.all.mean,
                            interp.shared_anchor.samples);
    }
    return {true, detail + "; 10/10 seeds"};
}

// ------------------------------------------------------------------ loop

Outcome loop_closure() {
    // Every pair of frames at the same camera from different passes, over the
    // cells both frames copied from bank anchors. Anchor frames alone are
    // reported too.
    Outcome out;
    double lowest_temporal = std::numeric_limits<double>::infinity();
    std::size_t cells = 0;
    std::string failures;
    double anchor_worst = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SyntheticScene scene = build_scene(seed);
        ViewRequest req;
        req.targets = orbit(300, 6 * M_PI, 0.3);
        req.inputs = {req.targets[0]};
        const std::vector<Frame> inputs{render_ground_truth(scene, req.inputs[0])};
        OracleRenderer oracle(scene);
        RevisitOptions bank;
        bank.bank_pinned_only = true;
        RevisitOptions anchors = bank;
        anchors.anchors_only = true;
        for (auto retrieval : {Retrieval::spatial, Retrieval::temporal}) {
            PlannerConfig cfg;
            cfg.anchor_stride = 2;
            cfg.retrieval = retrieval;
            cfg.seed = static_cast<std::int64_t>(seed);
            const auto plan = make_plan(req, cfg);
            const auto result = execute(plan, oracle, inputs);
            const auto d = revisit_disagreement(result, plan, bank);
            if (d.samples == 0) return {false, format("seed %llu: no revisited bank-pinned cells", (unsigned long long)seed)};
            if (retrieval == Retrieval::spatial) {
                cells += d.samples;
                anchor_worst = std::max(anchor_worst, revisit_disagreement(result, plan, anchors).max);
                if (d.max != 0.0) {
                    out.pass = false;
                    failures += format("%sseed %llu mean %.4f max %.1f over %zu cells", failures.empty() ? "" : ", ",
                                       (unsigned long long)seed, d.mean, d.max, d.samples);
                }
            } else {
                if (!(d.mean > 10.0)) {
                    out.pass = false;
                    failures += format("%sseed %llu temporal only %.3f", failures.empty() ? "" : ", ",
                                       (unsigned long long)seed, d.mean);
                }
                lowest_temporal = std::min(lowest_temporal, d.mean);
            }
        }
    }
    out.detail = format("spatial over %zu revisited cells%s%s; anchor frames alone max %.1f; temporal ablation >= %.2f",
                        cells, failures.empty() ? ": all 0" : ": nonzero at ", failures.c_str(), anchor_worst,
                        lowest_temporal);
    return out;
}

// ------------------------------------------------------------------ epipolar

Mat3 axis_angle(const Vec3& axis, double angle) {
    const Vec3 a = axis.normalized();
    Mat3 k;
    k << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
    return Mat3::Identity() + std::sin(angle) * k + (1 - std::cos(angle)) * k * k;
}

Outcome epipolar() {
    std::mt19937_64 rng(404);
    double worst = 0.0;
    std::size_t matches_total = 0;
    for (int s = 0; s < 50; ++s) {
        const SyntheticScene scene = build_scene(static_cast<std::uint64_t>(1000 + s));
        const Intrinsics k{64, 64, 32, 32, 64, 64};
        const auto view_from = [&](double azimuth) {
            const Vec3 eye(3.5 * std::cos(azimuth), 3.5 * std::sin(azimuth), uniform(rng, -1.0, 1.0));
            return Camera{look_at(eye, test::random_vec(rng, 0.3)), k};
        };
        const double azimuth = uniform(rng, 0, 2 * M_PI);
        const Camera a = view_from(azimuth);
        const Camera b = view_from(azimuth + uniform(rng, 0.2, 0.8));
        const MatchSet matches = oracle_correspondences(scene, a, b, 512);
        if (matches.size() < 20) return {false, format("scene %d: only %zu correspondences", s, matches.size())};
        matches_total += matches.size();
        const SedResult exact = epipolar_sed(fundamental_matrix(a, b), matches);
        const double max_exact = *std::max_element(exact.symmetric.begin(), exact.symmetric.end());
        worst = std::max(worst, max_exact);
        if (!(max_exact < 1e-6)) return {false, format("scene %d: exact SED %.3g px", s, max_exact)};

        const Vec3 axis = test::random_vec(rng, 1.0);
        double previous = exact.mean;
        for (double noise : {1e-3, 1e-2, 1e-1}) {
            Camera noisy = b;
            noisy.pose.rotation = b.pose.rotation * axis_angle(axis, noise);
            const double sed = epipolar_sed(fundamental_matrix(a, noisy), matches).mean;
            if (!(sed > previous))
                return {false, format("scene %d: SED %.4g at %.0e rad not above %.4g", s, sed, noise, previous)};
            previous = sed;
        }
    }
    return {true, format("50 scenes, %zu matches, worst exact SED %.2g px; strictly increasing in noise", matches_total, worst)};
}

// ------------------------------------------------------------------ metrics

Outcome metric_closed_forms() {
    const Frame black(32, 32, {0, 0, 0});
    const Frame white(32, 32, {255, 255, 255});
    if (psnr(black, white) != 0.0) return {false, format("PSNR(0, 255) = %.17g", psnr(black, white))};
    std::mt19937_64 rng(606);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int w = uniform_int(rng, 11, 48), h = uniform_int(rng, 11, 48);
        Frame a(w, h), b(w, h);
        for (auto& v : a.rgb) v = static_cast<std::uint8_t>(rng() & 0xff);
        for (std::size_t j = 0; j < b.rgb.size(); ++j) {
            const int delta = uniform_int(rng, -40, 40);
            b.rgb[j] = static_cast<std::uint8_t>(std::clamp(a.rgb[j] + delta, 0, 255));
        }
        if (ssim(a, a) != 1.0) return {false, format("pair %d: SSIM(x, x) = %.17g", i, ssim(a, a))};
        long double sse = 0;
        for (std::size_t j = 0; j < a.rgb.size(); ++j) {
            const long double d = static_cast<long double>(a.rgb[j]) - b.rgb[j];
            sse += d * d;
        }
        if (sse == 0) continue;
        const long double expected = 10.0L * std::log10(65025.0L * a.rgb.size() / sse);
        const double err = std::abs(psnr(a, b) - static_cast<double>(expected));
        worst = std::max(worst, err);
        if (!(err <= 1e-9)) return {false, format("pair %d: PSNR off by %.3g dB", i, err)};
    }
    return {true, format("PSNR(0,255) = 0, SSIM(x,x) = 1, 100 PSNR pairs within %.1e dB", worst)};
}

// ------------------------------------------------------------------ sweep

Outcome scale_sweep() {
    const double planted = 0.7;
    std::vector<double> grid;
    for (int i = 0; i < 20; ++i) grid.push_back(0.1 + 1.9 * i / 19.0);
    const double step = grid[1] - grid[0];
    std::string picks;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SyntheticScene scene = build_scene(seed).translated(Vec3(0, 0, 2.5));
        const Intrinsics k{64, 64, 32, 32, 64, 64};
        ViewRequest req;
        req.inputs = {Camera{Pose::identity(), k}};
        for (int i = 0; i < 8; ++i) {
            const double a = 2 * M_PI * i / 8;
            req.targets.push_back({look_at(Vec3(std::cos(a), std::sin(a), 0), Vec3(0, 0, 2.5), Vec3(0, -1, 0)), k});
        }
        // References: ground truth at cameras rescaled by hand to the planted unit length.
        double extent = 0.0;
        for (const auto& c : req.targets) extent = std::max(extent, c.pose.translation.cwiseAbs().maxCoeff());
        std::vector<Frame> refs;
        for (Camera c : req.targets) {
            c.pose.translation = c.pose.translation / extent * planted;
            refs.push_back(render_ground_truth(scene, c));
        }
        const std::vector<Frame> inputs{render_ground_truth(scene, req.inputs[0])};
        OracleRenderer oracle(scene);
        PlannerConfig cfg;
        cfg.seed = static_cast<std::int64_t>(seed);
        const auto result = sweep_scale(req, cfg, oracle, inputs, refs, grid);
        picks += format("%s%.2f", picks.empty() ? "" : " ", result.best_unit_length);
        if (std::abs(result.best_unit_length - planted) > step + 1e-9)
            return {false, format("seed %llu picked %.3f", (unsigned long long)seed, result.best_unit_length)};
    }
    return {true, "picked " + picks + " for u* = 0.70 (grid step 0.10)"};
}

// ------------------------------------------------------------------ normalization

Vec2 project(const Camera& c, const Vec3& world) {
    const Vec3 p = c.pose.rotation.transpose() * (world - c.pose.translation);
    return {c.intrinsics.fx * p.x() / p.z() + c.intrinsics.cx, c.intrinsics.fy * p.y() / p.z() + c.intrinsics.cy};
}

Outcome normalization() {
    std::mt19937_64 rng(808);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<Camera> cams;
        const int n = uniform_int(rng, 2, 20);
        const double spread = std::pow(10.0, uniform(rng, -2, 3));
        for (int j = 0; j < n; ++j) cams.push_back(test::random_camera(rng, spread));
        const double unit = uniform(rng, 0.1, 5.0);
        const auto out = normalize_scene(relative_to_first(cams), unit);
        double extent = 0.0;
        for (const auto& c : out.cameras)
            for (int d = 0; d < 3; ++d) extent = std::max(extent, std::abs(c.pose.translation[d]));
        worst = std::max(worst, std::abs(extent - unit));
        if (!(std::abs(extent - unit) <= 1e-12)) return {false, format("cloud %d: inf-norm %.17g vs %.17g", i, extent, unit)};
    }
    double ray_worst = 0.0, px_worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Camera cam = test::random_camera(rng, 3.0, 32);
        const auto map = plucker_map(cam);
        if (map.rays.size() != 32u * 32u) return {false, "Plucker map is not 32x32"};
        for (int r = 0; r < 32; ++r) {
            for (int c = 0; c < 32; ++c) {
                const auto& ray = map.at(r, c);
                ray_worst = std::max({ray_worst, std::abs(ray.direction.norm() - 1.0), std::abs(ray.direction.dot(ray.moment))});
                // A point on the line: origin-closest point plus a step in front of the camera.
                const Vec3 closest = ray.direction.cross(ray.moment);
                const double along = (cam.pose.translation - closest).dot(ray.direction);
                const Vec2 px = project(cam, closest + (along + 1.5) * ray.direction);
                px_worst = std::max(px_worst, (px - Vec2(c + 0.5, r + 0.5)).norm());
            }
        }
    }
    if (!(ray_worst < 1e-9) || !(px_worst < 1e-6))
        return {false, format("Plucker: invariant error %.2g, reprojection %.2g px", ray_worst, px_worst)};
    return {true, format("1000 clouds within %.1e; Plucker invariants %.1e, reprojection %.1e px", worst, ray_worst, px_worst)};
}

// ------------------------------------------------------------------ determinism

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files, std::string& why) {
    std::vector<fs::path> left, right;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) left.push_back(fs::relative(e.path(), a));
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) right.push_back(fs::relative(e.path(), b));
    std::sort(left.begin(), left.end());
    std::sort(right.begin(), right.end());
    if (left != right) {
        why = "file lists differ";
        return false;
    }
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };
    for (const auto& rel : left) {
        if (slurp(a / rel) != slurp(b / rel)) {
            why = rel.string() + " differs";
            return false;
        }
    }
    files = left.size();
    return true;
}

Outcome run_determinism() {
    const fs::path dir = fs::temp_directory_path() / ("vcam_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string vcam = VCAM_BINARY;
    const auto sh = [&](const std::string& args) {
        const std::string cmd = "'" + vcam + "' " + args + " > /dev/null 2>> '" + (dir / "stderr.txt").string() + "'";
        return std::system(cmd.c_str());
    };
    const std::string d = dir.string();
    if (sh("preset orbit --n 120 --inputs 2 --out '" + d + "/t.json'") != 0) return {false, "preset failed"};
    if (sh("plan '" + d + "/t.json' -T 12 --anchor-stride 3 --seed 9 --out '" + d + "/p.json'") != 0)
        return {false, "plan failed"};
    const std::string flags = " --scene-seed 5 --workers 2";
    if (sh("run '" + d + "/p.json' --out '" + d + "/a'" + flags) != 0) return {false, "first run failed"};
    if (sh("run '" + d + "/p.json' --out '" + d + "/b'" + flags) != 0) return {false, "second run failed"};
    if (sh("eval --pred '" + d + "/a/frames' --ref '" + d + "/b/frames' --out '" + d + "/a/report.json'") != 0 ||
        sh("eval --pred '" + d + "/b/frames' --ref '" + d + "/a/frames' --out '" + d + "/b/report.json'") != 0)
        return {false, "eval failed"};
    std::size_t files = 0;
    std::string why;
    const bool same = same_tree(dir / "a", dir / "b", files, why);
    fs::remove_all(dir);
    if (!same) return {false, why};
    return {true, format("%zu files byte-identical across two runs", files)};
}

// ------------------------------------------------------------------ formats

Outcome format_round_trips() {
    using namespace vcam::workbench;
    std::mt19937_64 rng(1010);
    for (int i = 0; i < 200; ++i) {
        if (!test::round_trips(test::random_trajectory_file(rng), trajectory_file_from_json))
            return {false, format("trajectory file %d", i)};
        if (!test::round_trips(test::random_plan(rng), plan_from_json)) return {false, format("plan file %d", i)};
        if (!test::round_trips(test::random_manifest(rng), manifest_from_json)) return {false, format("manifest %d", i)};
        if (!test::round_trips(test::random_report(rng), metric_report_from_json)) return {false, format("report %d", i)};
    }
    return {true, "200 instances each of trajectory, plan, manifest and report files"};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"stride arithmetic", 1, stride_arithmetic},
        {"plan invariant suite", 30, plan_invariants},
        {"consistency mechanism", 60, consistency},
        {"memory-bank loop closure", 120, loop_closure},
        {"epipolar suite", 30, epipolar},
        {"metric closed forms", 10, metric_closed_forms},
        {"scale-sweep recovery", 60, scale_sweep},
        {"normalization exactness", 10, normalization},
        {"run determinism", 120, run_determinism},
        {"format round-trips", 120, format_round_trips},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.pass && seconds > c.limit_seconds) {
            o.pass = false;
            o.detail += format("; over the %.0f s budget", c.limit_seconds);
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s  %-26s %7.2fs / %4.0fs  %s\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), seconds,
                    c.limit_seconds, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
