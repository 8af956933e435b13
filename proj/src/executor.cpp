#include "vcam/executor.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "vcam/error.hpp"
#include "vcam/metrics.hpp"

namespace vcam {

namespace {

struct PassOutput {
    std::vector<Frame> frames;
    std::vector<ResolvedTrace> traces;
    PassLog log;
};

class Run {
public:
    Run(const SamplingPlan& plan, GenerativeRenderer& backend, std::span<const Frame> inputs)
        : plan_(plan), backend_(backend), inputs_(inputs) {
        const auto q = plan.request.targets.size();
        const auto a = plan.anchor_cameras.size();
        result_.frames.resize(q);
        result_.target_pass.assign(q, -1);
        result_.target_traces.resize(q);
        result_.anchor_frames.resize(a);
        result_.anchor_pass.assign(a, -1);
        result_.anchor_traces.resize(a);
        result_.per_pass_log.resize(plan.passes.size());
    }

    ExecutionResult run(int workers) {
        const std::size_t n = plan_.passes.size();
        std::vector<int> waiting(n, 0);
        std::vector<std::vector<int>> dependents(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (int d : plan_.passes[i].deps) {
                ++waiting[i];
                dependents[static_cast<std::size_t>(d)].push_back(static_cast<int>(i));
            }
        }
        std::set<int> ready;
        for (std::size_t i = 0; i < n; ++i)
            if (waiting[i] == 0) ready.insert(static_cast<int>(i));

        std::mutex mutex;
        std::condition_variable cv;
        std::size_t finished = 0;
        std::exception_ptr failure;

        const auto worker = [&] {
            std::unique_lock lock(mutex);
            while (true) {
                cv.wait(lock, [&] { return failure || finished == n || !ready.empty(); });
                if (failure || finished == n) return;
                const int id = *ready.begin();
                ready.erase(ready.begin());
                GenerationRequest request;
                try {
                    request = build_request(plan_.passes[static_cast<std::size_t>(id)]);
                } catch (...) {
                    failure = std::current_exception();
                    cv.notify_all();
                    return;
                }
                lock.unlock();

                PassOutput output;
                std::exception_ptr error;
                try {
                    output = generate(plan_.passes[static_cast<std::size_t>(id)], std::move(request));
                } catch (...) {
                    error = std::current_exception();
                }

                lock.lock();
                if (error) {
                    if (!failure) failure = error;
                } else {
                    store(plan_.passes[static_cast<std::size_t>(id)], std::move(output));
                    ++finished;
                    for (int next : dependents[static_cast<std::size_t>(id)])
                        if (--waiting[static_cast<std::size_t>(next)] == 0) ready.insert(next);
                }
                cv.notify_all();
            }
        };

        const int count = std::max(1, std::min<int>(workers, static_cast<int>(std::max<std::size_t>(n, 1))));
        {
            std::vector<std::jthread> pool;
            for (int w = 0; w < count; ++w) pool.emplace_back(worker);
        }
        if (failure) std::rethrow_exception(failure);
        result_.memory_bank_size = bank_.size();
        return std::move(result_);
    }

private:
    std::pair<Camera, const Frame*> resolve(const FrameRef& ref) const {
        const auto i = static_cast<std::size_t>(ref.index);
        switch (ref.source) {
            case FrameRef::Source::input: return {plan_.request.inputs[i], &inputs_[i]};
            case FrameRef::Source::anchor: return {plan_.anchor_cameras[i], &result_.anchor_frames[i]};
            case FrameRef::Source::target: return {plan_.request.targets[i], &result_.frames[i]};
            case FrameRef::Source::pad: break;
        }
        throw Error(ErrorKind::plan_invalid, "pad reference has no frame of its own");
    }

    // Called with the state lock held.
    GenerationRequest build_request(const ForwardPass& pass) const {
        GenerationRequest request;
        request.ordered = pass.ordered;
        request.seed = pass.seed;
        request.cfg_scale = pass.cfg_scale;
        for (const auto& ref : pass.conditioning) {
            if (ref.source == FrameRef::Source::pad) {
                request.conditioning.push_back(request.conditioning.front());
                continue;
            }
            const auto [camera, frame] = resolve(ref);
            if (frame->rgb.empty())
                throw Error(ErrorKind::plan_invalid, "pass " + std::to_string(pass.id) + " conditions on a frame that is not generated yet");
            request.conditioning.push_back({camera, *frame, content_hash(*frame)});
        }
        for (const auto& ref : pass.generation) request.targets.push_back(resolve(ref).first);
        return request;
    }

    // Follows a copied patch back to the frame it was taken from.
    PatchOrigin origin_of(const ForwardPass& pass, PatchId patch, const PatchTrace& trace) const {
        PatchOrigin origin;
        origin.rgb = trace.rgb;
        if (trace.kind == PatchTrace::Kind::hallucinated) {
            origin.kind = PatchOrigin::Kind::hallucinated;
            origin.pass = pass.id;
            return origin;
        }
        FrameRef ref = pass.conditioning.at(static_cast<std::size_t>(trace.slot));
        if (ref.source == FrameRef::Source::pad) ref = pass.conditioning.front();
        if (ref.source == FrameRef::Source::input) return origin;

        const ResolvedTrace& upstream = ref.source == FrameRef::Source::anchor
                                            ? result_.anchor_traces[static_cast<std::size_t>(ref.index)]
                                            : result_.target_traces[static_cast<std::size_t>(ref.index)];
        if (const auto it = upstream.find(patch); it != upstream.end()) {
            origin.kind = it->second.kind;
            origin.pass = it->second.pass;
            origin.via_anchor = it->second.via_anchor;
        }
        if (ref.source == FrameRef::Source::anchor) {
            origin.via_anchor = true;
            origin.direct_anchor = ref.index;
        }
        return origin;
    }

    PassOutput generate(const ForwardPass& pass, GenerationRequest request) {
        PassOutput output;
        output.log.pass = pass.id;
        for (const auto& c : request.conditioning) output.log.conditioning_hashes.push_back(c.content_hash);
        const auto start = std::chrono::steady_clock::now();
        GenerationOutput generated;
        try {
            generated = backend_.generate(request);
        } catch (const std::exception& e) {
            throw Error(ErrorKind::backend_failure, "pass " + std::to_string(pass.id) + ": " + e.what());
        }
        output.log.duration_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (generated.frames.size() != pass.generation.size())
            throw Error(ErrorKind::backend_failure, "pass " + std::to_string(pass.id) + ": backend returned " +
                                                        std::to_string(generated.frames.size()) + " frames, expected " +
                                                        std::to_string(pass.generation.size()));
        for (std::size_t g = 0; g < generated.frames.size(); ++g) {
            const auto& k = request.targets[g].intrinsics;
            const auto& f = generated.frames[g];
            if (f.width != k.width || f.height != k.height ||
                f.rgb.size() != static_cast<std::size_t>(k.width) * static_cast<std::size_t>(k.height) * 3)
                throw Error(ErrorKind::backend_failure,
                            "pass " + std::to_string(pass.id) + ": frame size does not match the target camera");
        }
        output.frames = std::move(generated.frames);
        if (generated.traces.size() == output.frames.size()) {
            output.traces.resize(output.frames.size());
            std::lock_guard lock(trace_mutex_);
            for (std::size_t g = 0; g < generated.traces.size(); ++g)
                for (const auto& [patch, trace] : generated.traces[g])
                    output.traces[g].emplace(patch, origin_of(pass, patch, trace));
        }
        spdlog::debug("pass {} generated {} frames in {:.1f} ms", pass.id, output.frames.size(),
                      output.log.duration_ms);
        return output;
    }

    // Called with the state lock held.
    void store(const ForwardPass& pass, PassOutput output) {
        std::lock_guard lock(trace_mutex_);
        for (std::size_t g = 0; g < pass.generation.size(); ++g) {
            const auto& ref = pass.generation[g];
            const auto i = static_cast<std::size_t>(ref.index);
            ResolvedTrace trace = output.traces.empty() ? ResolvedTrace{} : std::move(output.traces[g]);
            if (ref.source == FrameRef::Source::anchor) {
                result_.anchor_frames[i] = output.frames[g];
                result_.anchor_pass[i] = pass.id;
                result_.anchor_traces[i] = trace;
                bank_.insert(camera_descriptor(plan_.anchor_cameras[i]), ref.index);
                if (const auto& t = plan_.anchor_targets[i]) {
                    const auto k = static_cast<std::size_t>(*t);
                    result_.frames[k] = output.frames[g];
                    result_.target_pass[k] = pass.id;
                    result_.target_traces[k] = std::move(trace);
                }
            } else {
                result_.frames[i] = std::move(output.frames[g]);
                result_.target_pass[i] = pass.id;
                result_.target_traces[i] = std::move(trace);
            }
        }
        result_.per_pass_log[static_cast<std::size_t>(pass.id)] = std::move(output.log);
    }

    const SamplingPlan& plan_;
    GenerativeRenderer& backend_;
    std::span<const Frame> inputs_;
    ExecutionResult result_;
    MemoryBank bank_;
    std::mutex trace_mutex_;
};

}  // namespace

ExecutionResult execute(const SamplingPlan& plan, GenerativeRenderer& backend,
                        std::span<const Frame> input_frames, const ExecutionOptions& options) {
    const auto violations = validate_plan(plan);
    if (!violations.empty())
        throw Error(ErrorKind::plan_invalid, "plan is invalid: " + violations.front());
    if (input_frames.size() != plan.request.inputs.size())
        throw Error(ErrorKind::invalid_argument, "expected one frame per input camera");
    for (std::size_t i = 0; i < input_frames.size(); ++i) {
        const auto& k = plan.request.inputs[i].intrinsics;
        const auto& f = input_frames[i];
        if (f.width != k.width || f.height != k.height ||
            f.rgb.size() != static_cast<std::size_t>(k.width) * static_cast<std::size_t>(k.height) * 3)
            throw Error(ErrorKind::invalid_argument, "input frame size does not match its camera");
    }
    return Run(plan, backend, input_frames).run(options.workers);
}

std::vector<double> default_scale_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 20; ++i) grid.push_back(i / 10.0);
    return grid;
}

ViewRequest normalize_request(const ViewRequest& request, double unit_length) {
    if (request.inputs.empty()) throw Error(ErrorKind::invalid_argument, "no cameras");
    std::vector<Camera> all;
    all.insert(all.end(), request.inputs.begin(), request.inputs.end());
    all.insert(all.end(), request.targets.begin(), request.targets.end());
    all.insert(all.end(), request.anchor_priors.begin(), request.anchor_priors.end());
    const auto normalized = normalize_scene(relative_to_first(all, 0), unit_length).cameras;

    ViewRequest out = request;
    auto it = normalized.begin();
    const auto take = [&it](std::vector<Camera>& dst) {
        for (auto& c : dst) c = *it++;
    };
    take(out.inputs);
    take(out.targets);
    take(out.anchor_priors);
    return out;
}

SweepResult sweep_scale(const ViewRequest& request, const PlannerConfig& config, GenerativeRenderer& backend,
                        std::span<const Frame> input_frames, std::span<const Frame> references,
                        std::span<const double> grid, const ExecutionOptions& options) {
    if (request.inputs.size() != 1) throw Error(ErrorKind::invalid_argument, "scale sweep needs exactly one input");
    if (grid.empty()) throw Error(ErrorKind::invalid_argument, "empty scale grid");
    if (references.size() != request.targets.size())
        throw Error(ErrorKind::invalid_argument, "missing references: one per target is required");

    SweepResult result;
    double best = -std::numeric_limits<double>::infinity();
    for (double u : grid) {
        const SamplingPlan plan = make_plan(normalize_request(request, u), config);
        const ExecutionResult run = execute(plan, backend, input_frames, options);
        double total = 0.0;
        for (std::size_t k = 0; k < references.size(); ++k)
            total += std::min(psnr(run.frames[k], references[k]), kScoreCap);
        const double score = total / static_cast<double>(references.size());
        result.scores.push_back({u, score});
        spdlog::debug("scale sweep: unit length {:.3f} scores {:.4f} dB", u, score);
        if (score > best) {
            best = score;
            result.best_unit_length = u;
        }
    }
    return result;
}

}  // namespace vcam
