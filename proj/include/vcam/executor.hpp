#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "vcam/planner.hpp"
#include "vcam/renderer.hpp"

namespace vcam {

/// Where a generated patch color ultimately came from.
struct PatchOrigin {
    enum class Kind { ground_truth, hallucinated };
    Kind kind = Kind::ground_truth;
    int pass = -1;         // pass that hallucinated it
    bool via_anchor = false;
    int direct_anchor = -1;  // anchor frame it was copied from in its own pass
    Rgb rgb{};

    bool operator==(const PatchOrigin&) const = default;
};

using ResolvedTrace = std::map<PatchId, PatchOrigin>;

struct PassLog {
    int pass = 0;
    double duration_ms = 0.0;
    std::vector<std::uint64_t> conditioning_hashes;
};

struct ExecutionResult {
    std::vector<Frame> frames;         // by target index
    std::vector<Frame> anchor_frames;  // by anchor index
    std::vector<int> target_pass;      // pass that generated each target
    std::vector<int> anchor_pass;
    std::vector<ResolvedTrace> target_traces;  // empty for opaque backends
    std::vector<ResolvedTrace> anchor_traces;
    std::vector<PassLog> per_pass_log;  // ordered by pass id
    std::size_t memory_bank_size = 0;
};

struct ExecutionOptions {
    int workers = 1;
};

/// Runs every pass of `plan` in a dependency-respecting order. `input_frames`
/// are the observed images, one per input camera.
ExecutionResult execute(const SamplingPlan& plan, GenerativeRenderer& backend,
                        std::span<const Frame> input_frames, const ExecutionOptions& options = {});

struct ScaleScore {
    double unit_length = 0.0;
    double score = 0.0;  // mean PSNR, each frame capped at kScoreCap
};

struct SweepResult {
    double best_unit_length = 0.0;
    std::vector<ScaleScore> scores;
};

/// PSNR ceiling used when scoring, so exact frames do not dominate the mean.
inline constexpr double kScoreCap = 100.0;

/// 20 uniform values on [0.1, 2.0].
std::vector<double> default_scale_grid();

/// Normalizes the request at each unit length, plans, executes and scores the
/// targets against `references`. Ties go to the earliest grid value.
SweepResult sweep_scale(const ViewRequest& request, const PlannerConfig& config,
                        GenerativeRenderer& backend, std::span<const Frame> input_frames,
                        std::span<const Frame> references, std::span<const double> grid,
                        const ExecutionOptions& options = {});

/// Cameras of `request` relative to its first input and scaled to `unit_length`.
ViewRequest normalize_request(const ViewRequest& request, double unit_length);

}  // namespace vcam
