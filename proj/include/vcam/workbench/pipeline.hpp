#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vcam/executor.hpp"
#include "vcam/metrics.hpp"
#include "vcam/workbench/formats.hpp"

namespace vcam::workbench {

// Operations shared by the CLI and the HTTP service, so both produce
// identical artifacts for identical inputs.

/// Preset descriptors with parameter schemas.
Json preset_catalog();

/// {kind, params} -> trajectory. The first `params.inputs` cameras (default
/// 1) are also emitted as input frames; every generated camera is a target.
TrajectoryFile preset_trajectory(const Json& body);

/// Plans a trajectory file. `config` uses the PlannerConfig JSON keys;
/// `priors` become anchor priors for set requests.
SamplingPlan plan_trajectory(const TrajectoryFile& file, const Json& config,
                             const std::vector<Camera>& priors = {});

/// Oracle ground truth at reduced resolution (longest side <= max_dim).
std::vector<Frame> preview_frames(const std::vector<Camera>& cameras, std::uint64_t scene_seed, int max_dim);

/// "oracle" or "http:<url>".
std::unique_ptr<GenerativeRenderer> make_backend(const std::string& spec, const SyntheticScene& scene);

struct RunOutput {
    ExecutionResult result;
    MetricReport metrics;  // against oracle ground truth
};

/// Input frames are ground-truth renders of the input cameras.
RunOutput run_plan(const SamplingPlan& plan, GenerativeRenderer& backend, const SyntheticScene& scene,
                   const ExecutionOptions& options = {});

/// Deterministic run log: pass structure, conditioning and frame hashes,
/// metrics. Durations are left out so repeated runs compare byte-equal.
Json run_summary(const SamplingPlan& plan, const RunOutput& run);

Json to_json(const SweepResult& sweep);

}  // namespace vcam::workbench
