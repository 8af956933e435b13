#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vcam/geometry.hpp"

namespace vcam {

enum class Task { set, trajectory };
enum class Strategy { one_pass, nearest, gt_nearest, interp, gt_interp, automatic };
enum class Retrieval { spatial, temporal };

std::string_view to_string(Task task);
std::string_view to_string(Strategy strategy);
std::string_view to_string(Retrieval retrieval);
std::optional<Task> task_from_string(std::string_view name);
std::optional<Strategy> strategy_from_string(std::string_view name);
std::optional<Retrieval> retrieval_from_string(std::string_view name);

/// "P-in Q-out" problem statement.
struct ViewRequest {
    std::vector<Camera> inputs;
    std::vector<Camera> targets;
    Task task = Task::trajectory;
    bool ordered_targets = true;
    /// Optional trajectory prior used as anchors for set NVS (nearest variants).
    std::vector<Camera> anchor_priors;

    bool operator==(const ViewRequest&) const = default;
};

struct PlannerConfig {
    int context_window = 21;
    Strategy strategy = Strategy::automatic;
    double cfg_scale = 3.0;
    std::int64_t seed = 0;
    std::optional<int> anchors_per_pass;   // G; default floor(T/2)
    std::optional<int> retrieval_count;    // R; default T - P - G, at least 1
    std::optional<bool> allow_extension;   // default P >= 9
    std::optional<int> anchor_stride;      // overrides the stride formula
    Retrieval retrieval = Retrieval::spatial;
    double direction_weight = 1.0;

    bool operator==(const PlannerConfig&) const = default;
};

struct FrameRef {
    enum class Source { input, anchor, target, pad };
    Source source = Source::input;
    int index = 0;  // unused for pad: a pad repeats the pass's first conditioning frame

    static FrameRef input(int i) { return {Source::input, i}; }
    static FrameRef anchor(int i) { return {Source::anchor, i}; }
    static FrameRef target(int i) { return {Source::target, i}; }
    static FrameRef pad() { return {Source::pad, 0}; }

    bool operator==(const FrameRef&) const = default;
};

std::string_view to_string(FrameRef::Source source);
std::optional<FrameRef::Source> frame_source_from_string(std::string_view name);

enum class PassKind { one_pass, anchor_pass, chunk_pass };
std::string_view to_string(PassKind kind);
std::optional<PassKind> pass_kind_from_string(std::string_view name);

struct ForwardPass {
    int id = 0;
    PassKind kind = PassKind::one_pass;
    std::vector<FrameRef> conditioning;
    std::vector<FrameRef> generation;
    bool ordered = false;   // eligible for the temporal pathway
    bool extended = false;  // window longer than T
    std::vector<int> deps;
    std::int64_t seed = 0;
    double cfg_scale = 3.0;

    std::size_t length() const { return conditioning.size() + generation.size(); }
    bool operator==(const ForwardPass&) const = default;
};

struct SamplingPlan {
    ViewRequest request;
    PlannerConfig config;
    Strategy strategy = Strategy::one_pass;  // resolved
    std::vector<ForwardPass> passes;
    std::vector<Camera> anchor_cameras;
    /// Target index each anchor stands for (trajectory anchors), or none
    /// for anchors taken from a prior.
    std::vector<std::optional<int>> anchor_targets;

    bool operator==(const SamplingPlan&) const = default;
};

/// Descriptor distance below which two viewpoints count as the same.
inline constexpr double kCoincidentDescriptor = 1e-9;

/// Spatial index of generated anchors keyed by camera descriptor.
class MemoryBank {
public:
    explicit MemoryBank(double direction_weight = 1.0) : direction_weight_(direction_weight) {}

    void insert(const Vec6& descriptor, int handle);
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Up to k handles ranked by mean descriptor distance to `queries`;
    /// ties go to the earlier insertion. An entry coinciding with a better
    /// ranked one (a revisited viewpoint) is skipped.
    std::vector<int> nearest(std::span<const Vec6> queries, std::size_t k) const;
    /// The k most recently inserted handles, newest first.
    std::vector<int> most_recent(std::size_t k) const;

private:
    struct Entry {
        Vec6 descriptor;
        int handle;
    };
    double direction_weight_;
    std::vector<Entry> entries_;
};

/// Effective extension flag (explicit or the P >= 9 default).
bool extension_allowed(const PlannerConfig& config, int input_count);

/// Stride between trajectory anchors, floor(Q/(T-2)) or floor(Q/(T-P-2)),
/// clamped to >= 1.
int compute_stride(int target_count, int context_window, int input_count, bool use_gt);

/// {0, Δ, 2Δ, ...} plus the last index when missing.
std::vector<int> select_anchor_indices(int target_count, int stride);

/// For each anchor, the targets whose nearest anchor (descriptor distance,
/// lower anchor index on ties) it is, in target order.
std::vector<std::vector<int>> assign_nearest_chunks(std::span<const Camera> targets,
                                                    std::span<const Camera> anchors,
                                                    double direction_weight = 1.0);

/// Autoregressive anchor passes over `anchors` in path order. Pass ids start
/// at 0 and each pass depends on the previous one. Generation refs are
/// anchor(j). Falls back to a single pass when everything fits.
std::vector<ForwardPass> plan_memory_bank_anchors(std::span<const Camera> anchors,
                                                  std::span<const Camera> inputs,
                                                  const PlannerConfig& config);

SamplingPlan make_plan(const ViewRequest& request, const PlannerConfig& config);

/// Every broken plan invariant as a human-readable line; empty iff valid.
std::vector<std::string> validate_plan(const SamplingPlan& plan);

}  // namespace vcam
