#include "vcam/planner.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <set>
#include <utility>

#include "vcam/error.hpp"

namespace vcam {

namespace {

template <typename Enum, std::size_t N>
std::string_view enum_name(const std::array<std::pair<Enum, std::string_view>, N>& table, Enum value) {
    for (const auto& [e, name] : table)
        if (e == value) return name;
    return "unknown";
}

template <typename Enum, std::size_t N>
std::optional<Enum> enum_value(const std::array<std::pair<Enum, std::string_view>, N>& table,
                               std::string_view name) {
    for (const auto& [e, n] : table)
        if (n == name) return e;
    return std::nullopt;
}

constexpr std::array<std::pair<Task, std::string_view>, 2> kTasks{{
    {Task::set, "set"},
    {Task::trajectory, "trajectory"},
}};
constexpr std::array<std::pair<Strategy, std::string_view>, 6> kStrategies{{
    {Strategy::one_pass, "one_pass"},
    {Strategy::nearest, "nearest"},
    {Strategy::gt_nearest, "gt_nearest"},
    {Strategy::interp, "interp"},
    {Strategy::gt_interp, "gt_interp"},
    {Strategy::automatic, "auto"},
}};
constexpr std::array<std::pair<Retrieval, std::string_view>, 2> kRetrievals{{
    {Retrieval::spatial, "spatial"},
    {Retrieval::temporal, "temporal"},
}};
constexpr std::array<std::pair<FrameRef::Source, std::string_view>, 4> kSources{{
    {FrameRef::Source::input, "input"},
    {FrameRef::Source::anchor, "anchor"},
    {FrameRef::Source::target, "target"},
    {FrameRef::Source::pad, "pad_repeat_first"},
}};
constexpr std::array<std::pair<PassKind, std::string_view>, 3> kPassKinds{{
    {PassKind::one_pass, "one_pass"},
    {PassKind::anchor_pass, "anchor_pass"},
    {PassKind::chunk_pass, "chunk_pass"},
}};

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorKind::invalid_config, what); }

bool is_gt(Strategy s) { return s == Strategy::gt_nearest || s == Strategy::gt_interp; }
bool is_interp(Strategy s) { return s == Strategy::interp || s == Strategy::gt_interp; }

// Number of inputs kept per pass when all P cannot fit and extension is off.
int nearest_input_budget(int context_window) { return std::max(1, context_window / 2); }

std::vector<Vec6> descriptors(std::span<const Camera> cameras) {
    std::vector<Vec6> out;
    out.reserve(cameras.size());
    for (const auto& c : cameras) out.push_back(camera_descriptor(c));
    return out;
}

// All inputs when `budget` covers them, else the `budget` inputs closest (mean
// descriptor distance) to the frames being generated, in index order.
std::vector<FrameRef> select_inputs(std::span<const Camera> inputs, std::span<const Camera> generated,
                                    int budget, double direction_weight) {
    const int count = static_cast<int>(inputs.size());
    std::vector<int> chosen(static_cast<std::size_t>(count));
    std::iota(chosen.begin(), chosen.end(), 0);
    if (budget < count) {
        MemoryBank bank(direction_weight);
        for (int i = 0; i < count; ++i) bank.insert(camera_descriptor(inputs[static_cast<std::size_t>(i)]), i);
        const auto queries = descriptors(generated);
        chosen = bank.nearest(queries, static_cast<std::size_t>(budget));
        std::sort(chosen.begin(), chosen.end());
    }
    std::vector<FrameRef> refs;
    refs.reserve(chosen.size());
    for (int i : chosen) refs.push_back(FrameRef::input(i));
    return refs;
}

void pad_to_window(ForwardPass& pass, int context_window) {
    while (static_cast<int>(pass.length()) < context_window) pass.conditioning.push_back(FrameRef::pad());
}

void finalize(ForwardPass& pass, int context_window, bool may_extend) {
    if (static_cast<int>(pass.length()) > context_window) {
        if (!may_extend) bad_config("pass exceeds the context window and extension is disabled");
        pass.extended = true;
    } else {
        pad_to_window(pass, context_window);
    }
}

std::vector<Camera> pick(std::span<const Camera> cameras, std::span<const int> indices) {
    std::vector<Camera> out;
    out.reserve(indices.size());
    for (int i : indices) out.push_back(cameras[static_cast<std::size_t>(i)]);
    return out;
}

void check_request(const ViewRequest& request, const PlannerConfig& config) {
    if (config.context_window < 3) bad_config("context_window must be >= 3");
    if (!(config.cfg_scale >= 1.0 && config.cfg_scale <= 10.0)) bad_config("cfg_scale must be in [1, 10]");
    if (config.anchors_per_pass && *config.anchors_per_pass < 1) bad_config("anchors_per_pass must be >= 1");
    if (config.retrieval_count && *config.retrieval_count < 1) bad_config("retrieval_count must be >= 1");
    if (config.anchor_stride && *config.anchor_stride < 1) bad_config("anchor_stride must be >= 1");
    if (!(config.direction_weight >= 0.0)) bad_config("direction_weight must be >= 0");
    if (request.inputs.empty()) bad_config("at least one input camera is required");
    if (request.targets.empty()) bad_config("at least one target camera is required");
    if (request.task == Task::trajectory && !request.ordered_targets)
        bad_config("trajectory tasks must have ordered targets");
    const auto valid = [](const Camera& c) { return c.is_valid(); };
    if (!std::all_of(request.inputs.begin(), request.inputs.end(), valid) ||
        !std::all_of(request.targets.begin(), request.targets.end(), valid) ||
        !std::all_of(request.anchor_priors.begin(), request.anchor_priors.end(), valid))
        throw Error(ErrorKind::invalid_argument, "camera violates pose or intrinsics invariants");
}

class PlanBuilder {
public:
    PlanBuilder(const ViewRequest& request, const PlannerConfig& config)
        : request_(request),
          config_(config),
          inputs_(static_cast<int>(request.inputs.size())),
          targets_(static_cast<int>(request.targets.size())),
          window_(config.context_window),
          extend_(extension_allowed(config, inputs_)) {
        plan_.request = request;
        plan_.config = config;
    }

    SamplingPlan build() {
        if (inputs_ + targets_ <= window_) {
            plan_.strategy = Strategy::one_pass;
            single_pass();
            return finish();
        }
        Strategy strategy = config_.strategy;
        if (strategy == Strategy::automatic) {
            if (request_.task == Task::trajectory) {
                strategy = Strategy::interp;
            } else {
                strategy = inputs_ <= window_ - 2 ? Strategy::gt_nearest : Strategy::nearest;
            }
        }
        if (strategy == Strategy::gt_interp && inputs_ >= window_ - 2)
            bad_config("inputs exhaust window: gt_interp needs P <= T - 3");
        if (strategy == Strategy::gt_nearest && inputs_ >= window_ - 1)
            bad_config("inputs exhaust window: gt_nearest needs P <= T - 2");
        plan_.strategy = strategy;

        switch (strategy) {
            case Strategy::one_pass: one_pass_chunks(); break;
            case Strategy::nearest:
            case Strategy::gt_nearest: nearest(strategy == Strategy::gt_nearest); break;
            case Strategy::interp:
            case Strategy::gt_interp: interp(strategy == Strategy::gt_interp); break;
            case Strategy::automatic: break;
        }
        return finish();
    }

private:
    ForwardPass& new_pass(PassKind kind) {
        ForwardPass pass;
        pass.id = static_cast<int>(plan_.passes.size());
        pass.kind = kind;
        pass.seed = config_.seed + pass.id;
        pass.cfg_scale = config_.cfg_scale;
        plan_.passes.push_back(std::move(pass));
        return plan_.passes.back();
    }

    std::vector<FrameRef> all_inputs() const {
        std::vector<FrameRef> refs;
        for (int i = 0; i < inputs_; ++i) refs.push_back(FrameRef::input(i));
        return refs;
    }

    void single_pass() {
        ForwardPass& pass = new_pass(PassKind::one_pass);
        pass.conditioning = all_inputs();
        for (int k = 0; k < targets_; ++k) pass.generation.push_back(FrameRef::target(k));
        pass.ordered = request_.ordered_targets;
        pad_to_window(pass, window_);
    }

    void one_pass_chunks() {
        plan_.strategy = Strategy::one_pass;
        if (inputs_ >= window_ && extend_) {
            ForwardPass& pass = new_pass(PassKind::one_pass);
            pass.conditioning = all_inputs();
            for (int k = 0; k < targets_; ++k) pass.generation.push_back(FrameRef::target(k));
            pass.ordered = request_.ordered_targets;
            finalize(pass, window_, true);
            return;
        }
        const int kept = inputs_ <= window_ - 1 ? inputs_ : nearest_input_budget(window_);
        const int chunk = window_ - kept;
        for (int start = 0; start < targets_; start += chunk) {
            const int end = std::min(targets_, start + chunk);
            std::vector<int> ids(static_cast<std::size_t>(end - start));
            std::iota(ids.begin(), ids.end(), start);
            ForwardPass& pass = new_pass(PassKind::one_pass);
            pass.conditioning = select_inputs(request_.inputs, pick(request_.targets, ids), kept,
                                              config_.direction_weight);
            for (int k : ids) pass.generation.push_back(FrameRef::target(k));
            pass.ordered = request_.ordered_targets;
            pad_to_window(pass, window_);
        }
    }

    // Anchor generation: one pass when it fits (or may extend), thinning for
    // formula-derived trajectory anchors, otherwise the memory-bank chain.
    void anchor_passes(bool formula_anchors, int segment_capacity) {
        const int budget = (!extend_ && inputs_ > window_ - 2) ? nearest_input_budget(window_) : inputs_;
        const int capacity = window_ - budget;
        int count = static_cast<int>(plan_.anchor_cameras.size());

        if (count > capacity && !extend_ && formula_anchors && capacity >= 1) {
            const bool interp_ok = capacity >= 2 &&
                                   (targets_ - 2) / (capacity - 1) + 1 <= segment_capacity + 1;
            if (segment_capacity == 0 || interp_ok) thin_anchors(capacity);
            count = static_cast<int>(plan_.anchor_cameras.size());
        }

        if (count <= capacity || extend_) {
            ForwardPass& pass = new_pass(PassKind::anchor_pass);
            pass.conditioning = select_inputs(request_.inputs, plan_.anchor_cameras,
                                              extend_ ? inputs_ : budget, config_.direction_weight);
            for (int j = 0; j < count; ++j) pass.generation.push_back(FrameRef::anchor(j));
            finalize(pass, window_, extend_);
            anchor_pass_of_.assign(static_cast<std::size_t>(count), pass.id);
            return;
        }

        auto chain = plan_memory_bank_anchors(plan_.anchor_cameras, request_.inputs, config_);
        anchor_pass_of_.assign(static_cast<std::size_t>(count), -1);
        const int offset = static_cast<int>(plan_.passes.size());
        for (auto& pass : chain) {
            pass.id += offset;
            for (int& d : pass.deps) d += offset;
            pass.seed = config_.seed + pass.id;
            for (const auto& ref : pass.generation) anchor_pass_of_[static_cast<std::size_t>(ref.index)] = pass.id;
            plan_.passes.push_back(std::move(pass));
        }
    }

    // Evenly spaced subset of the current trajectory anchors, first and last kept.
    void thin_anchors(int keep) {
        std::vector<int> indices;
        if (keep == 1) {
            indices.push_back(0);
        } else {
            const long span = targets_ - 1;
            for (long i = 0; i < keep; ++i) {
                indices.push_back(static_cast<int>((2 * i * span + (keep - 1)) / (2L * (keep - 1))));
            }
        }
        set_target_anchors(indices);
    }

    void set_target_anchors(const std::vector<int>& indices) {
        plan_.anchor_cameras = pick(request_.targets, indices);
        plan_.anchor_targets.assign(indices.begin(), indices.end());
    }

    int stride_for(bool use_gt, int segment_capacity) {
        if (config_.anchor_stride) {
            if (segment_capacity > 0 && *config_.anchor_stride > segment_capacity + 1)
                bad_config("anchor_stride exceeds the segment capacity of the context window");
            return *config_.anchor_stride;
        }
        int stride = compute_stride(targets_, window_, inputs_, use_gt);
        if (segment_capacity > 0) stride = std::min(stride, segment_capacity + 1);
        return stride;
    }

    void nearest(bool use_gt) {
        bool formula = false;
        if (!request_.anchor_priors.empty()) {
            plan_.anchor_cameras = request_.anchor_priors;
            plan_.anchor_targets.assign(request_.anchor_priors.size(), std::nullopt);
        } else if (request_.task == Task::trajectory) {
            set_target_anchors(select_anchor_indices(targets_, stride_for(false, 0)));
            formula = !config_.anchor_stride.has_value();
        } else {
            // No trajectory prior for a set: revert to one-pass sampling.
            one_pass_chunks();
            return;
        }
        anchor_passes(formula, 0);

        std::vector<bool> is_anchor(static_cast<std::size_t>(targets_), false);
        for (const auto& t : plan_.anchor_targets)
            if (t) is_anchor[static_cast<std::size_t>(*t)] = true;
        std::vector<int> remaining;
        for (int k = 0; k < targets_; ++k)
            if (!is_anchor[static_cast<std::size_t>(k)]) remaining.push_back(k);

        const auto chunks = assign_nearest_chunks(pick(request_.targets, remaining), plan_.anchor_cameras,
                                                  config_.direction_weight);
        const int conditioning = (use_gt ? inputs_ : 0) + 1;
        const int capacity = window_ - conditioning;
        for (std::size_t j = 0; j < chunks.size(); ++j) {
            const auto& members = chunks[j];
            for (std::size_t start = 0; start < members.size(); start += static_cast<std::size_t>(capacity)) {
                const std::size_t end = std::min(members.size(), start + static_cast<std::size_t>(capacity));
                ForwardPass& pass = new_pass(PassKind::chunk_pass);
                if (use_gt) pass.conditioning = all_inputs();
                pass.conditioning.push_back(FrameRef::anchor(static_cast<int>(j)));
                for (std::size_t m = start; m < end; ++m)
                    pass.generation.push_back(FrameRef::target(remaining[static_cast<std::size_t>(members[m])]));
                pass.ordered = false;
                pass.deps = {anchor_pass_of_[j]};
                pad_to_window(pass, window_);
            }
        }
    }

    void interp(bool use_gt) {
        const int segment_capacity = window_ - 2 - (use_gt ? inputs_ : 0);
        set_target_anchors(select_anchor_indices(targets_, stride_for(use_gt, segment_capacity)));
        anchor_passes(!config_.anchor_stride.has_value(), segment_capacity);

        for (std::size_t j = 0; j + 1 < plan_.anchor_targets.size(); ++j) {
            const int first = *plan_.anchor_targets[j];
            const int last = *plan_.anchor_targets[j + 1];
            if (last - first <= 1) continue;
            ForwardPass& pass = new_pass(PassKind::chunk_pass);
            if (use_gt) pass.conditioning = all_inputs();
            pass.conditioning.push_back(FrameRef::anchor(static_cast<int>(j)));
            pass.conditioning.push_back(FrameRef::anchor(static_cast<int>(j + 1)));
            for (int k = first + 1; k < last; ++k) pass.generation.push_back(FrameRef::target(k));
            pass.ordered = true;
            std::set<int> deps{anchor_pass_of_[j], anchor_pass_of_[j + 1]};
            pass.deps.assign(deps.begin(), deps.end());
            finalize(pass, window_, false);
        }
    }

    SamplingPlan finish() { return std::move(plan_); }

    const ViewRequest& request_;
    const PlannerConfig& config_;
    int inputs_;
    int targets_;
    int window_;
    bool extend_;
    std::vector<int> anchor_pass_of_;
    SamplingPlan plan_;
};

}  // namespace

std::string_view to_string(Task task) { return enum_name(kTasks, task); }
std::string_view to_string(Strategy strategy) { return enum_name(kStrategies, strategy); }
std::string_view to_string(Retrieval retrieval) { return enum_name(kRetrievals, retrieval); }
std::string_view to_string(FrameRef::Source source) { return enum_name(kSources, source); }
std::string_view to_string(PassKind kind) { return enum_name(kPassKinds, kind); }
std::optional<Task> task_from_string(std::string_view name) { return enum_value(kTasks, name); }
std::optional<Strategy> strategy_from_string(std::string_view name) { return enum_value(kStrategies, name); }
std::optional<Retrieval> retrieval_from_string(std::string_view name) { return enum_value(kRetrievals, name); }
std::optional<FrameRef::Source> frame_source_from_string(std::string_view name) {
    return enum_value(kSources, name);
}
std::optional<PassKind> pass_kind_from_string(std::string_view name) { return enum_value(kPassKinds, name); }

void MemoryBank::insert(const Vec6& descriptor, int handle) { entries_.push_back({descriptor, handle}); }

std::vector<int> MemoryBank::nearest(std::span<const Vec6> queries, std::size_t k) const {
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(entries_.size());
    for (std::size_t e = 0; e < entries_.size(); ++e) {
        double sum = 0.0;
        for (const auto& q : queries) sum += descriptor_distance(entries_[e].descriptor, q, direction_weight_);
        ranked.emplace_back(queries.empty() ? 0.0 : sum / static_cast<double>(queries.size()), e);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<int> out;
    std::vector<std::size_t> taken;
    for (const auto& [distance, e] : ranked) {
        if (out.size() >= k) break;
        const bool duplicate = std::any_of(taken.begin(), taken.end(), [&](std::size_t t) {
            return descriptor_distance(entries_[t].descriptor, entries_[e].descriptor, direction_weight_) <=
                   kCoincidentDescriptor;
        });
        if (duplicate) continue;
        taken.push_back(e);
        out.push_back(entries_[e].handle);
    }
    return out;
}

std::vector<int> MemoryBank::most_recent(std::size_t k) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < std::min(k, entries_.size()); ++i)
        out.push_back(entries_[entries_.size() - 1 - i].handle);
    return out;
}

bool extension_allowed(const PlannerConfig& config, int input_count) {
    return config.allow_extension.value_or(input_count >= 9);
}

int compute_stride(int target_count, int context_window, int input_count, bool use_gt) {
    if (target_count < 1) throw Error(ErrorKind::invalid_argument, "target count must be >= 1");
    const int denominator = context_window - 2 - (use_gt ? input_count : 0);
    if (denominator < 1) {
        if (use_gt) throw Error(ErrorKind::invalid_config, "inputs exhaust window");
        throw Error(ErrorKind::invalid_config, "context window too small for a stride");
    }
    return std::max(1, target_count / denominator);
}

std::vector<int> select_anchor_indices(int target_count, int stride) {
    if (stride < 1) throw Error(ErrorKind::invalid_argument, "stride must be >= 1");
    std::vector<int> out;
    for (int i = 0; i < target_count; i += stride) out.push_back(i);
    if (target_count > 0 && out.back() != target_count - 1) out.push_back(target_count - 1);
    return out;
}

std::vector<std::vector<int>> assign_nearest_chunks(std::span<const Camera> targets,
                                                    std::span<const Camera> anchors,
                                                    double direction_weight) {
    if (anchors.empty()) throw Error(ErrorKind::invalid_argument, "no anchors");
    const auto anchor_desc = descriptors(anchors);
    std::vector<std::vector<int>> chunks(anchors.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const Vec6 d = camera_descriptor(targets[t]);
        std::size_t best = 0;
        double best_distance = descriptor_distance(d, anchor_desc[0], direction_weight);
        for (std::size_t a = 1; a < anchor_desc.size(); ++a) {
            const double dist = descriptor_distance(d, anchor_desc[a], direction_weight);
            if (dist < best_distance) {
                best = a;
                best_distance = dist;
            }
        }
        chunks[best].push_back(static_cast<int>(t));
    }
    return chunks;
}

std::vector<ForwardPass> plan_memory_bank_anchors(std::span<const Camera> anchors,
                                                  std::span<const Camera> inputs,
                                                  const PlannerConfig& config) {
    const int window = config.context_window;
    const int input_count = static_cast<int>(inputs.size());
    const int anchor_count = static_cast<int>(anchors.size());
    if (window < 3) bad_config("context_window must be >= 3");
    if (input_count < 1) bad_config("at least one input camera is required");
    if (anchor_count < 1) throw Error(ErrorKind::invalid_argument, "no anchors");
    const bool extend = extension_allowed(config, input_count);
    const int budget = (!extend && input_count > window - 2) ? nearest_input_budget(window) : input_count;

    const auto make_pass = [&](int id) {
        ForwardPass pass;
        pass.id = id;
        pass.kind = PassKind::anchor_pass;
        pass.seed = config.seed + id;
        pass.cfg_scale = config.cfg_scale;
        return pass;
    };

    if (anchor_count <= window - budget) {
        ForwardPass pass = make_pass(0);
        pass.conditioning = select_inputs(inputs, anchors, budget, config.direction_weight);
        for (int j = 0; j < anchor_count; ++j) pass.generation.push_back(FrameRef::anchor(j));
        pad_to_window(pass, window);
        return {pass};
    }

    int group = config.anchors_per_pass.value_or(window / 2);
    if (!config.anchors_per_pass && !extend) group = std::max(1, std::min(group, window - budget - 1));
    const int retrieval = config.retrieval_count.value_or(std::max(1, window - budget - group));
    if (budget + group + retrieval > window && !extend)
        bad_config("retrieval_count + anchors_per_pass + inputs exceed the context window");

    MemoryBank bank(config.direction_weight);
    std::vector<ForwardPass> passes;
    for (int start = 0; start < anchor_count; start += group) {
        const int end = std::min(anchor_count, start + group);
        std::vector<int> members(static_cast<std::size_t>(end - start));
        std::iota(members.begin(), members.end(), start);
        const auto group_cameras = pick(anchors, members);

        ForwardPass pass = make_pass(static_cast<int>(passes.size()));
        pass.conditioning = select_inputs(inputs, group_cameras, budget, config.direction_weight);
        if (!bank.empty()) {
            std::vector<int> retrieved;
            if (config.retrieval == Retrieval::spatial) {
                const auto queries = descriptors(group_cameras);
                retrieved = bank.nearest(queries, static_cast<std::size_t>(retrieval));
            } else {
                retrieved = bank.most_recent(static_cast<std::size_t>(retrieval));
            }
            std::sort(retrieved.begin(), retrieved.end());
            for (int j : retrieved) pass.conditioning.push_back(FrameRef::anchor(j));
            pass.deps = {pass.id - 1};
        }
        for (int j : members) pass.generation.push_back(FrameRef::anchor(j));
        finalize(pass, window, extend);
        passes.push_back(std::move(pass));
        for (int j : members) bank.insert(camera_descriptor(anchors[static_cast<std::size_t>(j)]), j);
    }
    return passes;
}

SamplingPlan make_plan(const ViewRequest& request, const PlannerConfig& config) {
    check_request(request, config);
    return PlanBuilder(request, config).build();
}

std::vector<std::string> validate_plan(const SamplingPlan& plan) {
    std::vector<std::string> violations;
    const auto report = [&](std::string line) { violations.push_back(std::move(line)); };

    const int inputs = static_cast<int>(plan.request.inputs.size());
    const int targets = static_cast<int>(plan.request.targets.size());
    const int anchors = static_cast<int>(plan.anchor_cameras.size());
    const int window = plan.config.context_window;
    const bool extend = extension_allowed(plan.config, inputs);
    const int pass_count = static_cast<int>(plan.passes.size());

    if (window < 3) report("config: context_window below 3");
    if (static_cast<int>(plan.anchor_targets.size()) != anchors)
        report("anchors: anchor_targets size does not match anchor_cameras");

    std::vector<int> target_hits(static_cast<std::size_t>(std::max(targets, 0)), 0);
    std::vector<int> anchor_generator(static_cast<std::size_t>(anchors), -1);
    std::vector<int> anchor_hits(static_cast<std::size_t>(anchors), 0);
    std::vector<std::set<int>> ancestors(static_cast<std::size_t>(pass_count));

    const auto ref_in_range = [&](const FrameRef& ref) {
        switch (ref.source) {
            case FrameRef::Source::input: return ref.index >= 0 && ref.index < inputs;
            case FrameRef::Source::anchor: return ref.index >= 0 && ref.index < anchors;
            case FrameRef::Source::target: return ref.index >= 0 && ref.index < targets;
            case FrameRef::Source::pad: return true;
        }
        return false;
    };

    for (int i = 0; i < pass_count; ++i) {
        const ForwardPass& pass = plan.passes[static_cast<std::size_t>(i)];
        const std::string tag = "pass " + std::to_string(i) + ": ";
        if (pass.id != i) report(tag + "id does not match position");
        if (pass.generation.empty()) report(tag + "empty generation");
        if (pass.conditioning.empty() || pass.conditioning.front().source == FrameRef::Source::pad)
            report(tag + "conditioning must start with a real frame");

        const int length = static_cast<int>(pass.length());
        if (!pass.extended && length != window)
            report(tag + "window size " + std::to_string(length) + " != " + std::to_string(window));
        if (pass.extended && (!extend || length <= window)) report(tag + "unexpected extension");

        for (const auto& ref : pass.conditioning)
            if (!ref_in_range(ref)) report(tag + "conditioning reference out of range");
        for (const auto& ref : pass.generation) {
            if (!ref_in_range(ref)) {
                report(tag + "generation reference out of range");
                continue;
            }
            if (ref.source == FrameRef::Source::target) {
                ++target_hits[static_cast<std::size_t>(ref.index)];
            } else if (ref.source == FrameRef::Source::anchor) {
                ++anchor_hits[static_cast<std::size_t>(ref.index)];
                anchor_generator[static_cast<std::size_t>(ref.index)] = i;
                if (static_cast<std::size_t>(ref.index) < plan.anchor_targets.size()) {
                    if (const auto& t = plan.anchor_targets[static_cast<std::size_t>(ref.index)]) {
                        if (*t >= 0 && *t < targets) ++target_hits[static_cast<std::size_t>(*t)];
                    }
                }
            } else {
                report(tag + "generation may only hold targets or anchors");
            }
        }

        auto& mine = ancestors[static_cast<std::size_t>(i)];
        for (int d : pass.deps) {
            if (d < 0 || d >= i) {
                report(tag + "dependency order violated by dep " + std::to_string(d));
                continue;
            }
            mine.insert(d);
            const auto& theirs = ancestors[static_cast<std::size_t>(d)];
            mine.insert(theirs.begin(), theirs.end());
        }

        if (pass.ordered) {
            for (std::size_t g = 1; g < pass.generation.size(); ++g) {
                const auto& a = pass.generation[g - 1];
                const auto& b = pass.generation[g];
                if (a.source == FrameRef::Source::target && b.source == FrameRef::Source::target &&
                    b.index <= a.index)
                    report(tag + "ordered pass generation is not in path order");
            }
        }
    }

    for (int k = 0; k < targets; ++k) {
        const int hits = target_hits[static_cast<std::size_t>(k)];
        if (hits == 0) report("coverage: missing target " + std::to_string(k));
        if (hits > 1) report("coverage: duplicate target " + std::to_string(k));
    }
    for (int j = 0; j < anchors; ++j) {
        const int hits = anchor_hits[static_cast<std::size_t>(j)];
        if (hits == 0) report("anchors: anchor " + std::to_string(j) + " never generated");
        if (hits > 1) report("anchors: anchor " + std::to_string(j) + " generated twice");
    }

    for (int i = 0; i < pass_count; ++i) {
        const ForwardPass& pass = plan.passes[static_cast<std::size_t>(i)];
        for (const auto& ref : pass.conditioning) {
            if (ref.source != FrameRef::Source::anchor && ref.source != FrameRef::Source::target) continue;
            if (!ref_in_range(ref)) continue;
            int generator = -1;
            if (ref.source == FrameRef::Source::anchor) {
                generator = anchor_generator[static_cast<std::size_t>(ref.index)];
            } else {
                for (int p = 0; p < pass_count && generator < 0; ++p)
                    for (const auto& g : plan.passes[static_cast<std::size_t>(p)].generation)
                        if (g == ref) generator = p;
            }
            if (generator < 0 || !ancestors[static_cast<std::size_t>(i)].contains(generator))
                report("pass " + std::to_string(i) + ": anchor availability: " +
                       std::string(to_string(ref.source)) + " " + std::to_string(ref.index) +
                       " is not generated by a dependency");
        }
    }

    // Strategy-specific structure of the second-pass chunks.
    const bool interp = is_interp(plan.strategy);
    const bool nearest = plan.strategy == Strategy::nearest || plan.strategy == Strategy::gt_nearest;
    std::vector<int> segment_of_pass;
    for (int i = 0; i < pass_count; ++i) {
        const ForwardPass& pass = plan.passes[static_cast<std::size_t>(i)];
        if (pass.kind != PassKind::chunk_pass) continue;
        const std::string tag = "pass " + std::to_string(i) + ": ";
        if (interp && !pass.ordered) report(tag + "interp chunk pass must be ordered");
        if (nearest && pass.ordered) report(tag + "nearest chunk pass must not be ordered");
        if (is_gt(plan.strategy)) {
            for (int p = 0; p < inputs; ++p) {
                if (std::find(pass.conditioning.begin(), pass.conditioning.end(), FrameRef::input(p)) ==
                    pass.conditioning.end())
                    report(tag + "gt chunk pass is missing input " + std::to_string(p));
            }
        }
        if (!interp) continue;
        std::vector<int> boundary;
        for (const auto& ref : pass.conditioning)
            if (ref.source == FrameRef::Source::anchor) boundary.push_back(ref.index);
        if (boundary.size() != 2 || boundary[1] != boundary[0] + 1) {
            report(tag + "interp chunk pass must condition on two consecutive anchors");
            continue;
        }
        const auto& first = plan.anchor_targets[static_cast<std::size_t>(boundary[0])];
        const auto& last = plan.anchor_targets[static_cast<std::size_t>(boundary[1])];
        if (!first || !last) {
            report(tag + "interp boundary anchors must be targets");
            continue;
        }
        std::vector<FrameRef> expected;
        for (int k = *first + 1; k < *last; ++k) expected.push_back(FrameRef::target(k));
        if (pass.generation != expected) report(tag + "interp segment does not span its boundary anchors");
        segment_of_pass.push_back(boundary[0]);
    }
    for (std::size_t s = 1; s < segment_of_pass.size(); ++s)
        if (segment_of_pass[s] <= segment_of_pass[s - 1]) report("interp: segments out of path order");

    return violations;
}

}  // namespace vcam
