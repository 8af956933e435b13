#include <gtest/gtest.h>

#include <atomic>

#include "support.hpp"
#include "vcam/error.hpp"
#include "vcam/executor.hpp"
#include "vcam/metrics.hpp"
#include "vcam/trajectory.hpp"

using namespace vcam;

namespace {

std::vector<Camera> orbit(int n, double sweep = 2 * M_PI) {
    TrajectorySpec spec;
    spec.params.frame_count = n;
    spec.params.radius = 3.0;
    spec.params.sweep = sweep;
    return generate(spec);
}

struct Setup {
    SyntheticScene scene;
    ViewRequest request;
    std::vector<Frame> inputs;
};

Setup orbit_setup(std::uint64_t seed, int q, double sweep = 2 * M_PI) {
    Setup s;
    s.scene = build_scene(seed);
    s.request.targets = orbit(q, sweep);
    s.request.inputs = {s.request.targets[0]};
    s.inputs = {render_ground_truth(s.scene, s.request.inputs[0])};
    return s;
}

void expect_same(const ExecutionResult& a, const ExecutionResult& b) {
    EXPECT_TRUE(a.frames == b.frames);
    EXPECT_TRUE(a.anchor_frames == b.anchor_frames);
    EXPECT_EQ(a.target_pass, b.target_pass);
    EXPECT_EQ(a.anchor_pass, b.anchor_pass);
    EXPECT_EQ(a.target_traces, b.target_traces);
    EXPECT_EQ(a.anchor_traces, b.anchor_traces);
    EXPECT_EQ(a.memory_bank_size, b.memory_bank_size);
    ASSERT_EQ(a.per_pass_log.size(), b.per_pass_log.size());
    for (std::size_t i = 0; i < a.per_pass_log.size(); ++i)
        EXPECT_EQ(a.per_pass_log[i].conditioning_hashes, b.per_pass_log[i].conditioning_hashes);
}

class FailingBackend final : public GenerativeRenderer {
public:
    explicit FailingBackend(int fail_on) : fail_on_(fail_on) {}
    GenerationOutput generate(const GenerationRequest&) override {
        if (calls_++ == fail_on_) throw std::runtime_error("boom");
        throw std::runtime_error("unexpected");
    }

private:
    int fail_on_;
    std::atomic<int> calls_{0};
};

class ShortBackend final : public GenerativeRenderer {
public:
    GenerationOutput generate(const GenerationRequest&) override { return {}; }
};

}  // namespace

TEST(Execute, TargetsAtInputPosesReproduceGroundTruth) {
    const auto scene = build_scene(1);
    const auto cams = orbit(4);
    ViewRequest req;
    req.inputs = cams;
    req.targets = cams;
    std::vector<Frame> inputs;
    for (const auto& c : cams) inputs.push_back(render_ground_truth(scene, c));
    const auto plan = make_plan(req, {});
    OracleRenderer oracle(scene);
    const auto result = execute(plan, oracle, inputs);
    ASSERT_EQ(result.frames.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(result.frames[i] == inputs[i]);
}

TEST(Execute, DeterministicAcrossRunsAndWorkerCounts) {
    const auto s = orbit_setup(2, 60);
    PlannerConfig cfg;
    cfg.seed = 5;
    const auto plan = make_plan(s.request, cfg);
    OracleRenderer oracle(s.scene);
    const auto a = execute(plan, oracle, s.inputs);
    const auto b = execute(plan, oracle, s.inputs);
    ExecutionOptions four;
    four.workers = 4;
    const auto c = execute(plan, oracle, s.inputs, four);
    expect_same(a, b);
    expect_same(a, c);
}

TEST(Execute, MemoryBankHoldsExactlyTheAnchors) {
    const auto s = orbit_setup(3, 120, 4 * M_PI);
    PlannerConfig cfg;
    cfg.anchor_stride = 3;
    const auto plan = make_plan(s.request, cfg);
    OracleRenderer oracle(s.scene);
    const auto result = execute(plan, oracle, s.inputs);
    EXPECT_EQ(result.memory_bank_size, plan.anchor_cameras.size());
    EXPECT_EQ(result.anchor_frames.size(), plan.anchor_cameras.size());
    EXPECT_EQ(result.frames.size(), 120u);
}

TEST(Execute, AnchorTargetsReuseAnchorFrames) {
    const auto s = orbit_setup(4, 80);
    PlannerConfig cfg;
    cfg.strategy = Strategy::interp;
    const auto plan = make_plan(s.request, cfg);
    OracleRenderer oracle(s.scene);
    const auto result = execute(plan, oracle, s.inputs);
    for (std::size_t j = 0; j < plan.anchor_targets.size(); ++j)
        EXPECT_TRUE(result.frames[static_cast<std::size_t>(*plan.anchor_targets[j])] == result.anchor_frames[j]);
}

TEST(Execute, InterpIsMoreConsistentThanChunkedOnePass) {
    const auto s = orbit_setup(0, 80);
    OracleRenderer oracle(s.scene);
    double mean[2];
    int i = 0;
    for (auto strategy : {Strategy::one_pass, Strategy::interp}) {
        PlannerConfig cfg;
        cfg.strategy = strategy;
        const auto plan = make_plan(s.request, cfg);
        const auto result = execute(plan, oracle, s.inputs);
        const auto adj = adjacent_frame_disagreement(result, plan);
        EXPECT_GT(adj.pairs, 0u);
        if (strategy == Strategy::interp) {
            EXPECT_EQ(adj.shared_anchor.max, 0.0);
        }
        mean[i++] = adj.all.mean;
    }
    EXPECT_LT(mean[1], mean[0]);
}

TEST(Execute, BackendFailureNamesThePass) {
    const auto s = orbit_setup(1, 10);
    const auto plan = make_plan(s.request, {});
    FailingBackend backend(0);
    try {
        execute(plan, backend, s.inputs);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::backend_failure);
        EXPECT_EQ(std::string(e.what()), "pass 0: boom");
    }
}

TEST(Execute, WrongFrameCountIsBackendFailure) {
    const auto s = orbit_setup(1, 10);
    const auto plan = make_plan(s.request, {});
    ShortBackend backend;
    try {
        execute(plan, backend, s.inputs);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::backend_failure);
    }
}

TEST(Execute, InvalidPlanIsRejected) {
    const auto s = orbit_setup(1, 60);
    PlannerConfig cfg;
    cfg.strategy = Strategy::interp;
    auto plan = make_plan(s.request, cfg);
    plan.passes.back().deps.clear();
    OracleRenderer oracle(s.scene);
    try {
        execute(plan, oracle, s.inputs);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::plan_invalid);
    }
}

TEST(Execute, InputFrameCountMustMatch) {
    const auto s = orbit_setup(1, 10);
    const auto plan = make_plan(s.request, {});
    OracleRenderer oracle(s.scene);
    EXPECT_THROW(execute(plan, oracle, std::vector<Frame>{}), Error);
}

TEST(Execute, PassSeedsReachTheBackend) {
    const auto s = orbit_setup(2, 40);
    PlannerConfig cfg;
    cfg.seed = 100;
    const auto plan_a = make_plan(s.request, cfg);
    cfg.seed = 200;
    const auto plan_b = make_plan(s.request, cfg);
    OracleRenderer oracle(s.scene);
    EXPECT_FALSE(execute(plan_a, oracle, s.inputs).frames == execute(plan_b, oracle, s.inputs).frames);
}

TEST(NormalizeRequest, ScalesAllCameras) {
    const auto s = orbit_setup(0, 8);
    ViewRequest req = s.request;
    req.anchor_priors = orbit(3);
    const auto n = normalize_request(req, 0.5);
    double extreme = 0.0;
    for (const auto* list : {&n.inputs, &n.targets, &n.anchor_priors})
        for (const auto& c : *list) extreme = std::max(extreme, c.pose.translation.cwiseAbs().maxCoeff());
    EXPECT_DOUBLE_EQ(extreme, 0.5);
    EXPECT_LT((n.inputs[0].pose.rotation - Mat3::Identity()).norm(), 1e-12);
    EXPECT_LT(n.inputs[0].pose.translation.norm(), 1e-12);
}

TEST(SweepScale, SingletonGridReturnsItsValue) {
    const auto s = orbit_setup(0, 4);
    OracleRenderer oracle(s.scene);
    std::vector<Frame> refs;
    for (const auto& c : s.request.targets) refs.push_back(render_ground_truth(s.scene, c));
    const std::vector<double> grid{1.3};
    const auto r = sweep_scale(s.request, {}, oracle, s.inputs, refs, grid);
    EXPECT_EQ(r.best_unit_length, 1.3);
    ASSERT_EQ(r.scores.size(), 1u);
}

TEST(SweepScale, TiesGoToLowestGridValue) {
    auto s = orbit_setup(0, 4);
    s.scene = SyntheticScene{};
    s.inputs = {Frame(64, 64)};
    OracleRenderer oracle(s.scene);
    const std::vector<Frame> refs(4, Frame(64, 64));
    const auto grid = default_scale_grid();
    const auto r = sweep_scale(s.request, {}, oracle, s.inputs, refs, grid);
    EXPECT_EQ(r.best_unit_length, grid.front());
    for (const auto& score : r.scores) EXPECT_EQ(score.score, kScoreCap);
}

TEST(SweepScale, DefaultGridAndErrors) {
    const auto grid = default_scale_grid();
    ASSERT_EQ(grid.size(), 20u);
    EXPECT_DOUBLE_EQ(grid.front(), 0.1);
    EXPECT_DOUBLE_EQ(grid.back(), 2.0);
    const auto s = orbit_setup(0, 4);
    OracleRenderer oracle(s.scene);
    EXPECT_THROW(sweep_scale(s.request, {}, oracle, s.inputs, std::vector<Frame>{}, grid), Error);
    const std::vector<Frame> refs(4, Frame(64, 64));
    EXPECT_THROW(sweep_scale(s.request, {}, oracle, s.inputs, refs, std::vector<double>{}), Error);
}

TEST(SweepScale, RecoversPlantedScale) {
    const auto scene = build_scene(0).translated(Vec3(0, 0, 2.5));
    const Intrinsics k{64, 64, 32, 32, 64, 64};
    ViewRequest req;
    req.inputs = {Camera{Pose::identity(), k}};
    for (int i = 0; i < 8; ++i) {
        const double a = 2 * M_PI * i / 8;
        req.targets.push_back({look_at(Vec3(std::cos(a), std::sin(a), 0), Vec3(0, 0, 2.5), Vec3(0, -1, 0)), k});
    }
    const std::vector<Frame> inputs{render_ground_truth(scene, req.inputs[0])};
    const auto planted = normalize_request(req, 0.7);
    std::vector<Frame> refs;
    for (const auto& c : planted.targets) refs.push_back(render_ground_truth(scene, c));
    OracleRenderer oracle(scene);
    const auto grid = default_scale_grid();
    const auto r = sweep_scale(req, {}, oracle, inputs, refs, grid);
    EXPECT_NEAR(r.best_unit_length, 0.7, 0.1 + 1e-9);
    EXPECT_EQ(r.scores.size(), grid.size());
}
