#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "vcam/geometry.hpp"

namespace vcam {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kBackground{20, 20, 20};

struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // row-major RGB triples

    Frame() = default;
    Frame(int w, int h, Rgb fill = kBackground);

    Rgb pixel(int row, int col) const;
    void set_pixel(int row, int col, Rgb value);

    bool operator==(const Frame&) const = default;
};

/// FNV-1a 64 over dimensions and pixels.
std::uint64_t content_hash(const Frame& frame);

struct Sphere {
    Vec3 center;
    double radius = 0.0;
    Rgb albedo{};
};

struct Triangle {
    Vec3 v0, v1, v2;
    Rgb albedo{};
};

struct SyntheticScene {
    std::uint64_t seed = 0;
    std::vector<Sphere> spheres;
    std::vector<Triangle> triangles;
    double cell_size = 0.25;

    std::size_t primitive_count() const { return spheres.size() + triangles.size(); }
    SyntheticScene translated(const Vec3& offset) const;

    bool operator==(const SyntheticScene& other) const;
};

/// Deterministic scene: 20..60 primitives inside [-1, 1]^3.
SyntheticScene build_scene(std::uint64_t seed);

/// A surface patch is one primitive clipped to one hallucination cell.
using PatchId = std::uint64_t;
inline constexpr PatchId kBackgroundPatch = ~PatchId{0};

struct Hit {
    double distance = 0.0;
    int primitive = -1;  // spheres first, then triangles
    Vec3 point = Vec3::Zero();
    bool valid() const { return primitive >= 0; }
};

Hit cast_ray(const SyntheticScene& scene, const Vec3& origin, const Vec3& direction);

PatchId patch_of(const SyntheticScene& scene, const Hit& hit);
Vec3 patch_cell_center(const SyntheticScene& scene, PatchId patch);

/// Patch id per pixel (row-major), kBackgroundPatch where nothing is hit.
std::vector<PatchId> patch_map(const SyntheticScene& scene, const Camera& camera);

Frame render_ground_truth(const SyntheticScene& scene, const Camera& camera);

/// Per pixel: does its patch appear in at least one conditioning view.
std::vector<bool> visibility_mask(const SyntheticScene& scene, const Camera& target,
                                  std::span<const Camera> conditioning);

/// Exact correspondences between two views: pixel centers of A whose
/// surface point is the first hit from B too, at most `max_matches`, in
/// raster order with a fixed pixel step.
MatchSet oracle_correspondences(const SyntheticScene& scene, const Camera& a, const Camera& b,
                                std::size_t max_matches = 256);

struct ConditioningFrame {
    Camera camera;
    Frame frame;
    std::uint64_t content_hash = 0;
};

struct GenerationRequest {
    std::vector<ConditioningFrame> conditioning;
    std::vector<Camera> targets;
    bool ordered = false;
    std::int64_t seed = 0;
    double cfg_scale = 3.0;
};

struct PatchTrace {
    enum class Kind { copied, hallucinated };
    Kind kind = Kind::copied;
    int slot = -1;  // conditioning slot copied from, or the pinning slot
    Rgb rgb{};

    bool operator==(const PatchTrace&) const = default;
};

using FrameTrace = std::map<PatchId, PatchTrace>;

struct GenerationOutput {
    std::vector<Frame> frames;
    /// Per-frame patch provenance; empty when the backend cannot report it.
    std::vector<FrameTrace> traces;
};

/// The generative-renderer contract p(targets | conditioning frames, cameras).
class GenerativeRenderer {
public:
    virtual ~GenerativeRenderer() = default;
    /// Must be safe to call concurrently.
    virtual GenerationOutput generate(const GenerationRequest& request) = 0;
};

/// 24-bit color for a hidden patch pinned by a conditioning frame.
Rgb hallucination_color(std::uint64_t scene_seed, PatchId patch, std::uint64_t pin_hash,
                        std::int64_t request_seed);

/// Index of the conditioning camera closest to `point`; ties to the lowest index.
int pinning_slot(std::span<const Camera> cameras, const Vec3& point);

/// A target patch shown by some conditioning frame copies that frame's color
/// (closest displaying camera to the cell center); every other patch gets a
/// hallucinated color pinned by the closest conditioning camera overall.
GenerationOutput oracle_generate(const SyntheticScene& scene, const GenerationRequest& request);

class OracleRenderer final : public GenerativeRenderer {
public:
    explicit OracleRenderer(SyntheticScene scene) : scene_(std::move(scene)) {}

    GenerationOutput generate(const GenerationRequest& request) override {
        return oracle_generate(scene_, request);
    }
    const SyntheticScene& scene() const { return scene_; }

private:
    SyntheticScene scene_;
};

}  // namespace vcam
