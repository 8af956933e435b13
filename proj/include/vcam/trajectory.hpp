#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vcam/geometry.hpp"

namespace vcam {

enum class TrajectoryKind { orbit, spiral, pan, zoom_in, zoom_out, dolly_zoom, keyframes };

std::string_view to_string(TrajectoryKind kind);
std::optional<TrajectoryKind> trajectory_kind_from_string(std::string_view name);

struct Keyframe {
    Camera camera;
    double time = 0.0;
};

/// Parameters shared by all presets; each kind reads the subset it needs.
/// Presets other than orbit start from the orbit's frame-0 viewpoint
/// (`distance` from `center` at `start_azimuth`/`elevation`) looking at `center`.
struct TrajectoryParams {
    Vec3 center = Vec3::Zero();
    double radius = 3.0;          // orbit radius; spiral horizontal semi-axis
    int frame_count = 60;
    double elevation = 0.3;       // radians above the xy plane
    bool closed = true;           // orbit/spiral: exclude the duplicate endpoint
    double focal_scale = 2.0;     // zoom: final focal multiplier
    double start_azimuth = 0.0;   // radians, measured from +x toward +y
    double sweep = 2.0 * 3.14159265358979323846;  // orbit: total azimuth travelled
    double distance = 3.0;        // base distance for spiral/pan/zoom/dolly
    double end_distance = 1.5;    // dolly: final distance
    double vertical_ratio = 0.5;  // spiral: vertical semi-axis / radius
    double depth_amplitude = 0.25;  // spiral: along-axis oscillation
    double loops = 1.0;           // spiral: revolutions
    double pan_extent = 1.0;      // pan: total lateral travel
    std::vector<Keyframe> keyframes;
};

struct TrajectorySpec {
    TrajectoryKind kind = TrajectoryKind::orbit;
    TrajectoryParams params;
    Intrinsics base_intrinsics{64.0, 64.0, 32.0, 32.0, 64, 64};
};

/// Ordered cameras for a preset or keyframed path.
std::vector<Camera> generate(const TrajectorySpec& spec);

/// Uniform-time sampling of a piecewise linear (position, intrinsics) and
/// piecewise slerp (rotation) path. Requires >= 2 strictly increasing keyframes.
std::vector<Camera> interpolate_keyframes(const std::vector<Keyframe>& keyframes, int frame_count);

/// Evaluates the keyframed path at `time` (clamped to the keyframe span).
Camera evaluate_keyframes(const std::vector<Keyframe>& keyframes, double time);

/// Re-samples so consecutive cameras are equally spaced in cumulative
/// descriptor distance. Endpoints are preserved.
std::vector<Camera> resample_uniform(const std::vector<Camera>& cameras, int frame_count,
                                     double direction_weight = 1.0);

/// Interpolates two cameras: lerp position/intrinsics, shortest-arc slerp rotation.
Camera interpolate_cameras(const Camera& a, const Camera& b, double t);

}  // namespace vcam
