#include "vcam/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "vcam/error.hpp"

namespace vcam {

namespace {

constexpr std::array<std::pair<TrajectoryKind, std::string_view>, 7> kKindNames{{
    {TrajectoryKind::orbit, "orbit"},
    {TrajectoryKind::spiral, "spiral"},
    {TrajectoryKind::pan, "pan"},
    {TrajectoryKind::zoom_in, "zoom_in"},
    {TrajectoryKind::zoom_out, "zoom_out"},
    {TrajectoryKind::dolly_zoom, "dolly_zoom"},
    {TrajectoryKind::keyframes, "keyframes"},
}};

[[noreturn]] void invalid(const std::string& what) {
    throw Error(ErrorKind::invalid_argument, "invalid trajectory parameter: " + what);
}

// Fraction of the path covered at frame i. Closed loops stop one step short
// of the start so frame 0 recurs only implicitly.
double path_fraction(int i, int n, bool closed) {
    if (closed) return static_cast<double>(i) / n;
    if (n == 1) return 0.0;
    return static_cast<double>(i) / (n - 1);
}

Vec3 spherical_offset(double azimuth, double elevation) {
    return {std::cos(elevation) * std::cos(azimuth), std::cos(elevation) * std::sin(azimuth),
            std::sin(elevation)};
}

Vec3 base_eye(const TrajectoryParams& p) {
    return p.center + p.distance * spherical_offset(p.start_azimuth, p.elevation);
}

std::vector<Camera> orbit(const TrajectorySpec& spec) {
    const auto& p = spec.params;
    if (!(p.radius > 0.0)) invalid("radius must be positive");
    std::vector<Camera> out;
    out.reserve(static_cast<std::size_t>(p.frame_count));
    for (int i = 0; i < p.frame_count; ++i) {
        const double azimuth = p.start_azimuth + p.sweep * path_fraction(i, p.frame_count, p.closed);
        const Vec3 eye = p.center + p.radius * spherical_offset(azimuth, p.elevation);
        out.push_back({look_at(eye, p.center), spec.base_intrinsics});
    }
    return out;
}

std::vector<Camera> spiral(const TrajectorySpec& spec) {
    const auto& p = spec.params;
    if (!(p.radius > 0.0)) invalid("radius must be positive");
    if (!(p.distance > 0.0)) invalid("distance must be positive");
    if (!(p.loops > 0.0)) invalid("loops must be positive");
    const Pose base = look_at(base_eye(p), p.center);
    std::vector<Camera> out;
    out.reserve(static_cast<std::size_t>(p.frame_count));
    for (int i = 0; i < p.frame_count; ++i) {
        const double theta = 2.0 * M_PI * p.loops * path_fraction(i, p.frame_count, p.closed);
        // Ellipse in the base image plane, one along-axis oscillation per loop.
        const Vec3 offset(p.radius * std::cos(theta), -p.radius * p.vertical_ratio * std::sin(theta),
                          p.depth_amplitude * std::sin(theta));
        const Vec3 eye = base.transform(offset);
        out.push_back({look_at(eye, p.center), spec.base_intrinsics});
    }
    return out;
}

std::vector<Camera> pan(const TrajectorySpec& spec) {
    const auto& p = spec.params;
    if (!(p.distance > 0.0)) invalid("distance must be positive");
    const Pose base = look_at(base_eye(p), p.center);
    const Vec3 right = base.rotation.col(0);
    std::vector<Camera> out;
    out.reserve(static_cast<std::size_t>(p.frame_count));
    for (int i = 0; i < p.frame_count; ++i) {
        const double s = p.pan_extent * (path_fraction(i, p.frame_count, false) - 0.5);
        Pose pose = base;
        pose.translation = base.translation + s * right;
        out.push_back({pose, spec.base_intrinsics});
    }
    return out;
}

std::vector<Camera> zoom(const TrajectorySpec& spec, bool zoom_in) {
    const auto& p = spec.params;
    if (!(p.distance > 0.0)) invalid("distance must be positive");
    if (zoom_in && !(p.focal_scale > 1.0)) invalid("zoom_in needs focal_scale > 1");
    if (!zoom_in && !(p.focal_scale > 0.0 && p.focal_scale < 1.0))
        invalid("zoom_out needs focal_scale in (0, 1)");
    const Pose base = look_at(base_eye(p), p.center);
    std::vector<Camera> out;
    out.reserve(static_cast<std::size_t>(p.frame_count));
    for (int i = 0; i < p.frame_count; ++i) {
        const double scale = std::pow(p.focal_scale, path_fraction(i, p.frame_count, false));
        Intrinsics k = spec.base_intrinsics;
        k.fx *= scale;
        k.fy *= scale;
        out.push_back({base, k});
    }
    return out;
}

std::vector<Camera> dolly_zoom(const TrajectorySpec& spec) {
    const auto& p = spec.params;
    if (!(p.distance > 0.0) || !(p.end_distance > 0.0)) invalid("dolly distances must be positive");
    const Vec3 axis = spherical_offset(p.start_azimuth, p.elevation);
    std::vector<Camera> out;
    out.reserve(static_cast<std::size_t>(p.frame_count));
    for (int i = 0; i < p.frame_count; ++i) {
        const double t = path_fraction(i, p.frame_count, false);
        const double d = p.distance + (p.end_distance - p.distance) * t;
        // Focal length tracks distance so f/d, and with it the subject's
        // projected size, stays fixed.
        const double ratio = d / p.distance;
        Intrinsics k = spec.base_intrinsics;
        k.fx *= ratio;
        k.fy *= ratio;
        out.push_back({look_at(p.center + d * axis, p.center), k});
    }
    return out;
}

void check_keyframes(const std::vector<Keyframe>& keyframes) {
    if (keyframes.size() < 2) throw Error(ErrorKind::invalid_argument, "need at least 2 keyframes");
    for (std::size_t i = 0; i < keyframes.size(); ++i) {
        if (!keyframes[i].camera.is_valid())
            throw Error(ErrorKind::invalid_argument, "keyframe camera is invalid");
        if (i > 0 && !(keyframes[i].time > keyframes[i - 1].time))
            throw Error(ErrorKind::invalid_argument, "keyframe times must be strictly increasing");
    }
}

}  // namespace

std::string_view to_string(TrajectoryKind kind) {
    for (const auto& [k, name] : kKindNames)
        if (k == kind) return name;
    return "unknown";
}

std::optional<TrajectoryKind> trajectory_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kKindNames)
        if (n == name) return k;
    return std::nullopt;
}

Camera interpolate_cameras(const Camera& a, const Camera& b, double t) {
    if (t <= 0.0) return a;
    if (t >= 1.0) return b;
    const Eigen::Quaterniond qa(a.pose.rotation);
    const Eigen::Quaterniond qb(b.pose.rotation);
    Camera out;
    out.pose.rotation = qa.slerp(t, qb).normalized().toRotationMatrix();
    out.pose.translation = (1.0 - t) * a.pose.translation + t * b.pose.translation;
    const auto lerp = [t](double x, double y) { return (1.0 - t) * x + t * y; };
    out.intrinsics = a.intrinsics;
    out.intrinsics.fx = lerp(a.intrinsics.fx, b.intrinsics.fx);
    out.intrinsics.fy = lerp(a.intrinsics.fy, b.intrinsics.fy);
    out.intrinsics.cx = lerp(a.intrinsics.cx, b.intrinsics.cx);
    out.intrinsics.cy = lerp(a.intrinsics.cy, b.intrinsics.cy);
    return out;
}

Camera evaluate_keyframes(const std::vector<Keyframe>& keyframes, double time) {
    check_keyframes(keyframes);
    if (time <= keyframes.front().time) return keyframes.front().camera;
    if (time >= keyframes.back().time) return keyframes.back().camera;
    const auto upper = std::upper_bound(keyframes.begin(), keyframes.end(), time,
                                        [](double t, const Keyframe& k) { return t < k.time; });
    const Keyframe& k1 = *upper;
    const Keyframe& k0 = *(upper - 1);
    if (time == k0.time) return k0.camera;
    return interpolate_cameras(k0.camera, k1.camera, (time - k0.time) / (k1.time - k0.time));
}

std::vector<Camera> interpolate_keyframes(const std::vector<Keyframe>& keyframes, int frame_count) {
    check_keyframes(keyframes);
    if (frame_count < 1) throw Error(ErrorKind::invalid_argument, "frame_count must be >= 1");
    const double t0 = keyframes.front().time;
    const double t1 = keyframes.back().time;
    std::vector<Camera> out;
    out.reserve(static_cast<std::size_t>(frame_count));
    for (int i = 0; i < frame_count; ++i) {
        const double time = i == frame_count - 1 && frame_count > 1
                                ? t1
                                : t0 + (t1 - t0) * path_fraction(i, frame_count, false);
        out.push_back(evaluate_keyframes(keyframes, time));
    }
    return out;
}

std::vector<Camera> resample_uniform(const std::vector<Camera>& cameras, int frame_count,
                                     double direction_weight) {
    if (cameras.size() < 2) throw Error(ErrorKind::invalid_argument, "need at least 2 cameras");
    if (frame_count < 1) throw Error(ErrorKind::invalid_argument, "frame_count must be >= 1");

    std::vector<double> arc(cameras.size(), 0.0);
    for (std::size_t i = 1; i < cameras.size(); ++i) {
        arc[i] = arc[i - 1] + descriptor_distance(camera_descriptor(cameras[i - 1]),
                                                  camera_descriptor(cameras[i]), direction_weight);
    }
    const double total = arc.back();
    if (total == 0.0) return std::vector<Camera>(static_cast<std::size_t>(frame_count), cameras.front());

    std::vector<Camera> out;
    out.reserve(static_cast<std::size_t>(frame_count));
    std::size_t segment = 0;
    for (int i = 0; i < frame_count; ++i) {
        if (i == 0) {
            out.push_back(cameras.front());
            continue;
        }
        if (i == frame_count - 1) {
            out.push_back(cameras.back());
            continue;
        }
        const double s = total * path_fraction(i, frame_count, false);
        while (segment + 2 < cameras.size() && arc[segment + 1] < s) ++segment;
        const double length = arc[segment + 1] - arc[segment];
        const double t = length > 0.0 ? (s - arc[segment]) / length : 0.0;
        out.push_back(interpolate_cameras(cameras[segment], cameras[segment + 1], t));
    }
    return out;
}

std::vector<Camera> generate(const TrajectorySpec& spec) {
    if (spec.params.frame_count < 1) invalid("frame_count must be >= 1");
    if (!spec.base_intrinsics.is_valid()) invalid("base intrinsics");
    switch (spec.kind) {
        case TrajectoryKind::orbit: return orbit(spec);
        case TrajectoryKind::spiral: return spiral(spec);
        case TrajectoryKind::pan: return pan(spec);
        case TrajectoryKind::zoom_in: return zoom(spec, true);
        case TrajectoryKind::zoom_out: return zoom(spec, false);
        case TrajectoryKind::dolly_zoom: return dolly_zoom(spec);
        case TrajectoryKind::keyframes:
            return interpolate_keyframes(spec.params.keyframes, spec.params.frame_count);
    }
    throw Error(ErrorKind::invalid_argument, "unknown trajectory kind");
}

}  // namespace vcam
