#include "vcam/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "vcam/error.hpp"

namespace vcam {

bool Pose::is_valid(double tol) const {
    if (!rotation.allFinite() || !translation.allFinite()) return false;
    const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
    return ortho < tol && std::abs(rotation.determinant() - 1.0) < tol;
}

Mat3 Intrinsics::matrix() const {
    Mat3 k;
    k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
    return k;
}

Mat3 Intrinsics::inverse_matrix() const {
    Mat3 k;
    k << 1.0 / fx, 0.0, -cx / fx, 0.0, 1.0 / fy, -cy / fy, 0.0, 0.0, 1.0;
    return k;
}

Vec3 Camera::pixel_direction(double u, double v) const {
    const Vec3 local((u - intrinsics.cx) / intrinsics.fx, (v - intrinsics.cy) / intrinsics.fy, 1.0);
    return (pose.rotation * local).normalized();
}

Vec2 Camera::project(const Vec3& world, double* depth) const {
    const Vec3 local = pose.rotation.transpose() * (world - pose.translation);
    if (depth != nullptr) *depth = local.z();
    return {intrinsics.fx * local.x() / local.z() + intrinsics.cx,
            intrinsics.fy * local.y() / local.z() + intrinsics.cy};
}

Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
    const Vec3 forward = (target - eye).normalized();
    Vec3 world_up = up.normalized();
    if (std::abs(std::abs(forward.dot(world_up)) - 1.0) < 1e-6) world_up = Vec3::UnitY();
    const Vec3 right = forward.cross(world_up).normalized();
    const Vec3 down = forward.cross(right);
    Pose pose;
    pose.rotation.col(0) = right;
    pose.rotation.col(1) = down;
    pose.rotation.col(2) = forward;
    pose.translation = eye;
    return pose;
}

std::vector<Camera> relative_to_first(std::span<const Camera> cameras, std::size_t reference_index) {
    if (cameras.empty()) throw Error(ErrorKind::invalid_argument, "no cameras");
    if (reference_index >= cameras.size())
        throw Error(ErrorKind::invalid_argument, "reference index out of range");
    const Pose to_reference = cameras[reference_index].pose.inverse();
    std::vector<Camera> out;
    out.reserve(cameras.size());
    for (std::size_t i = 0; i < cameras.size(); ++i) {
        Camera c = cameras[i];
        if (i == reference_index) {
            c.pose = Pose::identity();
        } else {
            c.pose = to_reference * c.pose;
        }
        out.push_back(c);
    }
    return out;
}

NormalizedCameras normalize_scene(std::span<const Camera> cameras, double unit_length) {
    if (!(unit_length > 0.0) || !std::isfinite(unit_length))
        throw Error(ErrorKind::invalid_argument, "unit_length must be positive");
    double extent = 0.0;
    for (const auto& c : cameras) extent = std::max(extent, c.pose.translation.cwiseAbs().maxCoeff());

    NormalizedCameras out;
    out.params.unit_length = unit_length;
    out.params.scale = extent > 0.0 ? unit_length / extent : 1.0;
    out.cameras.assign(cameras.begin(), cameras.end());
    if (extent == 0.0) return out;
    for (auto& c : out.cameras) {
        // Divide then multiply so the extreme coordinate lands on unit_length exactly.
        c.pose.translation = (c.pose.translation / extent) * unit_length;
    }
    return out;
}

PluckerMap plucker_map(const Camera& camera) {
    PluckerMap map;
    map.width = camera.intrinsics.width;
    map.height = camera.intrinsics.height;
    map.rays.reserve(static_cast<std::size_t>(map.width) * static_cast<std::size_t>(map.height));
    const Vec3& origin = camera.pose.translation;
    for (int row = 0; row < map.height; ++row) {
        for (int col = 0; col < map.width; ++col) {
            const Vec3 d = camera.pixel_direction(col + 0.5, row + 0.5);
            map.rays.push_back({d, origin.cross(d)});
        }
    }
    return map;
}

Mat3 skew(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return m;
}

Mat3 fundamental_matrix(const Camera& a, const Camera& b) {
    const Vec3 baseline = a.pose.translation - b.pose.translation;
    if (baseline.norm() <= 1e-12)
        throw Error(ErrorKind::degenerate_geometry, "degenerate epipolar geometry");
    // Maps camera-a coordinates into camera-b coordinates.
    const Mat3 rb_t = b.pose.rotation.transpose();
    const Mat3 r = rb_t * a.pose.rotation;
    const Vec3 t = rb_t * baseline;
    const Mat3 essential = skew(t) * r;
    Mat3 f = b.intrinsics.inverse_matrix().transpose() * essential * a.intrinsics.inverse_matrix();
    return f / f.norm();
}

bool matches_in_bounds(std::span<const Match> matches, const Intrinsics& a, const Intrinsics& b) {
    const auto inside = [](const Vec2& p, const Intrinsics& k) {
        return p.x() >= 0.0 && p.y() >= 0.0 && p.x() <= k.width && p.y() <= k.height;
    };
    return std::all_of(matches.begin(), matches.end(),
                       [&](const Match& m) { return inside(m.a, a) && inside(m.b, b); });
}

namespace {

double point_line_distance(const Vec3& line, const Vec2& p) {
    const double norm = std::hypot(line.x(), line.y());
    if (norm == 0.0) return 0.0;
    return std::abs(line.x() * p.x() + line.y() * p.y() + line.z()) / norm;
}

}  // namespace

SedResult epipolar_sed(const Mat3& f, std::span<const Match> matches) {
    if (matches.empty()) throw Error(ErrorKind::invalid_argument, "empty match set");
    SedResult out;
    out.symmetric.reserve(matches.size());
    out.forward.reserve(matches.size());
    double sum = 0.0;
    double forward_sum = 0.0;
    for (const auto& m : matches) {
        const Vec3 xa = m.a.homogeneous();
        const Vec3 xb = m.b.homogeneous();
        const double d_b = point_line_distance(f * xa, m.b);
        const double d_a = point_line_distance(f.transpose() * xb, m.a);
        const double sym = 0.5 * (d_a + d_b);
        out.forward.push_back(d_b);
        out.symmetric.push_back(sym);
        sum += sym;
        forward_sum += d_b;
    }
    out.mean = sum / static_cast<double>(matches.size());
    out.forward_mean = forward_sum / static_cast<double>(matches.size());
    return out;
}

Vec6 camera_descriptor(const Camera& camera) {
    Vec6 d;
    d.head<3>() = camera.pose.translation;
    d.tail<3>() = camera.pose.rotation.col(2).normalized();
    return d;
}

double descriptor_distance(const Vec6& a, const Vec6& b, double direction_weight) {
    const double dt = (a.head<3>() - b.head<3>()).squaredNorm();
    const double dd = (a.tail<3>() - b.tail<3>()).squaredNorm();
    return std::sqrt(dt + direction_weight * direction_weight * dd);
}

}  // namespace vcam
