#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace vcam {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Rigid camera-to-world transform. The camera frame is x-right, y-down,
/// z-forward (OpenCV convention).
struct Pose {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    static Pose identity() { return {}; }

    /// this ∘ rhs: maps rhs's source frame through rhs, then through this.
    Pose operator*(const Pose& rhs) const {
        return {rotation * rhs.rotation, rotation * rhs.translation + translation};
    }

    Pose inverse() const {
        const Mat3 rt = rotation.transpose();
        return {rt, -(rt * translation)};
    }

    Vec3 transform(const Vec3& p) const { return rotation * p + translation; }

    const Vec3& position() const { return translation; }
    Vec3 forward() const { return rotation.col(2); }

    /// Orthonormality and det(R) = +1 within `tol` (infinity norm).
    bool is_valid(double tol = 1e-9) const;

    /// Exact comparison.
    bool operator==(const Pose& other) const {
        return rotation == other.rotation && translation == other.translation;
    }
};

struct Intrinsics {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 1;
    int height = 1;

    Mat3 matrix() const;
    Mat3 inverse_matrix() const;
    bool is_valid() const { return fx > 0.0 && fy > 0.0 && width >= 1 && height >= 1; }

    bool operator==(const Intrinsics&) const = default;
};

struct Camera {
    Pose pose;
    Intrinsics intrinsics;

    /// World-frame unit ray direction through pixel coordinate (u, v).
    Vec3 pixel_direction(double u, double v) const;

    /// Pixel coordinate of a world point, and its depth along the view axis.
    Vec2 project(const Vec3& world, double* depth = nullptr) const;

    bool is_valid() const { return pose.is_valid() && intrinsics.is_valid(); }

    bool operator==(const Camera&) const = default;
};

/// Camera looking from `eye` toward `target`. `up` is the preferred world up;
/// when the view axis is within 1e-6 of ±up the fallback +y is used.
Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up = Vec3::UnitZ());

struct PluckerRay {
    Vec3 direction;  // unit, world frame
    Vec3 moment;     // origin × direction
};

struct PluckerMap {
    int width = 0;
    int height = 0;
    std::vector<PluckerRay> rays;  // row-major

    const PluckerRay& at(int row, int col) const {
        return rays[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                    static_cast<std::size_t>(col)];
    }
};

struct NormalizationParams {
    std::size_t reference_index = 0;
    double scale = 1.0;
    double unit_length = 2.0;
};

struct NormalizedCameras {
    std::vector<Camera> cameras;
    NormalizationParams params;
};

/// Unit length the conditioning was trained with.
inline constexpr double kTrainingUnitLength = 2.0;

/// Re-express every camera in the frame of cameras[reference_index].
std::vector<Camera> relative_to_first(std::span<const Camera> cameras,
                                      std::size_t reference_index = 0);

/// Uniformly scale translations so the largest |coordinate| over all camera
/// positions equals `unit_length`. All-coincident inputs keep scale 1.
NormalizedCameras normalize_scene(std::span<const Camera> cameras, double unit_length);

/// Per-pixel (direction, moment) rays through pixel centers.
PluckerMap plucker_map(const Camera& camera);

/// F with x_bᵀ F x_a = 0 for homogeneous pixel coordinates, unit Frobenius
/// norm. Throws on zero baseline.
Mat3 fundamental_matrix(const Camera& a, const Camera& b);

struct Match {
    Vec2 a;
    Vec2 b;
};
using MatchSet = std::vector<Match>;

/// True when every match lies inside [0,width]x[0,height] of its image.
bool matches_in_bounds(std::span<const Match> matches, const Intrinsics& a,
                       const Intrinsics& b);

struct SedResult {
    std::vector<double> symmetric;  // mean of both directions, per match
    std::vector<double> forward;    // distance of b to the line F·a, per match
    double mean = 0.0;              // of `symmetric`
    double forward_mean = 0.0;
};

/// Symmetric epipolar distance in pixels. Throws on empty input.
SedResult epipolar_sed(const Mat3& f, std::span<const Match> matches);

/// (position, unit forward axis), both in the world frame.
Vec6 camera_descriptor(const Camera& camera);

/// Euclidean distance with the direction half scaled by `direction_weight`.
double descriptor_distance(const Vec6& a, const Vec6& b, double direction_weight = 1.0);

Mat3 skew(const Vec3& v);

}  // namespace vcam
