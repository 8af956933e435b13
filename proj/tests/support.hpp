#pragma once

#include <cmath>
#include <random>

#include "vcam/geometry.hpp"

namespace vcam::test {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 random_vec(std::mt19937_64& rng, double extent) {
    return {uniform(rng, -extent, extent), uniform(rng, -extent, extent), uniform(rng, -extent, extent)};
}

// Rotation from a random axis-angle pair, built by Rodrigues' formula.
inline Mat3 random_rotation(std::mt19937_64& rng) {
    Vec3 axis = random_vec(rng, 1.0);
    while (axis.norm() < 1e-3) axis = random_vec(rng, 1.0);
    axis.normalize();
    const double angle = uniform(rng, -M_PI, M_PI);
    const Mat3 k = skew(axis);
    return Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

inline Intrinsics small_intrinsics(int size = 32) {
    return {static_cast<double>(size), static_cast<double>(size), size / 2.0, size / 2.0, size, size};
}

inline Camera random_camera(std::mt19937_64& rng, double extent = 3.0, int size = 32) {
    Camera c;
    c.pose.rotation = random_rotation(rng);
    c.pose.translation = random_vec(rng, extent);
    Intrinsics k = small_intrinsics(size);
    k.fx = uniform(rng, 0.5, 2.0) * size;
    k.fy = uniform(rng, 0.5, 2.0) * size;
    k.cx = uniform(rng, 0.3, 0.7) * size;
    k.cy = uniform(rng, 0.3, 0.7) * size;
    c.intrinsics = k;
    return c;
}

}  // namespace vcam::test
