#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "vcam/error.hpp"
#include "vcam/geometry.hpp"

using namespace vcam;
using vcam::test::random_camera;
using vcam::test::random_vec;

namespace {

// Pixel -> homogeneous coordinates -> world point at depth z, computed
// without the library's projection helpers.
Vec3 unproject(const Camera& cam, double u, double v, double z) {
    const Vec3 local((u - cam.intrinsics.cx) / cam.intrinsics.fx * z, (v - cam.intrinsics.cy) / cam.intrinsics.fy * z, z);
    return cam.pose.rotation * local + cam.pose.translation;
}

Vec2 project_direct(const Camera& cam, const Vec3& world) {
    const Vec3 local = cam.pose.rotation.transpose() * (world - cam.pose.translation);
    return {cam.intrinsics.fx * local.x() / local.z() + cam.intrinsics.cx,
            cam.intrinsics.fy * local.y() / local.z() + cam.intrinsics.cy};
}

double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Pose, CompositionIsAssociativeAndInvertible) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        const Pose a = random_camera(rng).pose;
        const Pose b = random_camera(rng).pose;
        const Pose c = random_camera(rng).pose;
        const Pose left = (a * b) * c;
        const Pose right = a * (b * c);
        EXPECT_LT(max_abs(left.rotation - right.rotation), 1e-10);
        EXPECT_LT((left.translation - right.translation).cwiseAbs().maxCoeff(), 1e-10);
        const Pose id = a.inverse() * a;
        EXPECT_LT(max_abs(id.rotation - Mat3::Identity()), 1e-10);
        EXPECT_LT(id.translation.norm(), 1e-10);
    }
}

TEST(Pose, ValidityRejectsReflections) {
    Pose p;
    EXPECT_TRUE(p.is_valid());
    p.rotation(0, 0) = -1.0;
    EXPECT_FALSE(p.is_valid());
}

TEST(RelativeToFirst, IdentityReferenceLeavesInput) {
    std::mt19937_64 rng(2);
    std::vector<Camera> cams{Camera{Pose::identity(), test::small_intrinsics()}, random_camera(rng)};
    const auto out = relative_to_first(cams);
    EXPECT_EQ(out[0].pose.rotation, Mat3::Identity());
    EXPECT_LT(max_abs(out[1].pose.rotation - cams[1].pose.rotation), 1e-15);
    EXPECT_LT((out[1].pose.translation - cams[1].pose.translation).norm(), 1e-15);
}

TEST(RelativeToFirst, RotatedReferenceBecomesIdentity) {
    Camera first{Pose::identity(), test::small_intrinsics()};
    first.pose.rotation = Eigen::AngleAxisd(M_PI / 2, Vec3::UnitY()).toRotationMatrix();
    first.pose.translation = Vec3(1, 0, 0);
    std::mt19937_64 rng(3);
    const Camera second = random_camera(rng);
    const auto out = relative_to_first(std::vector<Camera>{first, second});
    EXPECT_EQ(out[0].pose.rotation, Mat3::Identity());
    EXPECT_EQ(out[0].pose.translation, Vec3::Zero());
    const Pose expected = first.pose.inverse() * second.pose;
    EXPECT_LT(max_abs(out[1].pose.rotation - expected.rotation), 1e-12);
    EXPECT_LT((out[1].pose.translation - expected.translation).norm(), 1e-12);
}

TEST(RelativeToFirst, PreservesPairwiseRelativePoses) {
    std::mt19937_64 rng(4);
    std::vector<Camera> cams;
    for (int i = 0; i < 10; ++i) cams.push_back(random_camera(rng));
    const auto out = relative_to_first(cams, 3);
    for (std::size_t i = 0; i < cams.size(); ++i) {
        for (std::size_t j = 0; j < cams.size(); ++j) {
            const Pose before = cams[i].pose.inverse() * cams[j].pose;
            const Pose after = out[i].pose.inverse() * out[j].pose;
            EXPECT_LT(max_abs(before.rotation - after.rotation), 1e-10);
            EXPECT_LT((before.translation - after.translation).cwiseAbs().maxCoeff(), 1e-10);
        }
    }
}

TEST(RelativeToFirst, IsIdempotent) {
    std::mt19937_64 rng(5);
    std::vector<Camera> cams;
    for (int i = 0; i < 6; ++i) cams.push_back(random_camera(rng));
    const auto once = relative_to_first(cams);
    const auto twice = relative_to_first(once);
    for (std::size_t i = 0; i < cams.size(); ++i) {
        EXPECT_LT(max_abs(once[i].pose.rotation - twice[i].pose.rotation), 1e-12);
        EXPECT_LT((once[i].pose.translation - twice[i].pose.translation).norm(), 1e-12);
    }
}

TEST(RelativeToFirst, EmptyListThrows) {
    try {
        relative_to_first(std::vector<Camera>{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "no cameras");
    }
}

TEST(NormalizeScene, InfinityNormRule) {
    std::vector<Camera> cams(3, Camera{Pose::identity(), test::small_intrinsics()});
    cams[1].pose.translation = Vec3(4, 0, 0);
    cams[2].pose.translation = Vec3(0, 0, -4);
    const auto out = normalize_scene(cams, 2.0);
    EXPECT_EQ(out.params.scale, 0.5);
    EXPECT_EQ(out.cameras[0].pose.translation, Vec3(0, 0, 0));
    EXPECT_EQ(out.cameras[1].pose.translation, Vec3(2, 0, 0));
    EXPECT_EQ(out.cameras[2].pose.translation, Vec3(0, 0, -2));
}

TEST(NormalizeScene, CoincidentCamerasKeepScaleOne) {
    std::vector<Camera> cams(4, Camera{Pose::identity(), test::small_intrinsics()});
    const auto out = normalize_scene(cams, 2.0);
    EXPECT_EQ(out.params.scale, 1.0);
    for (const auto& c : out.cameras) EXPECT_EQ(c.pose.translation, Vec3::Zero());
}

TEST(NormalizeScene, RandomCloudHitsUnitLength) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Camera> cams;
        for (int i = 0; i < 12; ++i) cams.push_back(random_camera(rng, 10.0));
        const auto out = normalize_scene(cams, 0.7);
        double extent = 0.0;
        for (const auto& c : out.cameras) extent = std::max(extent, c.pose.translation.cwiseAbs().maxCoeff());
        EXPECT_NEAR(extent, 0.7, 1e-12);
        for (std::size_t i = 0; i < cams.size(); ++i) {
            EXPECT_EQ(out.cameras[i].pose.rotation, cams[i].pose.rotation);
            EXPECT_EQ(out.cameras[i].intrinsics, cams[i].intrinsics);
        }
    }
}

TEST(NormalizeScene, RejectsNonPositiveUnitLength) {
    std::vector<Camera> cams(1, Camera{Pose::identity(), test::small_intrinsics()});
    EXPECT_THROW(normalize_scene(cams, 0.0), Error);
    EXPECT_THROW(normalize_scene(cams, -1.0), Error);
}

TEST(Plucker, PrincipalRayThroughOrigin) {
    Camera cam{Pose::identity(), {1.0, 1.0, 0.5, 0.5, 1, 1}};
    const auto map = plucker_map(cam);
    EXPECT_LT((map.at(0, 0).direction - Vec3(0, 0, 1)).norm(), 1e-15);
    EXPECT_LT(map.at(0, 0).moment.norm(), 1e-15);
}

TEST(Plucker, OffsetCameraMoment) {
    Camera cam{Pose::identity(), {1.0, 1.0, 0.5, 0.5, 1, 1}};
    cam.pose.translation = Vec3(1, 0, 0);
    const auto map = plucker_map(cam);
    EXPECT_LT((map.at(0, 0).direction - Vec3(0, 0, 1)).norm(), 1e-15);
    EXPECT_LT((map.at(0, 0).moment - Vec3(0, -1, 0)).norm(), 1e-15);
}

TEST(Plucker, InvariantsAndReprojection) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const Camera cam = random_camera(rng, 3.0, 8);
        const auto map = plucker_map(cam);
        ASSERT_EQ(map.rays.size(), 64u);
        for (int r = 0; r < 8; ++r) {
            for (int c = 0; c < 8; ++c) {
                const auto& ray = map.at(r, c);
                EXPECT_NEAR(ray.direction.norm(), 1.0, 1e-9);
                EXPECT_NEAR(ray.direction.dot(ray.moment), 0.0, 1e-9);
                // The closest point of the line to the origin, pushed along the ray, projects back.
                const Vec3 closest = ray.direction.cross(ray.moment);
                const Vec3 o = cam.pose.translation;
                const double along = (o - closest).dot(ray.direction);
                const Vec3 point = closest + (along + 2.0) * ray.direction;
                const Vec2 px = project_direct(cam, point);
                EXPECT_NEAR(px.x(), c + 0.5, 1e-6);
                EXPECT_NEAR(px.y(), r + 0.5, 1e-6);
            }
        }
    }
}

TEST(Plucker, RigidTransformLaw) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        const Camera cam = random_camera(rng, 3.0, 8);
        Pose world;
        world.rotation = test::random_rotation(rng);
        world.translation = random_vec(rng, 2.0);
        Camera moved = cam;
        moved.pose = world * cam.pose;
        const auto before = plucker_map(cam);
        const auto after = plucker_map(moved);
        for (std::size_t i = 0; i < before.rays.size(); ++i) {
            const Vec3 d = world.rotation * before.rays[i].direction;
            const Vec3 m = world.rotation * before.rays[i].moment + world.translation.cross(d);
            EXPECT_LT((after.rays[i].direction - d).norm(), 1e-8);
            EXPECT_LT((after.rays[i].moment - m).norm(), 1e-8);
        }
    }
}

TEST(Fundamental, PureTranslationClosedForm) {
    const Intrinsics k{1.0, 1.0, 0.0, 0.0, 10, 10};
    Camera a{Pose::identity(), k};
    Camera b{Pose::identity(), k};
    b.pose.translation = Vec3(1, 0, 0);
    const Mat3 f = fundamental_matrix(a, b);
    Mat3 expected;
    expected << 0, 0, 0, 0, 0, -1, 0, 1, 0;
    expected /= expected.norm();
    // F is defined up to sign.
    const double sign = f(2, 1) > 0 ? 1.0 : -1.0;
    EXPECT_LT(max_abs(sign * f - expected), 1e-12);
    EXPECT_NEAR(f.norm(), 1.0, 1e-12);
}

TEST(Fundamental, DegenerateBaselineThrows) {
    std::mt19937_64 rng(9);
    const Camera a = random_camera(rng);
    Camera b = a;
    b.pose.rotation = test::random_rotation(rng);
    try {
        fundamental_matrix(a, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::degenerate_geometry);
        EXPECT_STREQ(e.what(), "degenerate epipolar geometry");
    }
}

TEST(Fundamental, RandomResidualsVanish) {
    std::mt19937_64 rng(10);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Camera a = random_camera(rng);
        const Camera b = random_camera(rng);
        const Mat3 f = fundamental_matrix(a, b);
        // A point in front of camera a; its projection in b may be anywhere.
        const Vec3 p = unproject(a, test::uniform(rng, 0, 32), test::uniform(rng, 0, 32), test::uniform(rng, 1, 5));
        const Vec3 local_b = b.pose.rotation.transpose() * (p - b.pose.translation);
        if (std::abs(local_b.z()) < 1e-3) continue;
        const Vec3 xa = project_direct(a, p).homogeneous();
        const Vec3 xb = project_direct(b, p).homogeneous();
        // Normalize by pixel magnitudes so distant projections do not inflate the residual.
        worst = std::max(worst, std::abs(xb.dot(f * xa)) / (xa.norm() * xb.norm()));
    }
    EXPECT_LT(worst, 1e-8);
}

TEST(Sed, ExactCorrespondencesAndDisplacement) {
    std::mt19937_64 rng(11);
    const Camera a = random_camera(rng);
    Camera b = a;
    b.pose.translation += Vec3(0.5, 0.1, 0.0);
    b.pose.rotation = Eigen::AngleAxisd(0.1, Vec3::UnitY()).toRotationMatrix() * a.pose.rotation;
    const Mat3 f = fundamental_matrix(a, b);
    MatchSet matches;
    for (int i = 0; i < 20; ++i) {
        const Vec3 p = unproject(a, test::uniform(rng, 4, 28), test::uniform(rng, 4, 28), test::uniform(rng, 2, 4));
        matches.push_back({project_direct(a, p), project_direct(b, p)});
    }
    const auto exact = epipolar_sed(f, matches);
    for (double d : exact.symmetric) EXPECT_LT(d, 1e-6);

    // Shift point_b by 3 px along the normal of its epipolar line.
    MatchSet moved = matches;
    for (auto& m : moved) {
        const Vec3 line = f * m.a.homogeneous();
        const Vec2 normal = Vec2(line.x(), line.y()).normalized();
        m.b += 3.0 * normal;
    }
    const auto shifted = epipolar_sed(f, moved);
    for (double d : shifted.forward) EXPECT_NEAR(d, 3.0, 1e-6);
    EXPECT_NEAR(shifted.forward_mean, 3.0, 1e-6);
}

TEST(Sed, EmptyMatchesThrow) { EXPECT_THROW(epipolar_sed(Mat3::Identity(), MatchSet{}), Error); }

TEST(Descriptor, ExamplesAndSelfDistance) {
    const Camera id{Pose::identity(), test::small_intrinsics()};
    Vec6 expected;
    expected << 0, 0, 0, 0, 0, 1;
    EXPECT_EQ(camera_descriptor(id), expected);

    const Camera side{look_at(Vec3(2, 0, 0), Vec3::Zero()), test::small_intrinsics()};
    Vec6 side_expected;
    side_expected << 2, 0, 0, -1, 0, 0;
    EXPECT_LT((camera_descriptor(side) - side_expected).norm(), 1e-15);
    EXPECT_EQ(descriptor_distance(camera_descriptor(side), camera_descriptor(side)), 0.0);
}

TEST(Descriptor, DirectionWeightScalesOnlyDirection) {
    Vec6 a = Vec6::Zero();
    Vec6 b = Vec6::Zero();
    b(0) = 3.0;
    b(5) = 2.0;
    EXPECT_DOUBLE_EQ(descriptor_distance(a, b, 2.0), std::sqrt(9.0 + 16.0));
    EXPECT_DOUBLE_EQ(descriptor_distance(a, b, 0.0), 3.0);
}

TEST(LookAt, FallsBackWhenLookingAlongUp) {
    const Pose p = look_at(Vec3(0, 0, 5), Vec3::Zero());
    EXPECT_TRUE(p.is_valid());
    EXPECT_LT((p.forward() - Vec3(0, 0, -1)).norm(), 1e-12);
}

TEST(Matches, BoundsCheck) {
    const Intrinsics k = test::small_intrinsics(10);
    EXPECT_TRUE(matches_in_bounds(MatchSet{{Vec2(1, 1), Vec2(9.5, 0)}}, k, k));
    EXPECT_FALSE(matches_in_bounds(MatchSet{{Vec2(-1, 1), Vec2(1, 1)}}, k, k));
}
