#include "lidarconf/geometry.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace lidarconf {
namespace {

constexpr double kPi = std::numbers::pi;

LidarPose random_pose(oracle::SplitMix& rng) {
  return {rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-kPi / 2, kPi / 2),
          rng.uniform(-kPi / 2, kPi / 2)};
}

TEST(Geometry, IdentityPose) {
  const Transform t = build_pose_transform({});
  EXPECT_TRUE(t.rotation.isApprox(Mat3::Identity(), 0.0) || (t.rotation - Mat3::Identity()).norm() == 0.0);
  EXPECT_EQ(t.translation, Vec3::Zero());
}

TEST(Geometry, PureTranslation) {
  const Transform t = build_pose_transform({1, 2, 3, 0, 0});
  EXPECT_EQ((t.rotation - Mat3::Identity()).norm(), 0.0);
  EXPECT_EQ(t.translation, Vec3(1, 2, 3));
  const Transform inv = invert_transform(t);
  EXPECT_EQ(inv.translation, Vec3(-1, -2, -3));
}

TEST(Geometry, QuarterPitchMapsXToMinusZ) {
  // Ry(pi/2) (1,0,0) = (cos, 0, -sin) = (0, 0, -1)
  const Transform t = build_pose_transform({0, 0, 0, kPi / 2, 0});
  const Vec3 v = t.rotation * Vec3::UnitX();
  EXPECT_NEAR(v.x(), 0.0, 1e-15);
  EXPECT_NEAR(v.y(), 0.0, 1e-15);
  EXPECT_NEAR(v.z(), -1.0, 1e-15);
}

TEST(Geometry, InverseComposesToIdentity) {
  oracle::SplitMix rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Transform t = build_pose_transform(random_pose(rng));
    const Transform id = t * invert_transform(t);
    EXPECT_LT((id.rotation - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT(id.translation.cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Geometry, RotationIsProper) {
  oracle::SplitMix rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 r = build_pose_transform(random_pose(rng)).rotation;
    EXPECT_LT((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-9);
  }
}

TEST(Geometry, ToLidarFrameIdentityPose) {
  EXPECT_EQ(to_lidar_frame({1, 2, 3}, {}), Vec3(1, 2, 3));
}

TEST(Geometry, ApexMapsToLocalOrigin) {
  const LidarPose pose{4.335641, -0.777785, 0.696529, 0, 0};
  EXPECT_EQ(to_lidar_frame(pose.position(), pose), Vec3::Zero());
}

TEST(Geometry, ToLidarFrameMatchesHomogeneousOracle) {
  oracle::SplitMix rng(3);
  for (int i = 0; i < 2000; ++i) {
    const LidarPose pose = random_pose(rng);
    const Vec3 p(rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20));
    const Vec3 got = to_lidar_frame(p, pose);
    const auto want = oracle::to_local({p.x(), p.y(), p.z()}, pose.x, pose.y, pose.z, pose.pitch, pose.roll);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(got[k], want[static_cast<std::size_t>(k)], 1e-9);
    EXPECT_LT((to_car_frame(got, pose) - p).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Geometry, ConeSideTestExamples) {
  const double ten = deg_to_rad(10.0);
  EXPECT_DOUBLE_EQ(cone_side_test({0, 0, 1}, ten), 1.0);
  EXPECT_NEAR(cone_side_test({1, 0, std::tan(ten)}, ten), 0.0, 1e-15);
  // 0 - tan(-10 deg) * 5
  EXPECT_NEAR(cone_side_test({3, 4, 0}, -ten), 0.8816349035, 1e-9);
  EXPECT_FALSE(is_upward(cone_side_test({1, 0, std::tan(ten)}, ten)));
}

TEST(Geometry, ConeTestInvariantUnderSpin) {
  oracle::SplitMix rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    const double theta = rng.uniform(-1.4, 1.4);
    const double phi = rng.uniform(0, 2 * kPi);
    const Vec3 q = Eigen::AngleAxisd(phi, Vec3::UnitZ()) * p;
    EXPECT_NEAR(cone_side_test(p, theta), cone_side_test(q, theta), 1e-9);
  }
}

TEST(Geometry, ConeTestMonotoneInZ) {
  oracle::SplitMix rng(6);
  for (int i = 0; i < 500; ++i) {
    const double x = rng.uniform(-5, 5), y = rng.uniform(-5, 5), theta = rng.uniform(-1.4, 1.4);
    double prev = -INFINITY;
    for (double z = -5; z <= 5; z += 0.25) {
      const double g = cone_side_test({x, y, z}, theta);
      EXPECT_GT(g, prev);
      prev = g;
    }
  }
}

TEST(Geometry, FlatPyramidIsHorizontalPlane) {
  for (const auto& face : pyramid_planes(0.0)) {
    EXPECT_EQ(face.normal, Vec3::UnitZ());
    EXPECT_EQ(face.offset, 0.0);
  }
}

TEST(Geometry, PyramidAxisPointIsAbove) {
  const double ten = deg_to_rad(10.0);
  for (const auto& face : pyramid_planes(ten, 4)) EXPECT_GT(face.margin({0, 0, 1}), 0.0);
  EXPECT_TRUE(is_upward(pyramid_side_test({0, 0, 1}, ten)));
}

TEST(Geometry, PyramidFacesAreAxisAligned) {
  const auto faces = pyramid_planes(deg_to_rad(10.0), 4);
  ASSERT_EQ(faces.size(), 4u);
  // horizontal parts point opposite +x, +y, -x, -y
  EXPECT_LT(faces[0].normal.x(), 0.0);
  EXPECT_EQ(faces[0].normal.y(), 0.0);
  EXPECT_LT(faces[1].normal.y(), 0.0);
  EXPECT_EQ(faces[1].normal.x(), 0.0);
  for (const auto& f : faces) EXPECT_NEAR(f.normal.norm(), 1.0, 1e-15);
}

TEST(Geometry, PyramidEdgesLieOnConeForUpwardBeams) {
  const double theta = deg_to_rad(25.0);
  const double a = pyramid_slope(theta, 4);
  // edge at 45 degrees, unit horizontal distance
  const Vec3 edge(std::cos(kPi / 4), std::sin(kPi / 4), std::tan(theta));
  EXPECT_NEAR(a * std::cos(kPi / 4), std::tan(theta), 1e-15);
  EXPECT_NEAR(cone_side_test(edge, theta), 0.0, 1e-12);
}

TEST(Geometry, PyramidRejectsFewFaces) {
  EXPECT_THROW(pyramid_planes(0.1, 2), std::invalid_argument);
}

TEST(Geometry, PyramidUpwardRegionInsideCone) {
  oracle::SplitMix rng(17);
  for (double deg : {10.0, -10.0, 25.0, -25.0}) {
    const double theta = deg_to_rad(deg);
    const auto faces = pyramid_planes(theta, 4);
    for (int i = 0; i < 20000; ++i) {
      const Vec3 p(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-5, 5));
      if (is_upward(pyramid_side_test(p, theta, faces))) EXPECT_GT(cone_side_test(p, theta), 0.0);
    }
  }
}

TEST(Geometry, HalfSpaceToCarFrame) {
  oracle::SplitMix rng(23);
  for (int i = 0; i < 200; ++i) {
    const LidarPose pose = random_pose(rng);
    const HalfSpace local{Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), 1).normalized(), 0.0};
    const HalfSpace car = to_car_frame(local, pose);
    const Vec3 p(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10));
    EXPECT_NEAR(car.margin(p), local.margin(to_lidar_frame(p, pose)), 1e-9);
  }
}

TEST(Geometry, LaserConeMatchesLocalTest) {
  const LidarPose pose{1, -2, 0.5, 0.2, -0.1};
  const LaserCone cone(deg_to_rad(10.0), pose);
  const Vec3 p(4, 1, 2);
  EXPECT_DOUBLE_EQ(cone.margin(p), cone_side_test(to_lidar_frame(p, pose), deg_to_rad(10.0)));
  EXPECT_THROW(LaserCone(kPi / 2, pose), std::invalid_argument);
}

TEST(Geometry, ValidatePose) {
  EXPECT_NO_THROW(validate_pose({0, 0, 0, kPi / 2, -kPi / 2}));
  EXPECT_THROW(validate_pose({0, 0, 0, 1.6, 0}), std::invalid_argument);
  EXPECT_THROW(validate_pose({NAN, 0, 0, 0, 0}), std::invalid_argument);
}

}  // namespace
}  // namespace lidarconf
