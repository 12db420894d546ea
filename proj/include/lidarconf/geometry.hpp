/*
 * geometry.hpp
 *
 * Rigid transforms between the car frame and LiDAR frames, and side tests
 * of points against laser cones and their pyramid linearization.
 *
 * Frame conventions:
 *   - car frame: x forward, y left, z up, origin at the vehicle center.
 *   - LiDAR frame: origin at the laser apex, z along the spin axis.
 *   - lidar_to_car = [R | T] with R = Ry(pitch) * Rx(roll), T = mount position.
 *     A car-frame point p maps into the LiDAR frame as R^T (p - T).
 */

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lidarconf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Margins with magnitude below this are treated as lying on the surface
/// and are classified to the downward side.
inline constexpr double kBoundaryTolerance = 1e-12;

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Mounting pose of one LiDAR. Position in meters (car frame), angles in radians.
struct LidarPose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double pitch = 0.0;  ///< rotation about the car y axis
  double roll = 0.0;   ///< rotation about the car x axis

  Vec3 position() const { return {x, y, z}; }

  bool operator==(const LidarPose&) const = default;
  auto operator<=>(const LidarPose&) const = default;
};

/// One LiDAR pose per unit of the fleet.
using Configuration = std::vector<LidarPose>;

/// Throws std::invalid_argument unless both mount angles are in [-pi/2, pi/2].
inline void validate_pose(const LidarPose& pose) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (!(std::abs(pose.pitch) <= half_pi) || !(std::abs(pose.roll) <= half_pi)) {
    throw std::invalid_argument("mount angles must lie in [-90, 90] degrees");
  }
  if (!std::isfinite(pose.x) || !std::isfinite(pose.y) || !std::isfinite(pose.z)) {
    throw std::invalid_argument("mount position must be finite");
  }
}

/// Rigid transform p -> rotation * p + translation.
struct Transform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Transform identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  Transform operator*(const Transform& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }

  Eigen::Matrix4d homogeneous() const {
    Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
    h.topLeftCorner<3, 3>() = rotation;
    h.topRightCorner<3, 1>() = translation;
    return h;
  }
};

inline Mat3 rotation_y(double beta) {
  const double c = std::cos(beta), s = std::sin(beta);
  Mat3 r;
  r << c, 0.0, s,
       0.0, 1.0, 0.0,
       -s, 0.0, c;
  return r;
}

inline Mat3 rotation_x(double gamma) {
  const double c = std::cos(gamma), s = std::sin(gamma);
  Mat3 r;
  r << 1.0, 0.0, 0.0,
       0.0, c, -s,
       0.0, s, c;
  return r;
}

/// H_l = [Ry(pitch) Rx(roll) | position]: maps LiDAR-frame points into the car frame.
inline Transform build_pose_transform(const LidarPose& pose) {
  return {rotation_y(pose.pitch) * rotation_x(pose.roll), pose.position()};
}

inline Transform invert_transform(const Transform& t) {
  const Mat3 rt = t.rotation.transpose();
  return {rt, -rt * t.translation};
}

inline Vec3 to_lidar_frame(const Vec3& p_car, const LidarPose& pose) {
  const Transform h = build_pose_transform(pose);
  return h.rotation.transpose() * (p_car - h.translation);
}

inline Vec3 to_car_frame(const Vec3& p_local, const LidarPose& pose) {
  return build_pose_transform(pose).apply(p_local);
}

/// Signed side margin of a LiDAR-frame point against the cone swept by a
/// laser with beam angle theta (from horizontal). Positive means upward.
inline double cone_side_test(const Vec3& p_local, double theta) {
  return p_local.z() - std::tan(theta) * std::hypot(p_local.x(), p_local.y());
}

inline bool is_upward(double margin) { return margin >= kBoundaryTolerance; }

/// A laser cone placed in the car frame.
struct LaserCone {
  double beam_angle = 0.0;
  Vec3 apex = Vec3::Zero();
  Transform orientation;  ///< lidar_to_car

  LaserCone(double theta, const LidarPose& pose)
      : beam_angle(theta), apex(pose.position()), orientation(build_pose_transform(pose)) {
    if (!(std::abs(theta) < std::numbers::pi / 2.0)) {
      throw std::invalid_argument("beam angle must satisfy |theta| < 90 degrees");
    }
  }

  double margin(const Vec3& p_car) const {
    return cone_side_test(orientation.rotation.transpose() * (p_car - apex), beam_angle);
  }
};

/// Half-space {p : normal . p - offset > 0}.
struct HalfSpace {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;

  double margin(const Vec3& p) const { return normal.dot(p) - offset; }
};

/// Slope of the pyramid faces, z = slope * (u_i . (x, y)).
///
/// The pyramid surface always lies on or above the cone, so its upward region
/// is contained in the cone's upward region:
///   theta >= 0: edges on the cone, slope = tan(theta) / cos(pi / n).
///   theta <  0: faces tangent to the cone along their midlines, slope = tan(theta).
inline double pyramid_slope(double theta, int n_faces) {
  const double t = std::tan(theta);
  return t >= 0.0 ? t / std::cos(std::numbers::pi / n_faces) : t;
}

/// Whether the pyramid's upward region is the intersection (true) or the
/// union (false) of the upward sides of its faces.
inline bool pyramid_upward_is_intersection(double theta) { return theta >= 0.0; }

/// Face half-spaces of the pyramid approximating the cone of beam angle
/// theta, in the LiDAR frame. Face i has outward horizontal direction at
/// azimuth 2*pi*i/n, so for n = 4 the faces look along +x, +y, -x, -y and
/// the edges sit at 45, 135, 225, 315 degrees. Every plane passes through
/// the apex (offset 0). Normals are unit length and point upward.
inline std::vector<HalfSpace> pyramid_planes(double theta, int n_faces = 4) {
  if (n_faces < 3) {
    throw std::invalid_argument("a pyramid needs at least 3 faces, got " + std::to_string(n_faces));
  }
  const double slope = pyramid_slope(theta, n_faces);
  std::vector<HalfSpace> faces;
  faces.reserve(static_cast<std::size_t>(n_faces));
  for (int i = 0; i < n_faces; ++i) {
    const double psi = 2.0 * std::numbers::pi * i / n_faces;
    // cos(pi/2) etc. come out as ~1e-17; keep axis-aligned faces exact
    auto snap = [](double v) { return std::abs(v) < 1e-15 ? 0.0 : v; };
    Vec3 n(-slope * snap(std::cos(psi)), -slope * snap(std::sin(psi)), 1.0);
    faces.push_back({n.normalized(), 0.0});
  }
  return faces;
}

/// Combined signed margin of a LiDAR-frame point against the pyramid:
/// min of face margins when the upward region is an intersection, max otherwise.
inline double pyramid_side_test(const Vec3& p_local, double theta, std::span<const HalfSpace> faces) {
  const bool intersection = pyramid_upward_is_intersection(theta);
  double combined = intersection ? INFINITY : -INFINITY;
  for (const auto& face : faces) {
    const double m = face.margin(p_local);
    combined = intersection ? std::min(combined, m) : std::max(combined, m);
  }
  return combined;
}

inline double pyramid_side_test(const Vec3& p_local, double theta, int n_faces = 4) {
  const auto faces = pyramid_planes(theta, n_faces);
  return pyramid_side_test(p_local, theta, faces);
}

/// Express a LiDAR-frame half-space in the car frame for a given pose.
inline HalfSpace to_car_frame(const HalfSpace& local, const LidarPose& pose) {
  const Transform h = build_pose_transform(pose);
  const Vec3 n = h.rotation * local.normal;
  return {n, local.offset + n.dot(h.translation)};
}

}  // namespace lidarconf
