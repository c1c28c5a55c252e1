#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace footsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

constexpr double kGravity = 9.81;
constexpr double kPi = 3.14159265358979323846;

// World frame: x forward, y left, z up. Ground is the plane z = 0.
inline Vec3 up() { return Vec3::UnitZ(); }

// Rigid transform, world_from_local.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  Vec3 apply(const Vec3& local) const { return position + orientation * local; }
  Vec3 rotate(const Vec3& local) const { return orientation * local; }
  Pose compose(const Pose& child) const {
    return {apply(child.position), (orientation * child.orientation).normalized()};
  }
  Pose inverse() const {
    Quat inv = orientation.conjugate();
    return {-(inv * position), inv};
  }
};

// Linear and angular velocity of a frame from two poses dt apart.
struct Twist {
  Vec3 linear = Vec3::Zero();
  Vec3 angular = Vec3::Zero();

  Vec3 point_velocity(const Vec3& world_point, const Vec3& frame_origin) const {
    return linear + angular.cross(world_point - frame_origin);
  }
};

inline Twist finite_difference_twist(const Pose& prev, const Pose& next, double dt) {
  Twist t;
  t.linear = (next.position - prev.position) / dt;
  Quat dq = next.orientation * prev.orientation.conjugate();
  if (dq.w() < 0) dq.coeffs() *= -1.0;
  Eigen::AngleAxisd aa(dq);
  t.angular = aa.axis() * (aa.angle() / dt);
  if (!t.angular.allFinite()) t.angular.setZero();
  return t;
}

inline Pose interpolate(const Pose& a, const Pose& b, double s) {
  return {(1.0 - s) * a.position + s * b.position, a.orientation.slerp(s, b.orientation).normalized()};
}

}  // namespace footsim
