#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace fungrasp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform stored as translation + unit quaternion (w,x,y,z).
struct Pose6D {
  Vec3 position = Vec3::Zero();
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();

  Pose6D() = default;
  Pose6D(const Vec3& p, const Eigen::Quaterniond& q) : position(p), rotation(q) {}

  static Pose6D identity() { return {}; }
  static Pose6D from_isometry(const Eigen::Isometry3d& iso);

  Eigen::Isometry3d isometry() const;
  Pose6D inverse() const;

  Pose6D operator*(const Pose6D& other) const;
  Vec3 operator*(const Vec3& point) const { return rotation * point + position; }

  bool is_normalized(double tol = 1e-9) const {
    return std::abs(rotation.norm() - 1.0) <= tol;
  }
};

/// Log map: axis * angle with angle in [0, pi].
Vec3 rotation_vector(const Eigen::Quaterniond& q);
Vec3 rotation_vector(const Mat3& r);

/// Exp map.
Eigen::Quaterniond quaternion_from_rotation_vector(const Vec3& v);

/// URDF convention: R = Rz(yaw) * Ry(pitch) * Rx(roll).
Mat3 rpy_to_matrix(const Vec3& rpy);

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

}  // namespace fungrasp
