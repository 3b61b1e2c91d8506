#include "fungrasp/pose.hpp"

#include <cmath>

namespace fungrasp {

Pose6D Pose6D::from_isometry(const Eigen::Isometry3d& iso) {
  Pose6D out;
  out.position = iso.translation();
  out.rotation = Eigen::Quaterniond(iso.rotation()).normalized();
  return out;
}

Eigen::Isometry3d Pose6D::isometry() const {
  Eigen::Isometry3d iso = Eigen::Isometry3d::Identity();
  iso.linear() = rotation.toRotationMatrix();
  iso.translation() = position;
  return iso;
}

Pose6D Pose6D::inverse() const {
  const Eigen::Quaterniond inv = rotation.conjugate();
  return {-(inv * position), inv};
}

Pose6D Pose6D::operator*(const Pose6D& other) const {
  return {rotation * other.position + position, (rotation * other.rotation).normalized()};
}

Vec3 rotation_vector(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Vec3 v = q.vec();
  const double s = v.norm();
  if (s < 1e-12) {
    // first-order expansion around the identity
    return 2.0 * v;
  }
  const double angle = 2.0 * std::atan2(s, q.w());
  return v * (angle / s);
}

Vec3 rotation_vector(const Mat3& r) { return rotation_vector(Eigen::Quaterniond(r)); }

Eigen::Quaterniond quaternion_from_rotation_vector(const Vec3& v) {
  const double angle = v.norm();
  if (angle < 1e-12) {
    Eigen::Quaterniond q(1.0, 0.5 * v.x(), 0.5 * v.y(), 0.5 * v.z());
    return q.normalized();
  }
  return Eigen::Quaterniond(Eigen::AngleAxisd(angle, v / angle));
}

Mat3 rpy_to_matrix(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

}  // namespace fungrasp
