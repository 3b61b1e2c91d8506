#pragma once

#include <vector>

#include <Eigen/Core>

#include "fungrasp/hand_model.hpp"
#include "fungrasp/mesh.hpp"
#include "fungrasp/pose.hpp"

namespace fungrasp {

inline constexpr double kDefaultContactThreshold = 0.005;  // m

/// Contact flag per contact-capable link (aligned with `model.contact_links()`):
/// set iff some sample point of the link lies within `threshold` of the
/// surface (signed distance <= threshold, so penetration counts).
///
/// `wrist` and `object_pose` are both world-frame poses.
std::vector<bool> derive_contacts(const RobotHandModel& model, const Pose6D& wrist, const Eigen::VectorXd& q,
                                  const TriMeshObject& mesh, const Pose6D& object_pose,
                                  double threshold = kDefaultContactThreshold);

/// Minimum signed distance over a link's sample points (object frame), +inf if it has none.
double link_min_distance(const RobotHandModel& model, const Eigen::Isometry3d& link_frame_in_object,
                         std::size_t link, const TriMeshObject& mesh);

}  // namespace fungrasp
