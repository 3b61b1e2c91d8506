#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "fungrasp/hand_model.hpp"
#include "fungrasp/pose.hpp"

namespace fungrasp {

/// World frames of every link, indexed like `model.links()`.
using LinkFrames = std::vector<Eigen::Isometry3d>;

LinkFrames compute_link_frames(const RobotHandModel& model, const Eigen::Isometry3d& wrist,
                               const Eigen::VectorXd& q);

/// Throws ValidationError when q.size() != model.dof(). q may lie outside limits.
std::vector<Pose6D> forward_kinematics(const RobotHandModel& model, const Pose6D& wrist,
                                       const Eigen::VectorXd& q);

/// Per finger, the unit direction from chain frame j to chain frame j+1
/// (chain length minus one directions per finger).
std::vector<std::vector<Vec3>> link_directions(const RobotHandModel& model, const LinkFrames& frames);
std::vector<std::vector<Vec3>> link_directions(const RobotHandModel& model, const Pose6D& wrist,
                                               const Eigen::VectorXd& q);

/// World-frame joint axis of revolute joint `joint`.
Vec3 joint_axis_world(const RobotHandModel& model, const LinkFrames& frames, std::size_t joint);

/// 3 x dof Jacobian of a world point rigidly attached to `link` with respect to q.
Eigen::Matrix3Xd point_jacobian(const RobotHandModel& model, const LinkFrames& frames, std::size_t link,
                                const Vec3& world_point);

/// 3 x dof Jacobian of the link frame origin.
Eigen::Matrix3Xd position_jacobian(const RobotHandModel& model, const Pose6D& wrist,
                                   const Eigen::VectorXd& q, std::string_view link);

/// World positions of every revolute joint (link-frame origins), ordered by joint index.
std::vector<Vec3> joint_positions(const RobotHandModel& model, const LinkFrames& frames);

}  // namespace fungrasp
