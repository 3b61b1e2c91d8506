#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fungrasp/hand_model.hpp"
#include "fungrasp/pose.hpp"

namespace fungrasp {

inline constexpr std::size_t kHumanJointCount = 21;

/// Keypoint names. Index 0 is the wrist, then four joints per finger from the
/// base to the tip: thumb 1-4, index 5-8, middle 9-12, ring 13-16, pinky 17-20.
extern const std::array<std::string_view, kHumanJointCount> kHumanJointNames;

/// Human grasp reference: keypoints and contacts in the object frame.
struct HumanGrasp {
  std::array<Vec3, kHumanJointCount> joints{};
  std::array<bool, kHumanJointCount> contacts{};
  Pose6D wrist_pose;   // hand pose in the object frame
  Pose6D object_pose;  // object pose in the world (table) frame
  std::string object_mesh_id;

  /// Throws ValidationError: contact on the wrist, coincident consecutive finger joints.
  void validate() const;
  std::size_t contact_count() const;
};

/// Robot grasp reference. `link_contacts` is aligned with `model.contact_links()`.
struct RobotGrasp {
  Pose6D wrist_pose;  // in the object frame
  Eigen::VectorXd joint_angles;
  std::vector<bool> link_contacts;
  std::string object_mesh_id;

  std::size_t contact_count() const;
};

/// Shape checks plus joint limits (tolerance `limit_tol`). Zero contacts only warn.
void validate_robot_grasp(const RobotGrasp& grasp, const RobotHandModel& model, double limit_tol = 1e-9);

HumanGrasp parse_human_grasp(std::string_view text);
HumanGrasp load_human_grasp(const std::filesystem::path& path);
std::string serialize_human_grasp(const HumanGrasp& grasp);

RobotGrasp parse_robot_grasp(std::string_view text, const RobotHandModel& model);
RobotGrasp load_robot_grasp(const std::filesystem::path& path, const RobotHandModel& model);
std::string serialize_robot_grasp(const RobotGrasp& grasp, const RobotHandModel& model);

}  // namespace fungrasp
