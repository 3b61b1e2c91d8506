#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fungrasp/grasp.hpp"
#include "fungrasp/hand_model.hpp"
#include "fungrasp/mesh.hpp"
#include "fungrasp/pose.hpp"

namespace fixtures {

std::filesystem::path data_path(std::string_view relative);

const fungrasp::RobotHandModel& allegro();
const fungrasp::RobotHandModel& pendulum();
const fungrasp::RobotHandModel& chain3();
const fungrasp::RobotHandModel& finger4();
const fungrasp::TriMeshObject& cube();

/// Human keypoints read off a robot pose (object frame). Mapped joints sit on
/// their robot links; unmapped ones trail off the last mapped point so that no
/// two consecutive joints coincide. Contacts follow `link_contacts`.
fungrasp::HumanGrasp human_from_robot(const fungrasp::RobotHandModel& model, const fungrasp::Pose6D& wrist,
                                      const Eigen::VectorXd& q, const std::vector<bool>& link_contacts,
                                      const fungrasp::Pose6D& object_pose = {});

/// Robot pose reaching fixed points: index and middle tips 1 mm off the cube's
/// +x face, thumb tip 1 mm off the -x face. Damped least squares on the wrist
/// and joints, within limits.
struct CubeGrasp {
  fungrasp::Pose6D wrist;
  Eigen::VectorXd q;
  std::vector<bool> contacts;  // thumb, index, middle set; ring clear
};
const CubeGrasp& cube_grasp();

/// Identity orientation: fingers along +x, palm facing -z.
fungrasp::Pose6D look_down_wrist(const fungrasp::Vec3& position);

}  // namespace fixtures
