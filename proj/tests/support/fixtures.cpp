#include "fixtures.hpp"

#include <cmath>
#include <stdexcept>

#include "fungrasp/kinematics.hpp"

#ifndef FUNGRASP_TEST_DATA_DIR
#error "FUNGRASP_TEST_DATA_DIR must be defined"
#endif

namespace fixtures {

using namespace fungrasp;

std::filesystem::path data_path(std::string_view relative) {
  return std::filesystem::path(FUNGRASP_TEST_DATA_DIR) / relative;
}

const RobotHandModel& allegro() {
  static const RobotHandModel m = load_robot_description(data_path("hands/allegro_like.json"));
  return m;
}
const RobotHandModel& pendulum() {
  static const RobotHandModel m = load_robot_description(data_path("hands/pendulum.json"));
  return m;
}
const RobotHandModel& chain3() {
  static const RobotHandModel m = load_robot_description(data_path("hands/chain3.json"));
  return m;
}
const RobotHandModel& finger4() {
  static const RobotHandModel m = load_robot_description(data_path("hands/finger4.json"));
  return m;
}
const TriMeshObject& cube() {
  static const TriMeshObject m = load_obj(data_path("objects/cube_5cm.obj"));
  return m;
}

HumanGrasp human_from_robot(const RobotHandModel& model, const Pose6D& wrist, const Eigen::VectorXd& q,
                            const std::vector<bool>& link_contacts, const Pose6D& object_pose) {
  const LinkFrames frames = compute_link_frames(model, wrist.isometry(), q);
  HumanGrasp h;
  h.wrist_pose = wrist;
  h.object_pose = object_pose;
  h.object_mesh_id = "cube_5cm";
  std::array<bool, kHumanJointCount> have{};
  for (const auto& [link, joint] : model.mapped_links()) {
    h.joints[static_cast<std::size_t>(joint)] = frames[link].translation();
    have[static_cast<std::size_t>(joint)] = true;
  }
  if (!have[0]) {
    h.joints[0] = wrist.position;
    have[0] = true;
  }
  // Unmapped joints: step 2 cm past the previous joint, away from the palm.
  const Vec3 step = wrist.rotation * Vec3(0.02, -0.01, 0.0);
  for (std::size_t f = 0; f < 5; ++f) {
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t j = 1 + 4 * f + k;
      if (have[j]) continue;
      const Vec3 prev = k == 0 ? h.joints[0] + wrist.rotation * Vec3(0.09, -0.09, 0.0) : h.joints[j - 1];
      h.joints[j] = prev + step;
    }
  }
  const auto links = model.contact_links();
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (!link_contacts.at(i)) continue;
    auto it = model.human_map().find(model.link(links[i]).name);
    if (it == model.human_map().end()) throw std::runtime_error("contact link without a human joint");
    h.contacts[static_cast<std::size_t>(it->second)] = true;
  }
  return h;
}

Pose6D look_down_wrist(const Vec3& position) {
  Pose6D p;
  p.position = position;
  p.rotation = Eigen::Quaterniond::Identity();
  return p;
}

const CubeGrasp& cube_grasp() {
  static const CubeGrasp grasp = [] {
    const RobotHandModel& model = allegro();
    const std::vector<std::pair<std::string, Vec3>> goals = {
        {"thumb_tip", Vec3(-0.026, 0.0, 0.0)},
        {"index_tip", Vec3(0.026, 0.02, 0.0)},
        {"middle_tip", Vec3(0.026, -0.02, 0.0)},
    };
    const Eigen::VectorXd lo = model.lower_limits();
    const Eigen::VectorXd hi = model.upper_limits();
    const Eigen::VectorXd q_nominal = 0.5 * (lo + hi);
    const auto dof = static_cast<Eigen::Index>(model.dof());

    CubeGrasp g;
    g.wrist = look_down_wrist(Vec3(-0.09, 0.0, 0.06));
    g.q = q_nominal;
    constexpr double reg = 1e-3;
    for (int it = 0; it < 500; ++it) {
      const LinkFrames frames = compute_link_frames(model, g.wrist.isometry(), g.q);
      const auto rows = static_cast<Eigen::Index>(3 * goals.size());
      Eigen::VectorXd r(rows + dof);
      Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(rows + dof, 6 + dof);
      for (std::size_t k = 0; k < goals.size(); ++k) {
        const std::size_t link = model.link_index(goals[k].first);
        const Vec3 p = frames[link].translation();
        const auto row = static_cast<Eigen::Index>(3 * k);
        r.segment<3>(row) = p - goals[k].second;
        jac.block<3, 3>(row, 0) = -skew(p - g.wrist.position);
        jac.block<3, 3>(row, 3).setIdentity();
        jac.block(row, 6, 3, dof) = point_jacobian(model, frames, link, p);
      }
      r.tail(dof) = reg * (g.q - q_nominal);
      jac.bottomRightCorner(dof, dof) = reg * Eigen::MatrixXd::Identity(dof, dof);
      Eigen::MatrixXd lhs = jac.transpose() * jac;
      lhs.diagonal().array() += 1e-6;
      const Eigen::VectorXd delta = lhs.ldlt().solve(-jac.transpose() * r);
      g.wrist.rotation = (quaternion_from_rotation_vector(delta.head<3>()) * g.wrist.rotation).normalized();
      g.wrist.position += delta.segment<3>(3);
      g.q = (g.q + delta.tail(dof)).cwiseMax(lo).cwiseMin(hi);
    }
    g.contacts.assign(model.contact_links().size(), false);
    for (std::size_t i = 0; i < model.contact_links().size(); ++i) {
      const std::string& name = model.link(model.contact_links()[i]).name;
      g.contacts[i] = name == "thumb_tip" || name == "index_tip" || name == "middle_tip";
    }
    return g;
  }();
  return grasp;
}

}  // namespace fixtures
