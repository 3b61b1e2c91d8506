#include "fungrasp/kinematics.hpp"

#include <string>

#include "fungrasp/error.hpp"

namespace fungrasp {

LinkFrames compute_link_frames(const RobotHandModel& model, const Eigen::Isometry3d& wrist,
                               const Eigen::VectorXd& q) {
  if (static_cast<std::size_t>(q.size()) != model.dof())
    throw ValidationError("configuration has " + std::to_string(q.size()) + " entries, model has dof " +
                          std::to_string(model.dof()));
  LinkFrames frames(model.link_count());
  for (std::size_t i : model.topological_order()) {
    const int parent = model.parent_index(i);
    if (parent < 0) {
      frames[i] = wrist;
      continue;
    }
    Eigen::Isometry3d f = frames[parent] * model.origin_transform(i);
    if (auto joint = model.joint_of_link(i)) {
      f.linear() = f.linear() * Eigen::AngleAxisd(q[*joint], model.link(i).axis).toRotationMatrix();
    }
    frames[i] = f;
  }
  return frames;
}

std::vector<Pose6D> forward_kinematics(const RobotHandModel& model, const Pose6D& wrist,
                                       const Eigen::VectorXd& q) {
  const LinkFrames frames = compute_link_frames(model, wrist.isometry(), q);
  std::vector<Pose6D> poses;
  poses.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    // The root keeps the caller's quaternion bit-for-bit.
    poses.push_back(i == model.root() ? wrist : Pose6D::from_isometry(frames[i]));
  }
  return poses;
}

std::vector<std::vector<Vec3>> link_directions(const RobotHandModel& model, const LinkFrames& frames) {
  std::vector<std::vector<Vec3>> out;
  out.reserve(model.finger_chains().size());
  for (const auto& chain : model.finger_chains()) {
    std::vector<Vec3> dirs;
    dirs.reserve(chain.size() - 1);
    for (std::size_t j = 0; j + 1 < chain.size(); ++j) {
      const Vec3 d = frames[chain[j + 1]].translation() - frames[chain[j]].translation();
      const double len = d.norm();
      if (len < 1e-12)
        throw ValidationError("zero-length finger segment between '" + model.link(chain[j]).name + "' and '" +
                              model.link(chain[j + 1]).name + "'");
      dirs.push_back(d / len);
    }
    out.push_back(std::move(dirs));
  }
  return out;
}

std::vector<std::vector<Vec3>> link_directions(const RobotHandModel& model, const Pose6D& wrist,
                                               const Eigen::VectorXd& q) {
  return link_directions(model, compute_link_frames(model, wrist.isometry(), q));
}

Vec3 joint_axis_world(const RobotHandModel& model, const LinkFrames& frames, std::size_t joint) {
  const std::size_t link = model.link_of_joint(joint);
  return frames[link].linear() * model.link(link).axis;
}

Eigen::Matrix3Xd point_jacobian(const RobotHandModel& model, const LinkFrames& frames, std::size_t link,
                                const Vec3& world_point) {
  Eigen::Matrix3Xd jac = Eigen::Matrix3Xd::Zero(3, static_cast<Eigen::Index>(model.dof()));
  int cur = static_cast<int>(link);
  while (cur >= 0) {
    if (auto joint = model.joint_of_link(static_cast<std::size_t>(cur))) {
      const Vec3 axis = joint_axis_world(model, frames, *joint);
      jac.col(static_cast<Eigen::Index>(*joint)) = axis.cross(world_point - frames[cur].translation());
    }
    cur = model.parent_index(static_cast<std::size_t>(cur));
  }
  return jac;
}

Eigen::Matrix3Xd position_jacobian(const RobotHandModel& model, const Pose6D& wrist,
                                   const Eigen::VectorXd& q, std::string_view link) {
  const std::size_t idx = model.link_index(link);
  const LinkFrames frames = compute_link_frames(model, wrist.isometry(), q);
  return point_jacobian(model, frames, idx, frames[idx].translation());
}

std::vector<Vec3> joint_positions(const RobotHandModel& model, const LinkFrames& frames) {
  std::vector<Vec3> out;
  out.reserve(model.dof());
  for (std::size_t j = 0; j < model.dof(); ++j) out.push_back(frames[model.link_of_joint(j)].translation());
  return out;
}

}  // namespace fungrasp
