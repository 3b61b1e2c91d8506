#include "fungrasp/contacts.hpp"

#include <limits>

#include "fungrasp/error.hpp"
#include "fungrasp/kinematics.hpp"
#include "fungrasp/log.hpp"

namespace fungrasp {

double link_min_distance(const RobotHandModel& model, const Eigen::Isometry3d& link_frame_in_object,
                         std::size_t link, const TriMeshObject& mesh) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& s : model.link(link).sample_points)
    best = std::min(best, mesh.signed_distance(link_frame_in_object * s));
  return best;
}

std::vector<bool> derive_contacts(const RobotHandModel& model, const Pose6D& wrist, const Eigen::VectorXd& q,
                                  const TriMeshObject& mesh, const Pose6D& object_pose, double threshold) {
  if (!(threshold > 0.0)) throw ValidationError("contact threshold must be positive");
  // Express the hand directly in the object frame.
  const Eigen::Isometry3d wrist_in_object = object_pose.inverse().isometry() * wrist.isometry();
  const LinkFrames frames = compute_link_frames(model, wrist_in_object, q);
  std::vector<bool> flags;
  flags.reserve(model.contact_links().size());
  for (std::size_t link : model.contact_links()) {
    if (model.link(link).sample_points.empty()) {
      logger().warn("link '{}' has no sample points; contact flag forced to 0", model.link(link).name);
      flags.push_back(false);
      continue;
    }
    flags.push_back(link_min_distance(model, frames[link], link, mesh) <= threshold);
  }
  return flags;
}

}  // namespace fungrasp
