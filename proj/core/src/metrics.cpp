#include "fungrasp/metrics.hpp"

#include "fungrasp/error.hpp"
#include "fungrasp/log.hpp"

namespace fungrasp {

bool metric_success(const JointTrajectory& traj, double lift_height, double hold_secs) {
  if (traj.empty() || !traj.has_object_poses()) throw ValidationError("success metric needs object poses");
  const double threshold = traj.object_poses.front().position.z() + lift_height;
  std::size_t start = traj.size();
  while (start > 0 && traj.object_poses[start - 1].position.z() > threshold) --start;
  if (start == traj.size()) return false;
  return traj.times.back() - traj.times[start] >= hold_secs;
}

namespace {

std::size_t window_begin(const JointTrajectory& traj, double window_start) {
  std::size_t i = 0;
  while (i < traj.size() && traj.times[i] < window_start) ++i;
  return i;
}

}  // namespace

double metric_simd(const JointTrajectory& traj, double window_start) {
  if (!traj.has_object_poses()) throw ValidationError("SimD needs object poses");
  const std::size_t begin = window_begin(traj, window_start);
  if (traj.size() < begin + 2) throw ValidationError("SimD needs two records in the window");
  double sum = 0.0;
  for (std::size_t k = begin; k + 1 < traj.size(); ++k) {
    const double dp = (traj.object_poses[k + 1].position - traj.object_poses[k].position).norm();
    sum += dp / (traj.times[k + 1] - traj.times[k]) * 1000.0;
  }
  return sum / static_cast<double>(traj.size() - begin - 1);
}

double metric_contact_ratio(const JointTrajectory& traj, const RobotGrasp& reference, double window_start) {
  if (!traj.has_contacts()) throw ValidationError("contact ratio needs contact records");
  const std::size_t target = reference.contact_count();
  if (target == 0) {
    logger().warn("contact ratio: reference has no target contacts; using 0");
    return 0.0;
  }
  const std::size_t begin = window_begin(traj, window_start);
  if (begin == traj.size()) throw ValidationError("contact ratio window is empty");
  double sum = 0.0;
  for (std::size_t k = begin; k < traj.size(); ++k) {
    const auto& flags = traj.contact_flags[k];
    if (flags.size() != reference.link_contacts.size())
      throw ValidationError("contact record width does not match the reference");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < flags.size(); ++i)
      if (flags[i] && reference.link_contacts[i]) ++hit;
    sum += static_cast<double>(hit) / static_cast<double>(target);
  }
  return sum / static_cast<double>(traj.size() - begin);
}

}  // namespace fungrasp
