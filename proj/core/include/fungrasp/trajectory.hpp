#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fungrasp/pose.hpp"

namespace fungrasp {

/// Time-stamped command/state record, one entry per control tick.
struct JointTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> q_measured;
  std::vector<Eigen::VectorXd> q_commanded;
  std::vector<Pose6D> object_poses;                // empty or one per tick
  std::vector<std::vector<bool>> contact_flags;    // empty or one per tick
  std::vector<Pose6D> wrist_poses;                 // empty or one per tick

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  std::size_t dof() const { return q_measured.empty() ? 0 : static_cast<std::size_t>(q_measured.front().size()); }
  bool has_object_poses() const { return !object_poses.empty(); }
  bool has_contacts() const { return !contact_flags.empty(); }
  bool has_wrist_poses() const { return !wrist_poses.empty(); }

  /// Strictly increasing times, consistent lengths and widths.
  void validate() const;
  void push_back(double t, Eigen::VectorXd q, Eigen::VectorXd q_cmd);
};

/// JSON-lines: {"t":..., "q":[...], "q_cmd":[...], "obj_pose":{...}, "contacts":[...], "wrist_pose":{...}}
/// with the last three keys optional. Errors name the offending line.
JointTrajectory parse_trajectory_jsonl(std::string_view text);
JointTrajectory load_trajectory(const std::filesystem::path& path);
std::string serialize_trajectory_jsonl(const JointTrajectory& traj);

}  // namespace fungrasp
