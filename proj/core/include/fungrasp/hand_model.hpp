#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "fungrasp/pose.hpp"

namespace fungrasp {

enum class JointType { Revolute, Fixed };

/// One rigid link plus the joint connecting it to its parent.
///
/// The link frame is `parent_frame * origin(xyz, rpy) * rotation(axis, q)`, so a
/// revolute joint sits at the origin of its child link frame.
struct Link {
  std::string name;
  std::optional<std::string> parent;
  JointType joint_type = JointType::Fixed;
  Vec3 axis = Vec3::UnitZ();
  Vec3 origin_xyz = Vec3::Zero();
  Vec3 origin_rpy = Vec3::Zero();
  double limit_lower = 0.0;
  double limit_upper = 0.0;
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  std::vector<Vec3> sample_points;  // link frame, used for penetration/contact tests
  bool contact = false;             // contact-capable link

  bool operator==(const Link& other) const;
};

/// Immutable kinematic tree of a dexterous hand.
///
/// Joint indices (positions in a configuration vector q) follow the order in
/// which revolute links appear in `links()`.
class RobotHandModel {
 public:
  /// Validates every invariant and throws ValidationError on failure.
  RobotHandModel(std::string name, std::vector<Link> links,
                 std::vector<std::vector<std::string>> fingers,
                 std::map<std::string, int> human_map);

  const std::string& name() const { return name_; }
  std::span<const Link> links() const { return links_; }
  const Link& link(std::size_t i) const { return links_.at(i); }
  std::size_t link_count() const { return links_.size(); }
  std::size_t dof() const { return joint_links_.size(); }
  std::size_t root() const { return root_; }

  std::optional<std::size_t> find_link(std::string_view name) const;
  /// Throws ValidationError for unknown names.
  std::size_t link_index(std::string_view name) const;

  /// -1 for the root.
  int parent_index(std::size_t link) const { return parents_[link]; }
  /// Parents precede children.
  std::span<const std::size_t> topological_order() const { return topo_order_; }
  bool is_ancestor_or_self(std::size_t ancestor, std::size_t link) const;

  /// Index into q for a revolute link, nothing for fixed links.
  std::optional<std::size_t> joint_of_link(std::size_t link) const;
  std::size_t link_of_joint(std::size_t joint) const { return joint_links_.at(joint); }

  /// Fixed part of each link's joint transform (origin xyz + rpy).
  const Eigen::Isometry3d& origin_transform(std::size_t link) const { return origins_[link]; }

  std::span<const std::size_t> contact_links() const { return contact_links_; }
  /// Finger chains as link indices, base to tip.
  const std::vector<std::vector<std::size_t>>& finger_chains() const { return finger_indices_; }
  const std::vector<std::vector<std::string>>& fingers() const { return fingers_; }

  const std::map<std::string, int>& human_map() const { return human_map_; }
  /// (link index, human joint index) pairs sorted by link index.
  const std::vector<std::pair<std::size_t, int>>& mapped_links() const { return mapped_; }
  std::optional<std::size_t> link_for_human_joint(int human_joint) const;

  Eigen::VectorXd lower_limits() const;
  Eigen::VectorXd upper_limits() const;
  Eigen::VectorXd clamp_to_limits(const Eigen::VectorXd& q) const;

  bool operator==(const RobotHandModel& other) const;

 private:
  std::string name_;
  std::vector<Link> links_;
  std::vector<std::vector<std::string>> fingers_;
  std::map<std::string, int> human_map_;

  std::size_t root_ = 0;
  std::vector<int> parents_;
  std::vector<std::size_t> topo_order_;
  std::vector<std::optional<std::size_t>> link_joint_;
  std::vector<std::size_t> joint_links_;
  std::vector<Eigen::Isometry3d> origins_;
  std::vector<std::size_t> contact_links_;
  std::vector<std::vector<std::size_t>> finger_indices_;
  std::vector<std::pair<std::size_t, int>> mapped_;
};

/// Parses the strict JSON robot-description document.
///
/// Throws ParseError for malformed text or unknown keys and ValidationError for
/// invariant violations (cycles, missing limits, non-unit axes, ...).
RobotHandModel parse_robot_description(std::string_view text);
RobotHandModel load_robot_description(const std::filesystem::path& path);
std::string serialize_robot_description(const RobotHandModel& model);

}  // namespace fungrasp
