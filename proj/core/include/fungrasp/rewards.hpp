#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fungrasp/grasp.hpp"
#include "fungrasp/hand_model.hpp"
#include "fungrasp/mesh.hpp"
#include "fungrasp/pose.hpp"

namespace fungrasp {

struct RewardWeights {
  double w_p = 1.0;
  double w_s = 0.1;
  double w_q = 1.0;
  double beta_p = 10.0;  // 1/m

  void validate() const;
};

struct Twist {
  Vec3 linear = Vec3::Zero();
  Vec3 angular = Vec3::Zero();
};

/// Simulator state. Poses are in the world (table) frame; the reference grasp
/// is in the object frame. `contacts` and `forces` follow model.contact_links().
struct SimState {
  Eigen::VectorXd q;
  Pose6D wrist;
  Twist wrist_velocity;
  Pose6D object;
  Twist object_velocity;
  Vec3 object_initial_position = Vec3::Zero();
  std::vector<bool> contacts;
  Eigen::VectorXd forces;
  RobotGrasp reference;

  /// Throws ValidationError on size mismatches or negative forces.
  void validate(const RobotHandModel& model) const;
};

/// Start offset and length of every block of the feature vector.
struct FeatureLayout {
  struct Block {
    std::string name;
    Eigen::Index offset = 0;
    Eigen::Index size = 0;
  };
  std::vector<Block> blocks;
  Eigen::Index size() const { return blocks.empty() ? 0 : blocks.back().offset + blocks.back().size; }
  const Block& block(std::string_view name) const;
};

/// Blocks in order: q_r (M), wrist (6: position relative to the initial object
/// position, world up; wrist frame), wrist_velocity (6), object (6: position,
/// rotation vector; wrist frame), object_velocity (6), object_displacement (3),
/// wrist_table_height (1), forces (C), position_gap (3 per mapped link),
/// rotation_gap (3), contact_gap (2C). C = contact-capable links.
FeatureLayout feature_layout(const RobotHandModel& model);

struct FeatureVector {
  Eigen::VectorXd values;
  FeatureLayout layout;
  Eigen::VectorXd segment(std::string_view name) const;
};

FeatureVector extract_features(const RobotHandModel& model, const SimState& state, const TablePlane& plane);

/// Target world frames of the reference grasp under the current object pose.
Pose6D target_wrist_world(const SimState& state);

/// exp(-beta_p * sum of mapped-link position gaps).
double reward_position(const RobotHandModel& model, const SimState& state, double beta_p);
/// Ratio of squared norms (object frame) of current to target positions of the
/// links flagged in the reference. Zero, with a warning, without target contacts
/// or when the denominator vanishes.
double contact_weight(const RobotHandModel& model, const SimState& state);
/// Fraction of target contacts currently in contact. Zero, with a warning,
/// without target contacts.
double reward_contact(const SimState& state);
/// -sum |f|, never positive.
double reward_safety(std::span<const double> collision_forces);
/// Mean over every direction of cos(v, v_target) - 1. Shapes must match.
double reward_pose(const std::vector<std::vector<Vec3>>& current, const std::vector<std::vector<Vec3>>& target);
/// Link directions of the current and target hands in the object frame.
double reward_pose(const RobotHandModel& model, const SimState& state);

struct RewardTerms {
  double r_p = 0.0;
  double r_c = 0.0;
  double r_s = 0.0;
  double r_q = 0.0;
  double omega_c = 0.0;
  double total = 0.0;
};

RewardTerms reward_terms(const RewardWeights& weights, const RobotHandModel& model, const SimState& state,
                         std::span<const double> collision_forces);
/// w_p r_p + omega_c r_c + w_s r_s + w_q r_q.
double total_reward(const RewardWeights& weights, const RobotHandModel& model, const SimState& state,
                    std::span<const double> collision_forces);

/// ||c_hat - c||^2 + ||f_hat - f||^2.
double loss_contact_reconstruction(const Eigen::VectorXd& c_hat, const Eigen::VectorXd& c,
                                   const Eigen::VectorXd& f_hat, const Eigen::VectorXd& f);
/// ||a_hat - a||^2.
double loss_action_imitation(const Eigen::VectorXd& a_hat, const Eigen::VectorXd& a);

}  // namespace fungrasp
