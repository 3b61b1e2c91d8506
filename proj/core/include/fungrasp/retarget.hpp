#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fungrasp/grasp.hpp"
#include "fungrasp/hand_model.hpp"
#include "fungrasp/kinematics.hpp"
#include "fungrasp/mesh.hpp"

namespace fungrasp {

struct RetargetWeights {
  double pen = 100.0;
  double fc = 1.0;
  double pos = 500.0;
  double joints = 10.0;
  double col = 50.0;
  double tau_col = 0.02;  // m, self-collision clearance
  bool friction_none = true;  // reserved; the friction-cone relaxation is not implemented

  void validate() const;
};

struct LossTerms {
  double pen = 0.0;
  double fc = 0.0;
  double pos = 0.0;
  double joints = 0.0;
  double col = 0.0;

  double weighted(const RetargetWeights& w) const {
    return w.pen * pen + w.fc * fc + w.pos * pos + w.joints * joints + w.col * col;
  }
};

// --- individual losses --------------------------------------------------------

/// Sum over every link sample point of max(-signed_distance, 0), hand posed by
/// the grasp (object frame).
double loss_pen(const RobotHandModel& model, const RobotGrasp& grasp, const TriMeshObject& mesh);

/// ||G c||^2 for the 6 x 3n grasp map G and stacked inward normals c, i.e. the
/// squared norm of (sum n_k, sum x_k x n_k). Throws ValidationError on empty input.
double loss_fc(std::span<const Vec3> points, std::span<const Vec3> normals);

/// Sum over contact-flagged human joints of squared distance to the mapped
/// robot link origin (object frame). Unmapped flagged joints are skipped.
double loss_pos(const HumanGrasp& human, const RobotHandModel& model, const RobotGrasp& grasp);

/// Sum of limit violations in radians.
double loss_joints(const RobotHandModel& model, const Eigen::VectorXd& q);

/// Ordered-pair joint clearance penalty plus a below-table penalty. `wrist` is a
/// world pose; the table term is skipped when `table` is empty.
double loss_col(const RobotHandModel& model, const Pose6D& wrist, const Eigen::VectorXd& q,
                const std::optional<TablePlane>& table, double tau);

// --- optimization -------------------------------------------------------------

enum class GradientMode { FiniteDifference, Analytic };

struct RetargetConfig {
  double learning_rate = 1e-2;
  int max_iters = 2000;
  double tol = 1e-8;
  double fd_step = 1e-6;
  GradientMode gradient = GradientMode::FiniteDifference;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_backtracks = 10;
  int max_rejections = 50;  // consecutive rejected iterations before declaring a stationary point
  bool project_to_limits = true;
  std::optional<TablePlane> table;  // world frame; object pose comes from the human grasp
  // Force-closure contacts fade out between these distances from the surface.
  double fc_gate_inner = 0.01;
  double fc_gate_outer = 0.03;
};

struct LossRecord {
  int iteration = 0;
  double total = 0.0;
  LossTerms terms;
};

struct RetargetResult {
  RobotGrasp grasp;
  std::vector<LossRecord> loss_history;  // initial state plus every accepted step
  bool converged = false;
  int iterations = 0;
};

/// Weighted retargeting objective over (wrist pose in the object frame, q).
///
/// Gradients are taken with respect to a 6 + dof increment vector:
/// [rotation vector (left-multiplied), translation, joint angles].
class RetargetObjective {
 public:
  struct Gradient {
    Eigen::VectorXd pen, fc, pos, joints, col;
    Eigen::VectorXd weighted(const RetargetWeights& w) const;
  };

  RetargetObjective(const RobotHandModel& model, const HumanGrasp& human, std::vector<bool> target_contacts,
                    const TriMeshObject& mesh, RetargetWeights weights, RetargetConfig config);

  std::size_t parameter_count() const { return 6 + model_.dof(); }
  const RetargetWeights& weights() const { return weights_; }

  LossTerms evaluate(const Pose6D& wrist, const Eigen::VectorXd& q) const;
  Gradient analytic_gradient(const Pose6D& wrist, const Eigen::VectorXd& q) const;
  Gradient finite_difference_gradient(const Pose6D& wrist, const Eigen::VectorXd& q, double h) const;

  static void apply_increment(Pose6D& wrist, Eigen::VectorXd& q, const Eigen::VectorXd& delta);

 private:
  struct ContactPair {
    std::size_t link;
    Vec3 human_point;
  };

  Eigen::MatrixXd parameter_jacobian(const LinkFrames& frames, const Pose6D& wrist, std::size_t link,
                                     const Vec3& point) const;

  const RobotHandModel& model_;
  const TriMeshObject& mesh_;
  RetargetWeights weights_;
  RetargetConfig config_;
  Pose6D object_pose_;
  std::vector<ContactPair> pos_pairs_;
  std::vector<std::size_t> fc_links_;
};

/// Wrist by Kabsch alignment of the robot fingertips to the mapped human
/// fingertips, fingers by matching link directions, alternated to a fixed point.
/// Throws ValidationError with fewer than 3 mapped fingertips.
RobotGrasp initialize_grasp(const RobotHandModel& model, const HumanGrasp& human);

/// Initializes, then runs Adam with backtracking so the total loss never increases.
/// Throws NumericalError if a loss turns NaN.
RetargetResult optimize_grasp(const RobotHandModel& model, const HumanGrasp& human, const TriMeshObject& mesh,
                              const RetargetWeights& weights, const RetargetConfig& config = {});

/// CSV with header `iteration,total,pen,fc,pos,joints,col`.
std::string loss_history_csv(const std::vector<LossRecord>& history);

}  // namespace fungrasp
