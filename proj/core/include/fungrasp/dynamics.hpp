#pragma once

#include <vector>

#include <Eigen/Core>

#include "fungrasp/grasp.hpp"
#include "fungrasp/hand_model.hpp"
#include "fungrasp/pose.hpp"
#include "fungrasp/trajectory.hpp"

namespace fungrasp {

inline const Vec3 kDefaultGravity{0.0, 0.0, -9.81};
inline constexpr double kDefaultJointInertia = 1e-3;  // kg m^2

/// Per-joint actuator stiffness (N m / rad) and damping (N m s / rad).
struct ActuatorParams {
  Eigen::VectorXd stiffness;
  Eigen::VectorXd damping;

  static ActuatorParams uniform(std::size_t dof, double stiffness, double damping);
  /// Strictly positive, finite, sized to dof.
  void validate(std::size_t dof) const;
};

struct SimConfig {
  double dt = 1e-3;
  double control_hz = 10.0;
  Vec3 gravity = kDefaultGravity;
  Eigen::VectorXd joint_inertia;  // empty: kDefaultJointInertia for every joint
  bool gravity_comp = true;
  Pose6D wrist;  // world pose of the hand, fixes the direction of gravity

  void validate(std::size_t dof) const;
  Eigen::VectorXd inertia(std::size_t dof) const;
  /// Integration steps per control tick.
  int substeps() const;
};

struct JointState {
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
};

/// Gravitational potential energy -sum m g . com (J).
double potential_energy(const RobotHandModel& model, const Pose6D& wrist, const Eigen::VectorXd& q,
                        const Vec3& gravity = kDefaultGravity);

/// Static torque each joint must supply to hold the hand against gravity:
/// tau_i = -axis_i . sum_{l below i} (com_l - p_i) x m_l g, which equals dU/dq_i.
Eigen::VectorXd gravity_torques(const RobotHandModel& model, const Pose6D& wrist, const Eigen::VectorXd& q,
                                const Vec3& gravity = kDefaultGravity);

/// One semi-implicit Euler step of the decoupled PD actuator model. Joints that
/// cross a limit are clamped and their velocity zeroed.
JointState step(const RobotHandModel& model, const ActuatorParams& params, const SimConfig& config,
                const JointState& state, const Eigen::VectorXd& target);

/// Zero-order hold of each command for one control period, starting at rest
/// at q0. Record k holds the state at t = k / control_hz and command k.
JointTrajectory rollout(const RobotHandModel& model, const ActuatorParams& params, const SimConfig& config,
                        const Eigen::VectorXd& q0, const std::vector<Eigen::VectorXd>& commands);

struct InitialState {
  Eigen::VectorXd q;
  Pose6D wrist;
};

/// Half the reference finger angles (clamped), wrist 0.3 m from the object
/// center along the center-to-target direction, target orientation.
InitialState initial_state(const RobotHandModel& model, const RobotGrasp& grasp, const Vec3& object_center);

inline constexpr double kInitialWristDistance = 0.30;
inline constexpr double kInitialFingerScale = 0.5;

}  // namespace fungrasp
