#include "fungrasp/dynamics.hpp"

#include <cmath>
#include <string>

#include "fungrasp/error.hpp"
#include "fungrasp/kinematics.hpp"

namespace fungrasp {

ActuatorParams ActuatorParams::uniform(std::size_t dof, double stiffness, double damping) {
  const auto n = static_cast<Eigen::Index>(dof);
  return {Eigen::VectorXd::Constant(n, stiffness), Eigen::VectorXd::Constant(n, damping)};
}

void ActuatorParams::validate(std::size_t dof) const {
  if (static_cast<std::size_t>(stiffness.size()) != dof || static_cast<std::size_t>(damping.size()) != dof)
    throw ValidationError("actuator parameters must have one stiffness and one damping per joint");
  if (!stiffness.allFinite() || !damping.allFinite() || (stiffness.array() <= 0.0).any() ||
      (damping.array() <= 0.0).any())
    throw ValidationError("actuator stiffness and damping must be finite and strictly positive");
}

void SimConfig::validate(std::size_t dof) const {
  if (!(dt > 0.0) || !(control_hz > 0.0)) throw ValidationError("dt and control_hz must be positive");
  if (dt > 1.0 / control_hz * (1.0 + 1e-12)) throw ValidationError("dt must not exceed the control period");
  if (!gravity.allFinite()) throw ValidationError("gravity must be finite");
  if (joint_inertia.size() != 0) {
    if (static_cast<std::size_t>(joint_inertia.size()) != dof)
      throw ValidationError("joint_inertia must have one entry per joint");
    if ((joint_inertia.array() <= 0.0).any() || !joint_inertia.allFinite())
      throw ValidationError("joint_inertia must be positive");
  }
}

Eigen::VectorXd SimConfig::inertia(std::size_t dof) const {
  if (joint_inertia.size() != 0) return joint_inertia;
  return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dof), kDefaultJointInertia);
}

int SimConfig::substeps() const {
  return std::max(1, static_cast<int>(std::llround(1.0 / (control_hz * dt))));
}

double potential_energy(const RobotHandModel& model, const Pose6D& wrist, const Eigen::VectorXd& q,
                        const Vec3& gravity) {
  const LinkFrames frames = compute_link_frames(model, wrist.isometry(), q);
  double u = 0.0;
  for (std::size_t l = 0; l < model.link_count(); ++l)
    u -= model.link(l).mass * gravity.dot(frames[l] * model.link(l).com);
  return u;
}

Eigen::VectorXd gravity_torques(const RobotHandModel& model, const Pose6D& wrist, const Eigen::VectorXd& q,
                                const Vec3& gravity) {
  const LinkFrames frames = compute_link_frames(model, wrist.isometry(), q);
  std::vector<Vec3> weighted_com(model.link_count());
  for (std::size_t l = 0; l < model.link_count(); ++l) weighted_com[l] = frames[l] * model.link(l).com;

  Eigen::VectorXd tau = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.dof()));
  for (std::size_t j = 0; j < model.dof(); ++j) {
    const std::size_t joint_link = model.link_of_joint(j);
    const Vec3 axis = joint_axis_world(model, frames, j);
    const Vec3 pivot = frames[joint_link].translation();
    Vec3 moment = Vec3::Zero();
    for (std::size_t l = 0; l < model.link_count(); ++l) {
      const double m = model.link(l).mass;
      if (m == 0.0 || !model.is_ancestor_or_self(joint_link, l)) continue;
      moment += (weighted_com[l] - pivot).cross(m * gravity);
    }
    tau[static_cast<Eigen::Index>(j)] = -axis.dot(moment);
  }
  return tau;
}

namespace {

void check_state(const JointState& s) {
  if (!s.q.allFinite() || !s.qd.allFinite()) throw NumericalError("joint state is not finite");
}

}  // namespace

JointState step(const RobotHandModel& model, const ActuatorParams& params, const SimConfig& config,
                const JointState& state, const Eigen::VectorXd& target) {
  const auto n = static_cast<Eigen::Index>(model.dof());
  if (state.q.size() != n || state.qd.size() != n || target.size() != n || params.stiffness.size() != n ||
      params.damping.size() != n)
    throw ValidationError("step: dimension mismatch");
  check_state(state);

  Eigen::VectorXd tau = params.stiffness.cwiseProduct(target - state.q) - params.damping.cwiseProduct(state.qd);
  // With compensation the feedforward term cancels the gravity load exactly.
  if (!config.gravity_comp && !config.gravity.isZero(0.0))
    tau -= gravity_torques(model, config.wrist, state.q, config.gravity);

  JointState next;
  next.qd = state.qd + config.dt * tau.cwiseQuotient(config.inertia(model.dof()));
  next.q = state.q + config.dt * next.qd;

  const Eigen::VectorXd lo = model.lower_limits();
  const Eigen::VectorXd hi = model.upper_limits();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (next.q[i] > hi[i]) {
      next.q[i] = hi[i];
      next.qd[i] = 0.0;
    } else if (next.q[i] < lo[i]) {
      next.q[i] = lo[i];
      next.qd[i] = 0.0;
    }
  }
  check_state(next);
  return next;
}

JointTrajectory rollout(const RobotHandModel& model, const ActuatorParams& params, const SimConfig& config,
                        const Eigen::VectorXd& q0, const std::vector<Eigen::VectorXd>& commands) {
  if (commands.empty()) throw ValidationError("rollout needs at least one command");
  config.validate(model.dof());
  const int substeps = config.substeps();
  JointTrajectory traj;
  traj.times.reserve(commands.size());
  JointState state{q0, Eigen::VectorXd::Zero(q0.size())};
  for (std::size_t k = 0; k < commands.size(); ++k) {
    traj.push_back(static_cast<double>(k) / config.control_hz, state.q, commands[k]);
    for (int s = 0; s < substeps; ++s) state = step(model, params, config, state, commands[k]);
  }
  return traj;
}

InitialState initial_state(const RobotHandModel& model, const RobotGrasp& grasp, const Vec3& object_center) {
  const Vec3 offset = grasp.wrist_pose.position - object_center;
  if (offset.norm() < 1e-12) throw ValidationError("target wrist coincides with the object center");
  InitialState out;
  out.q = model.clamp_to_limits(kInitialFingerScale * grasp.joint_angles);
  out.wrist.position = object_center + kInitialWristDistance * offset.normalized();
  out.wrist.rotation = grasp.wrist_pose.rotation;
  return out;
}

}  // namespace fungrasp
