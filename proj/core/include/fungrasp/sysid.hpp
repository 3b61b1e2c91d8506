#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fungrasp/cmaes.hpp"
#include "fungrasp/dynamics.hpp"
#include "fungrasp/hand_model.hpp"
#include "fungrasp/trajectory.hpp"

namespace fungrasp {

/// Sum over ticks and joints of (a - b)^2 on q_measured. Same length and width required.
double trajectory_sq_error(const JointTrajectory& a, const JointTrajectory& b);

/// Replays real.q_commanded from rest at real.q_measured[0] and returns the
/// squared joint-angle error summed over all control ticks (rad^2).
double sim_real_loss(const RobotHandModel& model, const ActuatorParams& params, const SimConfig& config,
                     const JointTrajectory& real);

enum class SysidMode { PerJoint, Tied };

/// Positive search box in natural units; searched in log space.
struct SysidSearchSpace {
  double stiffness_lower = 0.05;
  double stiffness_upper = 50.0;
  double damping_lower = 1e-3;
  double damping_upper = 5.0;

  void validate() const;
};

struct SysidOptions {
  SysidMode mode = SysidMode::PerJoint;
  SysidSearchSpace space;
};

struct SysidResult {
  ActuatorParams params;
  double best_loss = 0.0;
  std::vector<double> loss_per_gen;  // best so far
  int evaluations = 0;
};

/// CMA-ES over log stiffness and log damping (2M parameters, or 2 when tied).
/// The search runs in box-normalized coordinates: the start is the box center
/// and `cmaes.sigma0` is a fraction of each log range. Any bounds set on
/// `cmaes` itself are ignored.
SysidResult identify(const RobotHandModel& model, const JointTrajectory& real, const CmaesConfig& cmaes,
                     const SimConfig& sim_config, const SysidOptions& options = {});

/// Per joint, a sum of `components` sines with log-spaced frequencies in
/// [f_min, f_max] Hz and random phases, centered in the joint range with peak
/// amplitude `amplitude_fraction` of the half range. One command per tick.
std::vector<Eigen::VectorXd> multisine_commands(const RobotHandModel& model, double duration, double control_hz,
                                                std::uint64_t seed, int components = 5, double f_min = 0.2,
                                                double f_max = 2.0, double amplitude_fraction = 0.5);

/// Adds N(0, sigma^2) to every measured angle.
JointTrajectory add_measurement_noise(JointTrajectory traj, double sigma, std::uint64_t seed);

std::string serialize_actuator_params(const ActuatorParams& params);
ActuatorParams parse_actuator_params(std::string_view text);
/// `generation,best_loss` rows.
std::string generation_csv(const SysidResult& result);

}  // namespace fungrasp
