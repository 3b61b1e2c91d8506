#pragma once

#include "fungrasp/grasp.hpp"
#include "fungrasp/trajectory.hpp"

namespace fungrasp {

inline constexpr double kLiftHeight = 0.1;  // m
inline constexpr double kHoldSeconds = 3.0;

/// True iff the trailing run of records whose object height exceeds the first
/// record's by more than `lift_height` lasts at least `hold_secs` and reaches
/// the final record. Requires object poses.
bool metric_success(const JointTrajectory& traj, double lift_height = kLiftHeight, double hold_secs = kHoldSeconds);

/// Mean of |p(k+1) - p(k)| / dt over consecutive records with t >= window_start,
/// in mm/s. Needs object poses and two records in the window.
double metric_simd(const JointTrajectory& traj, double window_start = 0.0);

/// Mean over records with t >= window_start of |achieved and target| / |target|.
/// Zero, with a warning, when the reference has no contacts.
double metric_contact_ratio(const JointTrajectory& traj, const RobotGrasp& reference, double window_start = 0.0);

}  // namespace fungrasp
