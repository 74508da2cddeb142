#pragma once

#include <string>
#include <vector>

#include "ipdyn/control.hpp"

namespace ipdyn {

/// Kinetic energy 1/2 qdot^T G qdot at this state.
double kinetic_energy(const ModelGraph& m, const KinematicState& s);

/// Closed-form end-effector position of the builtin manipulator layout
/// (yaw phi, pitch theta, coupled delta; both links of equal length L):
///   x = L cos(phi) (cos(theta) + cos(theta - zeta))
///   y = L sin(phi) (cos(theta) + cos(theta - zeta))
///   z = L (sin(theta) + sin(theta - zeta)).
/// Measured about the first-link pivot; the fixed clevis offset between the
/// yaw body and the pivot is deliberately not included, so this is the map
/// used for Cartesian tracking metrics, not the F3 frame origin itself.
/// Throws ValidationError for models without this layout.
Vec3 end_effector_position(const ModelGraph& m, const VecX& q);

/// Smooth raised-cosine joint-space reference spanning the builtin
/// manipulator's comfortable workspace: q_d(t) = q0 + A (1 - cos(2 pi t / T))
/// with q0 = (0, 0.3, 0.05), A = (0.4, 0.2, 0.05) and T = duration.
/// Verifies the coupled coordinate stays strictly feasible for the model.
Reference make_reference_paperlike(const ModelGraph& m, double duration);

/// Constant setpoint reference (zero velocity and acceleration).
Reference make_reference_setpoint(const VecX& q_setpoint);

struct SimConfig {
  double dt = 1e-3;       // s
  double duration = 10.0; // s
  Reference reference;
  Gains gains;
  bool control_enabled = true;
  /// Start state; empty vectors mean "start on the reference".
  VecX q0;
  VecX qdot0;
  std::vector<std::pair<std::string, Wrench>> external_wrenches;
};

struct TrajectoryRow {
  double t = 0.0;
  VecX q;
  VecX qdot;
  VecX q_des;
  VecX qdot_des;
  VecX error;
  Vec3 ee = Vec3::Zero();
  Vec3 ee_des = Vec3::Zero();
  double lyapunov = 0.0;
  VecX actuator_force;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  int coordinate_count = 0;
};

struct SimResult {
  Trajectory trajectory;
  bool completed = false;
  double last_good_time = 0.0;
  std::string abort_reason;
};

/// Fixed-step classical Runge-Kutta on (q, qdot); the control force, gravity
/// and externals are re-evaluated inside every stage. Aborts (instead of
/// clamping) on coupling singularities or non-finite state, keeping the rows
/// integrated so far.
SimResult simulate(const ModelGraph& m, const SimConfig& cfg);

struct RmseReport {
  Vec3 cartesian_rmse = Vec3::Zero();       // x, y, z [m]
  VecX coordinate_rmse;                     // per coordinate
  double max_abs_cartesian = 0.0;           // m
  double max_abs_coordinate = 0.0;
};

/// Per-axis RMS of (actual - desired) over all samples. Throws
/// ValidationError on an empty trajectory.
RmseReport compute_rmse(const Trajectory& traj);

/// CSV with header t,q1..qn,qd1..qdn,e1..en,x,y,z,xd,yd,zd,V,Qa1..Qan and
/// one full-precision (17 significant digits) row per sample. Locale-free.
std::string trajectory_csv(const Trajectory& traj);
Trajectory trajectory_from_csv(const std::string& csv_text);

std::string rmse_text(const RmseReport& r);
std::string rmse_json(const RmseReport& r);

}  // namespace ipdyn
