#pragma once

#include <map>
#include <string>

#include "ipdyn/model.hpp"

namespace ipdyn {

/// Minimal-coordinate state (q, qdot). Mixed units per coordinate metadata.
struct KinematicState {
  VecX q;
  VecX qdot;

  static KinematicState zero(int n) { return {VecX::Zero(n), VecX::Zero(n)}; }
};

/// Throws ValidationError if the state does not fit the model (size, finiteness).
/// Coupled coordinates outside the feasible interval surface later as
/// CouplingSingularityError from the evaluation itself.
void validate_state(const ModelGraph& m, const KinematicState& s);

/// Poses in the inertial frame and body-twist Jacobians for every body frame
/// (keyed by body name) and every auxiliary frame.
struct FramePoseSet {
  std::map<std::string, Transform> pose;
  std::map<std::string, Jacobian> jacobian;
  /// Per-body index of the body-frame entries, in topological order.
  std::vector<std::string> body_frame_names;

  const Transform& pose_of(const std::string& frame) const;
  const Jacobian& jacobian_of(const std::string& frame) const;
};

/// One root-to-leaf sweep: poses by chained composition, Jacobians by
/// J_child = Ad(T_child,attach) * J_attach plus the joint's screw column at
/// the driving coordinate (scaled by the coupling derivative for
/// coupled-revolute joints).
FramePoseSet forward_kinematics(const ModelGraph& m, const KinematicState& s);

/// Body-frame kinematics with exact coordinate derivatives of every
/// Jacobian, propagated in the same sweep. jacobian_partial[b][j] is
/// dJ_b/dq_j. This is what the dynamics layer consumes; the
/// finite-difference jacobian_partial below stays as an independent check.
struct BodyKinematics {
  std::vector<Transform> pose;
  std::vector<Jacobian> jacobian;
  std::vector<std::vector<Jacobian>> jacobian_partial;
};

BodyKinematics body_kinematics(const ModelGraph& m, const KinematicState& s);

/// Twist of the named frame: J_frame * qdot.
Twist frame_twist(const ModelGraph& m, const KinematicState& s, const std::string& frame);

/// dJ_frame/dq_j by central finite differences with per-coordinate scaled
/// step (default 1e-6 * max(1, |q_j|); pass step > 0 to override).
Eigen::Matrix<double, 6, Eigen::Dynamic> jacobian_partial(const ModelGraph& m,
                                                          const KinematicState& s,
                                                          const std::string& frame, int j,
                                                          double step = 0.0);

}  // namespace ipdyn
