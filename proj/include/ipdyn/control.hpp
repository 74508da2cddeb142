#pragma once

#include <functional>

#include "ipdyn/dynamics.hpp"

namespace ipdyn {

/// Diagonal PD gains, one pair per coordinate. Strict positivity is what
/// the stability argument needs; validate_gains enforces it where a
/// closed loop is actually run.
struct Gains {
  VecX kp;
  VecX kv;

  static Gains uniform(int n, double kp_value, double kv_value) {
    return {VecX::Constant(n, kp_value), VecX::Constant(n, kv_value)};
  }
};

void validate_gains(const Gains& g, int n);

/// Reference sample at one instant.
struct ReferencePoint {
  VecX q;
  VecX qdot;
  VecX qddot;
};

/// Smooth reference trajectory; qdot/qddot must be the exact derivatives
/// of q (check_reference verifies by finite differences).
struct Reference {
  std::function<ReferencePoint(double)> at;
};

/// FD-checks the supplied derivatives at sample times; throws
/// ValidationError if they disagree beyond tol.
void check_reference(const Reference& ref, double t_begin, double t_end, int samples,
                     double tol = 1e-6);

/// Tracking error e = q - q_d and its rate.
struct TrackingError {
  VecX e;
  VecX e_dot;
};

TrackingError tracking_error(const KinematicState& s, const ReferencePoint& ref);

/// Actuator force of the tracking law: inertia feedforward along the
/// reference (inertia and its derivatives sampled at the actual q),
/// cancellation of gravity and configured external wrenches, and diagonal
/// PD correction:
///   Q_a = G qddot_d + Gdot qdot_d - 1/2 grad_q(qdot_d^T G qdot_d)
///         - Q_e - Kp e - Kv edot.
VecX control_force(const ModelGraph& m, const KinematicState& s, const ReferencePoint& ref,
                   const Gains& g,
                   const std::vector<std::pair<std::string, Wrench>>& external_wrenches = {});

/// The j-th coordinate's control force assembled from its own per-coordinate
/// pieces; equals row j of control_force.
double coordinate_control_force(const ModelGraph& m, const KinematicState& s,
                                const ReferencePoint& ref, const Gains& g, int j,
                                const std::vector<std::pair<std::string, Wrench>>&
                                    external_wrenches = {});

/// Lyapunov candidate V = 1/2 edot^T G edot + 1/2 e^T Kp e, >= 0.
double lyapunov_value(const ModelGraph& m, const KinematicState& s, const ReferencePoint& ref,
                      const Gains& g);

/// Closed-loop Lyapunov rate -edot^T Kv edot, <= 0.
double lyapunov_rate(const KinematicState& s, const ReferencePoint& ref, const Gains& g);

}  // namespace ipdyn
