#pragma once

#include <utility>
#include <vector>

#include "ipdyn/kinematics.hpp"

namespace ipdyn {

/// 6x6 spatial inertia about the body frame:
///   [ I_C + m [p][p]^T   m [p] ]
///   [      -m [p]        m I_3 ]
/// with p the body-frame -> COM offset. Symmetric, PD for mass > 0.
Mat6 spatial_inertia(const SpatialInertiaParams& p);

/// Local generalized inertia of one body: J^T M J (n x n, symmetric PSD).
MatX generalized_inertia(const Mat6& spatial, const Jacobian& jac);

/// Per-body generalized inertia contributions at this state, topological order.
std::vector<MatX> body_inertia_contributions(const ModelGraph& m, const KinematicState& s);

/// Global generalized inertia: the sum of the per-body contributions, in
/// topological order.
MatX system_inertia(const ModelGraph& m, const KinematicState& s);

/// Exact coordinate partials of the generalized inertia, assembled from the
/// propagated Jacobian derivatives:
///   dG/dq_j = sum_b (dJ_b^T M_b J_b + J_b^T M_b dJ_b).
/// Symmetrized against rounding. The dynamics, Coriolis and control paths
/// all run on these.
std::vector<MatX> system_inertia_partials(const ModelGraph& m, const KinematicState& s);

/// Difference-based d(system inertia)/dq_j, symmetrized central stencil with
/// step 1e-6 * max(1, |q_j|) unless overridden. Kept as an independent
/// diagnostic against the analytic partials.
MatX system_inertia_partial_fd(const ModelGraph& m, const KinematicState& s, int j,
                               double step = 0.0);

/// Time derivative of the generalized inertia along qdot (chain rule over
/// the coordinate partials).
MatX system_inertia_rate(const ModelGraph& m, const KinematicState& s);

/// Coriolis matrix from the Christoffel symbols of the inertia partials:
///   C_kj = 1/2 sum_i (dG_kj/dq_i + dG_ki/dq_j - dG_ij/dq_k) qdot_i.
/// This choice makes (dG/dt - 2C) skew-symmetric.
MatX coriolis_matrix(const ModelGraph& m, const KinematicState& s);

/// Generalized force of gravity: each body's weight enters as a wrench at
/// its COM frame, rotated into body axes and pulled back through that
/// frame's Jacobian.
VecX gravity_force(const ModelGraph& m, const KinematicState& s);

/// Generalized force of external wrenches, each expressed in its
/// application frame: sum of J_frame^T * wrench.
VecX applied_wrench_force(const ModelGraph& m, const KinematicState& s,
                          const std::vector<std::pair<std::string, Wrench>>& wrenches);

/// Total generalized force required to realize qddot at this state:
///   Q = G qddot + Gdot qdot - 1/2 grad_q(qdot^T G qdot).
VecX inverse_dynamics(const ModelGraph& m, const KinematicState& s, const VecX& qddot);

/// Accelerations from the total generalized force, via an SPD (LLT)
/// factorization of G. Throws NearSingularError (with a min-eigenvalue
/// estimate) if the factorization fails.
VecX forward_dynamics(const ModelGraph& m, const KinematicState& s, const VecX& total_force);

}  // namespace ipdyn
