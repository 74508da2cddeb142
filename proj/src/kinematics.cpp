#include "ipdyn/kinematics.hpp"

#include <cmath>

namespace ipdyn {

void validate_state(const ModelGraph& m, const KinematicState& s) {
  const int n = m.coordinate_count();
  if (s.q.size() != n || s.qdot.size() != n) {
    throw ValidationError("state", "state dimension does not match the model");
  }
  if (!s.q.allFinite() || !s.qdot.allFinite()) {
    throw ValidationError("state", "non-finite state entry");
  }
}

const Transform& FramePoseSet::pose_of(const std::string& frame) const {
  auto it = pose.find(frame);
  if (it == pose.end()) throw UnknownFrameError(frame);
  return it->second;
}

const Jacobian& FramePoseSet::jacobian_of(const std::string& frame) const {
  auto it = jacobian.find(frame);
  if (it == jacobian.end()) throw UnknownFrameError(frame);
  return it->second;
}

namespace {

/// Joint angle/displacement and its derivatives w.r.t. the driving coordinate.
struct JointMap {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

JointMap joint_map(const JointSpec& j, double q) {
  switch (j.kind) {
    case JointKind::Revolute:
    case JointKind::Prismatic:
      return {q, 1.0, 0.0};
    case JointKind::CoupledRevolute: {
      const CouplingValue c = coupling_eval(*j.coupling, q);
      return {c.angle, c.dangle_ddelta, c.d2angle_ddelta2};
    }
  }
  return {};
}

Transform joint_motion(const JointSpec& j, double mapped_value) {
  if (j.kind == JointKind::Prismatic) {
    return {Mat3::Identity(), j.axis * mapped_value};
  }
  return {rot_axis(j.axis, mapped_value), Vec3::Zero()};
}

}  // namespace

BodyKinematics body_kinematics(const ModelGraph& m, const KinematicState& s) {
  validate_state(m, s);
  const int n = m.coordinate_count();
  const int nb = m.body_count();
  BodyKinematics out;
  out.pose.resize(nb);
  out.jacobian.resize(nb);
  out.jacobian_partial.assign(nb, std::vector<Jacobian>(n, Jacobian::Zero(6, n)));

  for (int i = 0; i < nb; ++i) {
    const BodyModule& b = m.bodies[i];
    const int c = b.joint.coordinate;

    Transform attach_pose = b.attachment;
    Jacobian attach_jac = Jacobian::Zero(6, n);
    std::vector<Jacobian> attach_partial(n, Jacobian::Zero(6, n));
    if (b.parent >= 0) {
      attach_pose = compose(out.pose[b.parent], b.attachment);
      const Mat6 pull = adjoint(inverse(b.attachment));
      attach_jac = pull * out.jacobian[b.parent];
      for (int j = 0; j < n; ++j) {
        attach_partial[j] = pull * out.jacobian_partial[b.parent][j];
      }
    }

    const JointMap map = joint_map(b.joint, s.q(c));
    const Transform motion = joint_motion(b.joint, map.value);
    out.pose[i] = compose(attach_pose, motion);

    const Mat6 pull = adjoint(inverse(motion));
    Jacobian jac = pull * attach_jac;
    Vec6 column = Vec6::Zero();
    if (b.joint.kind == JointKind::Prismatic) {
      column.tail<3>() = b.joint.axis;
    } else {
      column.head<3>() = b.joint.axis * map.d1;
    }
    jac.col(c) += column;
    out.jacobian[i] = jac;

    // d/dq_c of Ad(inverse(motion)): rotation-block derivative for revolute
    // kinds, translation-block for prismatic.
    Mat6 pull_dot = Mat6::Zero();
    if (b.joint.kind == JointKind::Prismatic) {
      pull_dot.bottomLeftCorner<3, 3>() = -skew(b.joint.axis);
    } else {
      const Mat3 r = rot_axis(b.joint.axis, -map.value);
      const Mat3 dr = -map.d1 * skew(b.joint.axis) * r;
      pull_dot.topLeftCorner<3, 3>() = dr;
      pull_dot.bottomRightCorner<3, 3>() = dr;
    }

    for (int j = 0; j < n; ++j) {
      Jacobian dj = pull * attach_partial[j];
      if (j == c) {
        dj += pull_dot * attach_jac;
        if (b.joint.kind != JointKind::Prismatic) {
          Vec6 dcolumn = Vec6::Zero();
          dcolumn.head<3>() = b.joint.axis * map.d2;
          dj.col(c) += dcolumn;
        }
      }
      out.jacobian_partial[i][j] = dj;
    }
  }
  return out;
}

FramePoseSet forward_kinematics(const ModelGraph& m, const KinematicState& s) {
  const BodyKinematics bk = body_kinematics(m, s);
  FramePoseSet out;
  for (int i = 0; i < m.body_count(); ++i) {
    const BodyModule& b = m.bodies[i];
    out.pose[b.name] = bk.pose[i];
    out.jacobian[b.name] = bk.jacobian[i];
    out.body_frame_names.push_back(b.name);
    for (const auto& [fname, ft] : b.frames) {
      out.pose[fname] = compose(bk.pose[i], ft);
      out.jacobian[fname] = adjoint(inverse(ft)) * bk.jacobian[i];
    }
  }
  return out;
}

Twist frame_twist(const ModelGraph& m, const KinematicState& s, const std::string& frame) {
  const FramePoseSet fk = forward_kinematics(m, s);
  return Twist::from_vec(fk.jacobian_of(frame) * s.qdot);
}

Eigen::Matrix<double, 6, Eigen::Dynamic> jacobian_partial(const ModelGraph& m,
                                                          const KinematicState& s,
                                                          const std::string& frame, int j,
                                                          double step) {
  if (j < 0 || j >= m.coordinate_count()) {
    throw ValidationError("coordinate", "coordinate index out of range");
  }
  const double h = step > 0.0 ? step : 1e-6 * std::max(1.0, std::abs(s.q(j)));
  KinematicState plus = s;
  KinematicState minus = s;
  plus.q(j) += h;
  minus.q(j) -= h;
  const Jacobian jp = forward_kinematics(m, plus).jacobian_of(frame);
  const Jacobian jm = forward_kinematics(m, minus).jacobian_of(frame);
  return (jp - jm) / (2.0 * h);
}

}  // namespace ipdyn
