#include "ipdyn/dynamics.hpp"

#include <cmath>

namespace ipdyn {

Mat6 spatial_inertia(const SpatialInertiaParams& p) {
  Mat6 m = Mat6::Zero();
  const Mat3 px = skew(p.com_offset);
  // [p][p]^T written as |p|^2 I - p p^T keeps the block bitwise symmetric.
  const Vec3& c = p.com_offset;
  m.topLeftCorner<3, 3>() =
      p.inertia_about_com + p.mass * (c.squaredNorm() * Mat3::Identity() - c * c.transpose());
  m.topRightCorner<3, 3>() = p.mass * px;
  m.bottomLeftCorner<3, 3>() = -p.mass * px;
  m.bottomRightCorner<3, 3>() = p.mass * Mat3::Identity();
  return m;
}

MatX generalized_inertia(const Mat6& spatial, const Jacobian& jac) {
  return jac.transpose() * spatial * jac;
}

std::vector<MatX> body_inertia_contributions(const ModelGraph& m, const KinematicState& s) {
  const BodyKinematics bk = body_kinematics(m, s);
  std::vector<MatX> out;
  out.reserve(m.body_count());
  for (int i = 0; i < m.body_count(); ++i) {
    out.push_back(generalized_inertia(spatial_inertia(m.bodies[i].inertia), bk.jacobian[i]));
  }
  return out;
}

MatX system_inertia(const ModelGraph& m, const KinematicState& s) {
  const int n = m.coordinate_count();
  MatX total = MatX::Zero(n, n);
  for (const MatX& gi : body_inertia_contributions(m, s)) total += gi;
  return total;
}

namespace {

std::vector<MatX> partials_from(const ModelGraph& m, const BodyKinematics& bk) {
  const int n = m.coordinate_count();
  std::vector<MatX> partials(n, MatX::Zero(n, n));
  for (int i = 0; i < m.body_count(); ++i) {
    const Mat6 spatial = spatial_inertia(m.bodies[i].inertia);
    if (spatial.cwiseAbs().maxCoeff() == 0.0) continue;
    const Jacobian& jac = bk.jacobian[i];
    for (int j = 0; j < n; ++j) {
      const MatX cross = bk.jacobian_partial[i][j].transpose() * spatial * jac;
      partials[j] += cross + cross.transpose();
    }
  }
  for (int j = 0; j < n; ++j) partials[j] = 0.5 * (partials[j] + partials[j].transpose());
  return partials;
}

/// Everything the equations of motion need at one state, in one sweep.
struct Terms {
  MatX inertia;
  MatX rate;
  VecX grad;  // j-th entry: qdot^T (dG/dq_j) qdot
};

Terms eom_terms(const ModelGraph& m, const KinematicState& s) {
  const int n = m.coordinate_count();
  const BodyKinematics bk = body_kinematics(m, s);
  Terms t;
  t.inertia = MatX::Zero(n, n);
  for (int i = 0; i < m.body_count(); ++i) {
    t.inertia += generalized_inertia(spatial_inertia(m.bodies[i].inertia), bk.jacobian[i]);
  }
  const std::vector<MatX> partials = partials_from(m, bk);
  t.rate = MatX::Zero(n, n);
  t.grad = VecX::Zero(n);
  for (int j = 0; j < n; ++j) {
    t.rate += partials[j] * s.qdot(j);
    t.grad(j) = s.qdot.dot(partials[j] * s.qdot);
  }
  return t;
}

}  // namespace

std::vector<MatX> system_inertia_partials(const ModelGraph& m, const KinematicState& s) {
  return partials_from(m, body_kinematics(m, s));
}

MatX system_inertia_partial_fd(const ModelGraph& m, const KinematicState& s, int j,
                               double step) {
  if (j < 0 || j >= m.coordinate_count()) {
    throw ValidationError("coordinate", "coordinate index out of range");
  }
  const double h = step > 0.0 ? step : 1e-6 * std::max(1.0, std::abs(s.q(j)));
  KinematicState plus = s;
  KinematicState minus = s;
  plus.q(j) += h;
  minus.q(j) -= h;
  MatX d = (system_inertia(m, plus) - system_inertia(m, minus)) / (2.0 * h);
  return 0.5 * (d + d.transpose());
}

MatX system_inertia_rate(const ModelGraph& m, const KinematicState& s) {
  const int n = m.coordinate_count();
  MatX rate = MatX::Zero(n, n);
  const std::vector<MatX> partials = system_inertia_partials(m, s);
  for (int j = 0; j < n; ++j) rate += partials[j] * s.qdot(j);
  return rate;
}

MatX coriolis_matrix(const ModelGraph& m, const KinematicState& s) {
  const int n = m.coordinate_count();
  const std::vector<MatX> g = system_inertia_partials(m, s);
  MatX c = MatX::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int i = 0; i < n; ++i) {
        v += (g[i](k, j) + g[j](k, i) - g[k](i, j)) * s.qdot(i);
      }
      c(k, j) = 0.5 * v;
    }
  }
  return c;
}

VecX gravity_force(const ModelGraph& m, const KinematicState& s) {
  const BodyKinematics bk = body_kinematics(m, s);
  const int n = m.coordinate_count();
  VecX q = VecX::Zero(n);
  for (int i = 0; i < m.body_count(); ++i) {
    const BodyModule& b = m.bodies[i];
    if (b.inertia.mass == 0.0) continue;
    // COM frame: body orientation, origin at the COM.
    const Transform body_to_com{Mat3::Identity(), b.inertia.com_offset};
    const Transform com_pose = compose(bk.pose[i], body_to_com);
    const Jacobian jac_com = adjoint(inverse(body_to_com)) * bk.jacobian[i];
    Wrench w;
    w.force = com_pose.rotation.transpose() * (b.inertia.mass * m.gravity);
    q += jac_com.transpose() * w.vec();
  }
  return q;
}

VecX applied_wrench_force(const ModelGraph& m, const KinematicState& s,
                          const std::vector<std::pair<std::string, Wrench>>& wrenches) {
  const FramePoseSet fk = forward_kinematics(m, s);
  VecX q = VecX::Zero(m.coordinate_count());
  for (const auto& [frame, w] : wrenches) {
    q += fk.jacobian_of(frame).transpose() * w.vec();
  }
  return q;
}

VecX inverse_dynamics(const ModelGraph& m, const KinematicState& s, const VecX& qddot) {
  if (qddot.size() != m.coordinate_count()) {
    throw ValidationError("qddot", "dimension does not match the model");
  }
  const Terms t = eom_terms(m, s);
  return t.inertia * qddot + t.rate * s.qdot - 0.5 * t.grad;
}

VecX forward_dynamics(const ModelGraph& m, const KinematicState& s, const VecX& total_force) {
  if (total_force.size() != m.coordinate_count()) {
    throw ValidationError("force", "dimension does not match the model");
  }
  const Terms t = eom_terms(m, s);
  const VecX rhs = total_force - t.rate * s.qdot + 0.5 * t.grad;

  Eigen::LLT<MatX> llt(t.inertia);
  if (llt.info() != Eigen::Success) {
    const double min_eig =
        Eigen::SelfAdjointEigenSolver<MatX>(t.inertia, Eigen::EigenvaluesOnly)
            .eigenvalues()
            .minCoeff();
    throw NearSingularError(min_eig);
  }
  return llt.solve(rhs);
}

}  // namespace ipdyn
