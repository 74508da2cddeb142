#include "ipdyn/sweep.hpp"

#include <algorithm>
#include <cmath>

namespace ipdyn::sweep {

namespace {

/// splitmix64: tiny, stateless-friendly, identical everywhere.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
};

SpatialInertiaParams params_in_frame(const SpatialInertiaParams& p, const Transform& body_to_frame) {
  SpatialInertiaParams out;
  out.mass = p.mass;
  const Transform frame_to_body = inverse(body_to_frame);
  out.com_offset = frame_to_body.rotation * p.com_offset + frame_to_body.translation;
  out.inertia_about_com =
      frame_to_body.rotation * p.inertia_about_com * frame_to_body.rotation.transpose();
  return out;
}

double potential_energy(const ModelGraph& m, const VecX& q) {
  KinematicState s{q, VecX::Zero(q.size())};
  const FramePoseSet fk = forward_kinematics(m, s);
  double u = 0.0;
  for (const auto& b : m.bodies) {
    if (b.inertia.mass == 0.0) continue;
    const Transform pose = fk.pose_of(b.name);
    const Vec3 com_world = pose.rotation * b.inertia.com_offset + pose.translation;
    u -= b.inertia.mass * m.gravity.dot(com_world);
  }
  return u;
}

}  // namespace

std::vector<KinematicState> sample_states(const ModelGraph& m, int count, std::uint64_t seed,
                                          double qdot_scale) {
  const int n = m.coordinate_count();
  std::vector<KinematicState> states;
  states.reserve(count);
  Rng rng(seed);
  for (int k = 0; k < count; ++k) {
    KinematicState s = KinematicState::zero(n);
    for (int j = 0; j < n; ++j) {
      const auto [lo, hi] = m.coordinate_interval(j);
      if (std::isfinite(lo) && std::isfinite(hi)) {
        const double margin = 0.1 * (hi - lo);
        s.q(j) = rng.uniform(lo + margin, hi - margin);
      } else if (m.coordinates[j].unit == "m") {
        s.q(j) = rng.uniform(-1.0, 1.0);
      } else {
        s.q(j) = rng.uniform(-M_PI, M_PI);
      }
      s.qdot(j) = rng.uniform(-qdot_scale, qdot_scale);
    }
    states.push_back(std::move(s));
  }
  return states;
}

StateChecks evaluate_state(const ModelGraph& m, const KinematicState& s) {
  StateChecks c;
  const int n = m.coordinate_count();
  const FramePoseSet fk = forward_kinematics(m, s);

  // Inertia spectrum, energy identity, frame invariance.
  const std::vector<MatX> contributions = body_inertia_contributions(m, s);
  MatX inertia = MatX::Zero(n, n);
  for (const MatX& gi : contributions) inertia += gi;
  c.inertia_min_eig =
      Eigen::SelfAdjointEigenSolver<MatX>(inertia, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  c.kinetic_energy = 0.5 * s.qdot.dot(inertia * s.qdot);

  double body_energy = 0.0;
  for (size_t i = 0; i < m.bodies.size(); ++i) {
    const BodyModule& b = m.bodies[i];
    const Vec6 twist = fk.jacobian_of(b.name) * s.qdot;
    body_energy += 0.5 * twist.dot(spatial_inertia(b.inertia) * twist);
    for (const auto& [fname, ft] : b.frames) {
      const MatX alt = generalized_inertia(spatial_inertia(params_in_frame(b.inertia, ft)),
                                           fk.jacobian_of(fname));
      c.frame_invariance =
          std::max(c.frame_invariance, (alt - contributions[i]).cwiseAbs().maxCoeff());
    }
  }
  c.energy_defect = std::abs(c.kinetic_energy - body_energy);

  // Passivity structure.
  const MatX rate = system_inertia_rate(m, s);
  const MatX coriolis = coriolis_matrix(m, s);
  const MatX skew = rate - 2.0 * coriolis;
  c.skew_defect = (0.5 * (skew + skew.transpose())).cwiseAbs().maxCoeff();
  c.gdot_norm = rate.cwiseAbs().maxCoeff();
  VecX grad(n);
  const std::vector<MatX> partials = system_inertia_partials(m, s);
  for (int j = 0; j < n; ++j) {
    grad(j) = s.qdot.dot(partials[j] * s.qdot);
    const MatX fd = system_inertia_partial_fd(m, s, j);
    c.partial_fd_defect = std::max(
        c.partial_fd_defect,
        (fd - partials[j]).cwiseAbs().maxCoeff() /
            std::max(1.0, partials[j].cwiseAbs().maxCoeff()));
  }
  const VecX identity_diff = coriolis * s.qdot - (rate * s.qdot - 0.5 * grad);
  c.coriolis_identity = identity_diff.cwiseAbs().maxCoeff();
  c.coriolis_scale = (rate * s.qdot).cwiseAbs().maxCoeff();

  // Gravity vs potential-energy gradient.
  const VecX gravity = gravity_force(m, s);
  VecX gravity_fd(n);
  for (int j = 0; j < n; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(s.q(j)));
    VecX qp = s.q, qm = s.q;
    qp(j) += h;
    qm(j) -= h;
    gravity_fd(j) = -(potential_energy(m, qp) - potential_energy(m, qm)) / (2.0 * h);
  }
  c.gravity_defect =
      (gravity - gravity_fd).cwiseAbs().maxCoeff() / std::max(1.0, gravity.cwiseAbs().maxCoeff());

  // Twist vs finite-difference pose derivative, per body frame.
  const double ht = 1e-6 / std::max(1.0, s.qdot.cwiseAbs().maxCoeff());
  KinematicState sp{s.q + ht * s.qdot, s.qdot};
  KinematicState sm{s.q - ht * s.qdot, s.qdot};
  const FramePoseSet fkp = forward_kinematics(m, sp);
  const FramePoseSet fkm = forward_kinematics(m, sm);
  for (const auto& b : m.bodies) {
    const Mat4 t_dot = (fkp.pose_of(b.name).embed() - fkm.pose_of(b.name).embed()) / (2.0 * ht);
    const Vec6 fd = body_twist_from_derivative(fk.pose_of(b.name), t_dot, 1e-6).vec();
    const Vec6 an = fk.jacobian_of(b.name) * s.qdot;
    c.twist_defect = std::max(
        c.twist_defect, (fd - an).cwiseAbs().maxCoeff() / std::max(1.0, an.cwiseAbs().maxCoeff()));
  }
  return c;
}

std::vector<StateChecks> run_checks(const ModelGraph& m,
                                    const std::vector<KinematicState>& states) {
  std::vector<StateChecks> out(states.size());
  const int count = static_cast<int>(states.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < count; ++i) {
    out[i] = evaluate_state(m, states[i]);
  }
  return out;
}

std::vector<StateChecks> run_checks_serial(const ModelGraph& m,
                                           const std::vector<KinematicState>& states) {
  std::vector<StateChecks> out(states.size());
  for (size_t i = 0; i < states.size(); ++i) {
    out[i] = evaluate_state(m, states[i]);
  }
  return out;
}

std::vector<double> run_inertia_spectrum(const ModelGraph& m,
                                         const std::vector<KinematicState>& states) {
  std::vector<double> out(states.size());
  const int count = static_cast<int>(states.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    out[i] = Eigen::SelfAdjointEigenSolver<MatX>(system_inertia(m, states[i]),
                                                 Eigen::EigenvaluesOnly)
                 .eigenvalues()
                 .minCoeff();
  }
  return out;
}

std::vector<double> run_inertia_spectrum_serial(const ModelGraph& m,
                                                const std::vector<KinematicState>& states) {
  std::vector<double> out(states.size());
  for (size_t i = 0; i < states.size(); ++i) {
    out[i] = Eigen::SelfAdjointEigenSolver<MatX>(system_inertia(m, states[i]),
                                                 Eigen::EigenvaluesOnly)
                 .eigenvalues()
                 .minCoeff();
  }
  return out;
}

StateChecks worst_case(const std::vector<StateChecks>& checks) {
  StateChecks w;
  w.inertia_min_eig = std::numeric_limits<double>::infinity();
  for (const StateChecks& c : checks) {
    w.inertia_min_eig = std::min(w.inertia_min_eig, c.inertia_min_eig);
    w.kinetic_energy = std::max(w.kinetic_energy, c.kinetic_energy);
    w.energy_defect = std::max(w.energy_defect, c.energy_defect);
    w.frame_invariance = std::max(w.frame_invariance, c.frame_invariance);
    w.skew_defect = std::max(w.skew_defect, c.skew_defect);
    w.gdot_norm = std::max(w.gdot_norm, c.gdot_norm);
    w.coriolis_identity = std::max(w.coriolis_identity, c.coriolis_identity);
    w.coriolis_scale = std::max(w.coriolis_scale, c.coriolis_scale);
    w.gravity_defect = std::max(w.gravity_defect, c.gravity_defect);
    w.twist_defect = std::max(w.twist_defect, c.twist_defect);
    w.partial_fd_defect = std::max(w.partial_fd_defect, c.partial_fd_defect);
  }
  return w;
}

}  // namespace ipdyn::sweep
