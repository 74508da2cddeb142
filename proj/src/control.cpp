#include "ipdyn/control.hpp"

#include <cmath>

namespace ipdyn {

void validate_gains(const Gains& g, int n) {
  if (g.kp.size() != n || g.kv.size() != n) {
    throw ValidationError("gains", "gain dimension does not match the model");
  }
  if (!(g.kp.minCoeff() > 0.0) || !(g.kv.minCoeff() > 0.0)) {
    throw ValidationError("gains", "gains must be strictly positive");
  }
}

void check_reference(const Reference& ref, double t_begin, double t_end, int samples,
                     double tol) {
  const double h = 1e-6 * std::max(1.0, std::abs(t_end - t_begin));
  for (int i = 0; i < samples; ++i) {
    const double t = t_begin + (t_end - t_begin) * (i + 0.5) / samples;
    const ReferencePoint mid = ref.at(t);
    const ReferencePoint plus = ref.at(t + h);
    const ReferencePoint minus = ref.at(t - h);
    const VecX fd_v = (plus.q - minus.q) / (2.0 * h);
    const VecX fd_a = (plus.qdot - minus.qdot) / (2.0 * h);
    const double scale_v = std::max(1.0, mid.qdot.cwiseAbs().maxCoeff());
    const double scale_a = std::max(1.0, mid.qddot.cwiseAbs().maxCoeff());
    if ((fd_v - mid.qdot).cwiseAbs().maxCoeff() > tol * scale_v ||
        (fd_a - mid.qddot).cwiseAbs().maxCoeff() > tol * scale_a) {
      throw ValidationError("reference", "supplied derivatives disagree with finite differences");
    }
  }
}

TrackingError tracking_error(const KinematicState& s, const ReferencePoint& ref) {
  return {s.q - ref.q, s.qdot - ref.qdot};
}

namespace {

struct LawTerms {
  MatX inertia;
  MatX rate;
  VecX grad_desired;  // j-th entry: qdot_d^T (dG/dq_j) qdot_d
  VecX external;
};

LawTerms law_terms(const ModelGraph& m, const KinematicState& s, const ReferencePoint& ref,
                   const std::vector<std::pair<std::string, Wrench>>& wrenches) {
  LawTerms t;
  const int n = m.coordinate_count();
  t.inertia = system_inertia(m, s);
  const std::vector<MatX> partials = system_inertia_partials(m, s);
  t.rate = MatX::Zero(n, n);
  t.grad_desired = VecX::Zero(n);
  for (int j = 0; j < n; ++j) {
    t.rate += partials[j] * s.qdot(j);
    t.grad_desired(j) = ref.qdot.dot(partials[j] * ref.qdot);
  }
  t.external = gravity_force(m, s);
  if (!wrenches.empty()) t.external += applied_wrench_force(m, s, wrenches);
  return t;
}

}  // namespace

VecX control_force(const ModelGraph& m, const KinematicState& s, const ReferencePoint& ref,
                   const Gains& g,
                   const std::vector<std::pair<std::string, Wrench>>& external_wrenches) {
  validate_state(m, s);
  const LawTerms t = law_terms(m, s, ref, external_wrenches);
  const TrackingError err = tracking_error(s, ref);
  return t.inertia * ref.qddot + t.rate * ref.qdot - 0.5 * t.grad_desired - t.external -
         g.kp.cwiseProduct(err.e) - g.kv.cwiseProduct(err.e_dot);
}

double coordinate_control_force(const ModelGraph& m, const KinematicState& s,
                                const ReferencePoint& ref, const Gains& g, int j,
                                const std::vector<std::pair<std::string, Wrench>>&
                                    external_wrenches) {
  validate_state(m, s);
  if (j < 0 || j >= m.coordinate_count()) {
    throw ValidationError("coordinate", "coordinate index out of range");
  }
  const LawTerms t = law_terms(m, s, ref, external_wrenches);
  const TrackingError err = tracking_error(s, ref);
  // Model-based piece for this coordinate alone, then its own PD correction.
  const double model_part = t.inertia.row(j).dot(ref.qddot) + t.rate.row(j).dot(ref.qdot) -
                            0.5 * t.grad_desired(j) - t.external(j);
  const double correction = -g.kp(j) * err.e(j) - g.kv(j) * err.e_dot(j);
  return model_part + correction;
}

double lyapunov_value(const ModelGraph& m, const KinematicState& s, const ReferencePoint& ref,
                      const Gains& g) {
  const TrackingError err = tracking_error(s, ref);
  const MatX inertia = system_inertia(m, s);
  return 0.5 * err.e_dot.dot(inertia * err.e_dot) + 0.5 * err.e.dot(g.kp.cwiseProduct(err.e));
}

double lyapunov_rate(const KinematicState& s, const ReferencePoint& ref, const Gains& g) {
  const VecX e_dot = s.qdot - ref.qdot;
  return -e_dot.dot(g.kv.cwiseProduct(e_dot));
}

}  // namespace ipdyn
