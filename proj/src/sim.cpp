#include "ipdyn/sim.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace ipdyn {

double kinetic_energy(const ModelGraph& m, const KinematicState& s) {
  return 0.5 * s.qdot.dot(system_inertia(m, s) * s.qdot);
}

namespace {

struct ManipulatorLayout {
  int phi = -1, theta = -1, delta = -1;
  double link_length = 0.0;
  CouplingFunction coupling;
};

ManipulatorLayout manipulator_layout(const ModelGraph& m) {
  ManipulatorLayout lay;
  if (m.coordinate_count() != 3 || m.body_count() != 3) {
    throw ValidationError("model", "end-effector map requires the 3-DoF manipulator layout");
  }
  const BodyModule& last = m.bodies.back();
  if (!last.joint.coupling) {
    throw ValidationError("model", "end-effector map requires a coupled final joint");
  }
  lay.coupling = *last.joint.coupling;
  lay.phi = m.bodies[0].joint.coordinate;
  lay.theta = m.bodies[1].joint.coordinate;
  lay.delta = last.joint.coordinate;
  auto it = last.frames.find("F3");
  if (it == last.frames.end()) {
    throw ValidationError("model", "end-effector map requires frame F3 on the last body");
  }
  lay.link_length = it->second.translation.norm();
  return lay;
}

}  // namespace

Vec3 end_effector_position(const ModelGraph& m, const VecX& q) {
  const ManipulatorLayout lay = manipulator_layout(m);
  const double phi = q(lay.phi);
  const double theta = q(lay.theta);
  const double zeta = coupling_eval(lay.coupling, q(lay.delta)).angle;
  const double radial = std::cos(theta) + std::cos(theta - zeta);
  const double l = lay.link_length;
  return {l * std::cos(phi) * radial, l * std::sin(phi) * radial,
          l * (std::sin(theta) + std::sin(theta - zeta))};
}

Reference make_reference_paperlike(const ModelGraph& m, double duration) {
  if (duration <= 0.0) throw ValidationError("reference", "duration must be positive");
  if (m.coordinate_count() != 3) {
    throw ValidationError("reference", "paper-like reference requires 3 coordinates");
  }
  const VecX q0 = (VecX(3) << 0.0, 0.3, 0.05).finished();
  const VecX amp = (VecX(3) << 0.4, 0.2, 0.05).finished();
  const double omega = 2.0 * M_PI / duration;

  // The coupled coordinate must stay strictly inside its feasible interval
  // over the whole horizon, with a margin against the singular ends.
  for (int j = 0; j < 3; ++j) {
    const auto [lo, hi] = m.coordinate_interval(j);
    const double jmin = std::min(q0(j), q0(j) + 2.0 * amp(j));
    const double jmax = std::max(q0(j), q0(j) + 2.0 * amp(j));
    const double margin = 0.02 * (hi - lo);
    if (std::isfinite(lo) && (jmin < lo + margin || jmax > hi - margin)) {
      throw ValidationError("reference", "reference exits the feasible coupling interval");
    }
  }

  Reference ref;
  ref.at = [q0, amp, omega](double t) {
    ReferencePoint p;
    p.q = q0 + amp * (1.0 - std::cos(omega * t));
    p.qdot = amp * omega * std::sin(omega * t);
    p.qddot = amp * omega * omega * std::cos(omega * t);
    return p;
  };
  return ref;
}

Reference make_reference_setpoint(const VecX& q_setpoint) {
  Reference ref;
  const VecX zero = VecX::Zero(q_setpoint.size());
  ref.at = [q_setpoint, zero](double) {
    return ReferencePoint{q_setpoint, zero, zero};
  };
  return ref;
}

namespace {

VecX state_derivative(const ModelGraph& m, const SimConfig& cfg, double t, const VecX& x) {
  const int n = m.coordinate_count();
  KinematicState s{x.head(n), x.tail(n)};
  VecX total = gravity_force(m, s);
  if (!cfg.external_wrenches.empty()) {
    total += applied_wrench_force(m, s, cfg.external_wrenches);
  }
  if (cfg.control_enabled) {
    total += control_force(m, s, cfg.reference.at(t), cfg.gains, cfg.external_wrenches);
  }
  const VecX qddot = forward_dynamics(m, s, total);
  VecX dx(2 * n);
  dx << s.qdot, qddot;
  return dx;
}

TrajectoryRow make_row(const ModelGraph& m, const SimConfig& cfg, double t, const VecX& x,
                       bool has_ee_map) {
  const int n = m.coordinate_count();
  TrajectoryRow row;
  row.t = t;
  row.q = x.head(n);
  row.qdot = x.tail(n);
  const ReferencePoint ref = cfg.reference.at(t);
  row.q_des = ref.q;
  row.qdot_des = ref.qdot;
  row.error = row.q - ref.q;
  KinematicState s{row.q, row.qdot};
  row.lyapunov = lyapunov_value(m, s, ref, cfg.gains);
  row.actuator_force = cfg.control_enabled
                           ? control_force(m, s, ref, cfg.gains, cfg.external_wrenches)
                           : VecX::Zero(n);
  if (has_ee_map) {
    row.ee = end_effector_position(m, row.q);
    row.ee_des = end_effector_position(m, ref.q);
  }
  return row;
}

}  // namespace

SimResult simulate(const ModelGraph& m, const SimConfig& cfg_in) {
  const int n = m.coordinate_count();
  SimConfig cfg = cfg_in;
  if (!(cfg.dt > 0.0)) throw ValidationError("dt", "dt must be positive");
  if (cfg.dt > cfg.duration) throw ValidationError("dt", "dt must not exceed duration");
  if (!cfg.reference.at) throw ValidationError("reference", "missing reference");
  if (cfg.control_enabled) {
    validate_gains(cfg.gains, n);
  } else if (cfg.gains.kp.size() != n || cfg.gains.kv.size() != n) {
    cfg.gains = Gains{VecX::Zero(n), VecX::Zero(n)};
  }

  bool has_ee_map = true;
  try {
    manipulator_layout(m);
  } catch (const ValidationError&) {
    has_ee_map = false;
  }

  VecX x(2 * n);
  const ReferencePoint start = cfg.reference.at(0.0);
  x.head(n) = cfg.q0.size() == n ? cfg.q0 : start.q;
  x.tail(n) = cfg.qdot0.size() == n ? cfg.qdot0 : start.qdot;

  SimResult result;
  result.trajectory.coordinate_count = n;
  const long steps = std::lround(cfg.duration / cfg.dt);
  result.trajectory.rows.reserve(steps + 1);

  double t = 0.0;
  for (long k = 0; k <= steps; ++k) {
    t = k * cfg.dt;
    try {
      result.trajectory.rows.push_back(make_row(m, cfg, t, x, has_ee_map));
    } catch (const Error& e) {
      result.abort_reason = e.what();
      return result;
    }
    result.last_good_time = t;
    if (k == steps) break;

    const double h = cfg.dt;
    try {
      const VecX k1 = state_derivative(m, cfg, t, x);
      const VecX k2 = state_derivative(m, cfg, t + 0.5 * h, x + 0.5 * h * k1);
      const VecX k3 = state_derivative(m, cfg, t + 0.5 * h, x + 0.5 * h * k2);
      const VecX k4 = state_derivative(m, cfg, t + h, x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const Error& e) {
      result.abort_reason = e.what();
      return result;
    }
    if (!x.allFinite()) {
      result.abort_reason = "state became non-finite";
      return result;
    }
  }
  result.completed = true;
  return result;
}

RmseReport compute_rmse(const Trajectory& traj) {
  if (traj.rows.empty()) throw ValidationError("trajectory", "empty trajectory");
  const int n = traj.coordinate_count;
  RmseReport r;
  r.coordinate_rmse = VecX::Zero(n);
  Vec3 sq = Vec3::Zero();
  VecX sq_coord = VecX::Zero(n);
  for (const TrajectoryRow& row : traj.rows) {
    const Vec3 d = row.ee - row.ee_des;
    sq += d.cwiseProduct(d);
    r.max_abs_cartesian = std::max(r.max_abs_cartesian, d.cwiseAbs().maxCoeff());
    const VecX e = row.error;
    sq_coord += e.cwiseProduct(e);
    r.max_abs_coordinate = std::max(r.max_abs_coordinate, e.cwiseAbs().maxCoeff());
  }
  const double count = static_cast<double>(traj.rows.size());
  r.cartesian_rmse = (sq / count).cwiseSqrt();
  r.coordinate_rmse = (sq_coord / count).cwiseSqrt();
  return r;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc()) throw ParseError("bad number in CSV: " + std::string(text));
  return v;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  const int n = traj.coordinate_count;
  std::string out = "t";
  auto cols = [&](const std::string& stem) {
    for (int i = 1; i <= n; ++i) out += "," + stem + std::to_string(i);
  };
  cols("q");
  cols("qd");
  cols("e");
  out += ",x,y,z,xd,yd,zd,V";
  cols("Qa");
  out += "\n";
  for (const TrajectoryRow& row : traj.rows) {
    append_number(out, row.t);
    auto vec = [&](const VecX& v) {
      for (int i = 0; i < v.size(); ++i) {
        out += ',';
        append_number(out, v(i));
      }
    };
    vec(row.q);
    vec(row.q_des);
    vec(row.error);
    vec(row.ee);
    vec(row.ee_des);
    out += ',';
    append_number(out, row.lyapunov);
    vec(row.actuator_force);
    out += '\n';
  }
  return out;
}

Trajectory trajectory_from_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV");
  // Column count 1 + 3n + 6 + 1 + n = 4n + 8 fixes n.
  int columns = 1;
  for (char c : line) {
    if (c == ',') ++columns;
  }
  if ((columns - 8) % 4 != 0 || columns < 12) throw ParseError("unrecognized CSV header");
  const int n = (columns - 8) / 4;

  Trajectory traj;
  traj.coordinate_count = n;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    vals.reserve(columns);
    size_t start = 0;
    while (start <= line.size()) {
      size_t comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      vals.push_back(parse_double(std::string_view(line).substr(start, comma - start)));
      start = comma + 1;
    }
    if (static_cast<int>(vals.size()) != columns) throw ParseError("ragged CSV row");
    TrajectoryRow row;
    int k = 0;
    row.t = vals[k++];
    auto take = [&](int count) {
      VecX v(count);
      for (int i = 0; i < count; ++i) v(i) = vals[k++];
      return v;
    };
    row.q = take(n);
    row.q_des = take(n);
    row.error = take(n);
    row.ee = Vec3(vals[k], vals[k + 1], vals[k + 2]);
    k += 3;
    row.ee_des = Vec3(vals[k], vals[k + 1], vals[k + 2]);
    k += 3;
    row.lyapunov = vals[k++];
    row.actuator_force = take(n);
    row.qdot = VecX::Zero(n);      // not stored in the CSV contract
    row.qdot_des = VecX::Zero(n);
    traj.rows.push_back(std::move(row));
  }
  return traj;
}

std::string rmse_text(const RmseReport& r) {
  std::string out;
  auto kv = [&](const std::string& key, double v) {
    out += key + "=";
    append_number(out, v);
    out += "\n";
  };
  kv("rmse_x", r.cartesian_rmse(0));
  kv("rmse_y", r.cartesian_rmse(1));
  kv("rmse_z", r.cartesian_rmse(2));
  for (int i = 0; i < r.coordinate_rmse.size(); ++i) {
    kv("rmse_q" + std::to_string(i + 1), r.coordinate_rmse(i));
  }
  kv("max_abs_cartesian", r.max_abs_cartesian);
  kv("max_abs_coordinate", r.max_abs_coordinate);
  return out;
}

std::string rmse_json(const RmseReport& r) {
  nlohmann::json j;
  j["cartesian_rmse"] = {r.cartesian_rmse(0), r.cartesian_rmse(1), r.cartesian_rmse(2)};
  j["coordinate_rmse"] = std::vector<double>(r.coordinate_rmse.data(),
                                             r.coordinate_rmse.data() + r.coordinate_rmse.size());
  j["max_abs_cartesian"] = r.max_abs_cartesian;
  j["max_abs_coordinate"] = r.max_abs_coordinate;
  return j.dump(2);
}

}  // namespace ipdyn
