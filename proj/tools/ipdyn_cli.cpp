// ipdyn command line: validate models, run closed-loop simulations, dump
// dynamics matrices, recompute tracking metrics.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ipdyn/sim.hpp"
#include "ipdyn/sweep.hpp"

namespace fs = std::filesystem;
using namespace ipdyn;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error("cannot write file: " + path.string());
}

ModelGraph resolve_model(const std::string& model_path, const std::string& builtin) {
  if (!builtin.empty()) {
    if (builtin == "manipulator3dof") return builtin_manipulator3dof();
    throw ValidationError("builtin", "unknown builtin model: " + builtin);
  }
  if (model_path.empty()) {
    throw ValidationError("model", "either --model or --builtin is required");
  }
  return load_model(read_file(model_path));
}

VecX parse_list(const std::string& text, int n, const std::string& flag) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(flag, "bad number: " + item);
    }
  }
  if (static_cast<int>(vals.size()) == 1 && n > 1) {
    return VecX::Constant(n, vals[0]);
  }
  if (static_cast<int>(vals.size()) != n) {
    throw ValidationError(flag, "expected 1 or " + std::to_string(n) + " comma-separated values");
  }
  return Eigen::Map<VecX>(vals.data(), n);
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string default_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("IP_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

std::string format_number(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

void print_matrix(const std::string& name, const MatX& m, int precision) {
  std::printf("%s (%ldx%ld):\n", name.c_str(), static_cast<long>(m.rows()),
              static_cast<long>(m.cols()));
  const int width = precision + 8;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      std::printf("  %*s", width, format_number(m(r, c), precision).c_str());
    }
    std::printf("\n");
  }
}

void print_vector(const std::string& name, const VecX& v, int precision) {
  std::printf("%s:", name.c_str());
  for (int i = 0; i < v.size(); ++i) {
    std::printf(" %s", format_number(v(i), precision).c_str());
  }
  std::printf("\n");
}

nlohmann::json matrix_json(const MatX& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// validate

struct CheckLine {
  std::string name;
  bool pass;
  std::string detail;
};

int cmd_validate(const ModelGraph& m, int state_count, std::uint64_t seed) {
  const auto states = sweep::sample_states(m, state_count, seed, 1.0);
  const auto checks = sweep::run_checks(m, states);
  const sweep::StateChecks w = sweep::worst_case(checks);

  std::vector<CheckLine> lines;
  auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    lines.push_back({name, pass, detail});
  };
  add("spd-sampling", w.inertia_min_eig > 0.0,
      "min eigenvalue " + format_number(w.inertia_min_eig, 6) + " over " +
          std::to_string(state_count) + " states");
  add("energy-identity", w.energy_defect <= 1e-10 * std::max(1.0, w.kinetic_energy),
      "worst defect " + format_number(w.energy_defect, 3));
  add("frame-invariance", w.frame_invariance <= 1e-10 * std::max(1.0, w.kinetic_energy),
      "worst defect " + format_number(w.frame_invariance, 3));
  add("skew-symmetry", w.skew_defect <= 1e-8 * std::max(1.0, w.gdot_norm),
      "worst defect " + format_number(w.skew_defect, 3));
  add("coriolis-identity", w.coriolis_identity <= 1e-6 * w.coriolis_scale + 1e-10,
      "worst defect " + format_number(w.coriolis_identity, 3));
  add("gravity-gradient", w.gravity_defect <= 1e-6,
      "worst relative defect " + format_number(w.gravity_defect, 3));
  add("jacobian-twist", w.twist_defect <= 1e-6,
      "worst relative defect " + format_number(w.twist_defect, 3));
  add("inertia-partials", w.partial_fd_defect <= 1e-6,
      "analytic vs difference, worst " + format_number(w.partial_fd_defect, 3));

  // Coupling derivative vs differences, swept across the feasible interval.
  for (const auto& b : m.bodies) {
    if (!b.joint.coupling) continue;
    const CouplingFunction& c = *b.joint.coupling;
    const double lo = c.feasible_lo(), hi = c.feasible_hi();
    double worst = 0.0;
    bool monotone = true;
    double prev_angle = -4.0;
    for (int k = 0; k <= 200; ++k) {
      const double margin = 0.05 * (hi - lo);
      const double d = lo + margin + (hi - lo - 2 * margin) * k / 200.0;
      const CouplingValue v = coupling_eval(c, d);
      const double h = 1e-7;
      const double fd = (coupling_eval(c, d + h).angle - coupling_eval(c, d - h).angle) / (2 * h);
      worst = std::max(worst, std::abs(fd - v.dangle_ddelta) / std::max(1.0, std::abs(fd)));
      if (v.angle <= prev_angle) monotone = false;
      prev_angle = v.angle;
    }
    add("coupling-derivative[" + b.name + "]", worst <= 1e-6,
        "worst relative defect " + format_number(worst, 3));
    add("coupling-monotone[" + b.name + "]", monotone, "sampled over the feasible interval");
  }

  bool all_pass = true;
  for (const CheckLine& line : lines) {
    std::printf("[%s] %s: %s\n", line.pass ? "PASS" : "FAIL", line.name.c_str(),
                line.detail.c_str());
    all_pass = all_pass && line.pass;
  }

  // Conditioning advisory at a default state (midpoint of coupled intervals).
  KinematicState def = KinematicState::zero(m.coordinate_count());
  for (int j = 0; j < m.coordinate_count(); ++j) {
    const auto [lo, hi] = m.coordinate_interval(j);
    if (std::isfinite(lo) && std::isfinite(hi)) def.q(j) = 0.5 * (lo + hi);
  }
  try {
    const MatX g = system_inertia(m, def);
    Eigen::SelfAdjointEigenSolver<MatX> es(g, Eigen::EigenvaluesOnly);
    const double lo_eig = es.eigenvalues().minCoeff();
    const double hi_eig = es.eigenvalues().maxCoeff();
    if (lo_eig < 1e-6 * std::max(1.0, hi_eig)) {
      std::printf("[WARN] near-singular generalized inertia at the default state (min eig %s)\n",
                  format_number(lo_eig, 3).c_str());
    }
  } catch (const Error& e) {
    std::printf("[WARN] default state not evaluable: %s\n", e.what());
  }

  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string model_path, builtin;
  double duration = 10.0;
  double dt = 1e-3;
  std::string kp = "20", kv = "20";
  std::string reference = "paper-like";
  std::string q0, qdot0, setpoint;
  std::string out_dir;
};

int cmd_simulate(const SimulateArgs& a) {
  const ModelGraph m = resolve_model(a.model_path, a.builtin);
  const int n = m.coordinate_count();

  SimConfig cfg;
  cfg.dt = a.dt;
  cfg.duration = a.duration;
  cfg.gains.kp = parse_list(a.kp, n, "--kp");
  cfg.gains.kv = parse_list(a.kv, n, "--kv");
  VecX setpoint;
  if (a.reference == "paper-like") {
    cfg.reference = make_reference_paperlike(m, a.duration);
  } else if (a.reference == "setpoint") {
    setpoint = a.setpoint.empty() ? VecX::Zero(n) : parse_list(a.setpoint, n, "--setpoint");
    cfg.reference = make_reference_setpoint(setpoint);
  } else {
    throw ValidationError("--reference", "unknown reference kind: " + a.reference);
  }
  if (!a.q0.empty()) cfg.q0 = parse_list(a.q0, n, "--q0");
  if (!a.qdot0.empty()) cfg.qdot0 = parse_list(a.qdot0, n, "--qdot0");

  const fs::path out_dir = default_out_dir(a.out_dir);
  fs::create_directories(out_dir);

  // Manifest covers the effective parameters, so a run is reproducible from
  // it alone and default vs explicitly-equal flags hash identically.
  nlohmann::json manifest;
  manifest["version"] = kVersion;
  manifest["model"] = a.builtin.empty() ? ("file:" + a.model_path) : ("builtin:" + a.builtin);
  {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(save_model(m))));
    manifest["model_hash"] = hex;
  }
  manifest["dt"] = cfg.dt;
  manifest["duration"] = cfg.duration;
  manifest["kp"] = std::vector<double>(cfg.gains.kp.data(), cfg.gains.kp.data() + n);
  manifest["kv"] = std::vector<double>(cfg.gains.kv.data(), cfg.gains.kv.data() + n);
  manifest["reference"] = a.reference;
  if (setpoint.size() == n) {
    manifest["setpoint"] = std::vector<double>(setpoint.data(), setpoint.data() + n);
  }
  manifest["q0"] = a.q0.empty() ? "reference" : a.q0;
  manifest["qdot0"] = a.qdot0.empty() ? "reference" : a.qdot0;
  {
    nlohmann::json for_hash = manifest;
    for_hash.erase("version");
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(for_hash.dump())));
    manifest["config_hash"] = hex;
  }

  const SimResult result = simulate(m, cfg);
  write_file(out_dir / "trajectory.csv", trajectory_csv(result.trajectory));
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  if (!result.trajectory.rows.empty()) {
    write_file(out_dir / "rmse.json", rmse_json(compute_rmse(result.trajectory)) + "\n");
  }
  if (!result.completed) {
    std::fprintf(stderr, "simulation aborted at t=%s: %s (partial CSV retained)\n",
                 format_number(result.last_good_time, 6).c_str(), result.abort_reason.c_str());
    return 1;
  }
  std::printf("wrote %s\n", (out_dir / "trajectory.csv").string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// dump

int cmd_dump(const ModelGraph& m, const std::string& q_text, const std::string& qdot_text,
             bool as_json, int precision) {
  const int n = m.coordinate_count();
  KinematicState s = KinematicState::zero(n);
  for (int j = 0; j < n; ++j) {
    const auto [lo, hi] = m.coordinate_interval(j);
    if (std::isfinite(lo) && std::isfinite(hi)) s.q(j) = 0.5 * (lo + hi);
  }
  if (!q_text.empty()) s.q = parse_list(q_text, n, "--q");
  if (!qdot_text.empty()) s.qdot = parse_list(qdot_text, n, "--qdot");

  const MatX inertia = system_inertia(m, s);
  const MatX rate = system_inertia_rate(m, s);
  const MatX coriolis = coriolis_matrix(m, s);
  const VecX gravity = gravity_force(m, s);
  const std::vector<MatX> contributions = body_inertia_contributions(m, s);

  if (as_json) {
    nlohmann::json j;
    j["q"] = std::vector<double>(s.q.data(), s.q.data() + n);
    j["qdot"] = std::vector<double>(s.qdot.data(), s.qdot.data() + n);
    j["generalized_inertia"] = matrix_json(inertia);
    j["inertia_rate"] = matrix_json(rate);
    j["coriolis"] = matrix_json(coriolis);
    j["gravity_force"] = std::vector<double>(gravity.data(), gravity.data() + n);
    nlohmann::json per_body = nlohmann::json::object();
    for (int i = 0; i < m.body_count(); ++i) {
      per_body[m.bodies[i].name] = matrix_json(contributions[i]);
    }
    j["body_inertia"] = per_body;
    std::printf("%s\n", j.dump(2).c_str());
  } else {
    print_vector("q", s.q, precision);
    print_vector("qdot", s.qdot, precision);
    print_matrix("generalized_inertia", inertia, precision);
    print_matrix("inertia_rate", rate, precision);
    print_matrix("coriolis", coriolis, precision);
    print_vector("gravity_force", gravity, precision);
    for (int i = 0; i < m.body_count(); ++i) {
      print_matrix("body_inertia[" + m.bodies[i].name + "]", contributions[i], precision);
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// rmse

int cmd_rmse(const std::string& csv_path, bool as_json) {
  const Trajectory traj = trajectory_from_csv(read_file(csv_path));
  const RmseReport report = compute_rmse(traj);
  if (as_json) {
    std::printf("%s\n", rmse_json(report).c_str());
  } else {
    std::printf("%s", rmse_text(report).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ipdyn: minimal-coordinate multibody dynamics and tracking control"};
  app.require_subcommand(1);

  std::string model_path, builtin;
  int validate_states = 1000;
  std::uint64_t validate_seed = 20240817ULL;
  auto* validate = app.add_subcommand("validate", "run the model invariant suite");
  validate->add_option("--model", model_path, "model config JSON");
  validate->add_option("--builtin", builtin, "builtin model name");
  validate->add_option("--states", validate_states, "number of sampled states");
  validate->add_option("--seed", validate_seed, "sampling seed");

  SimulateArgs sim_args;
  auto* simulate_cmd = app.add_subcommand("simulate", "closed-loop tracking simulation");
  simulate_cmd->add_option("--model", sim_args.model_path, "model config JSON");
  simulate_cmd->add_option("--builtin", sim_args.builtin, "builtin model name");
  simulate_cmd->add_option("--duration", sim_args.duration, "horizon [s]");
  simulate_cmd->add_option("--dt", sim_args.dt, "fixed step [s]");
  simulate_cmd->add_option("--kp", sim_args.kp, "position gains (scalar or comma list)");
  simulate_cmd->add_option("--kv", sim_args.kv, "velocity gains (scalar or comma list)");
  simulate_cmd->add_option("--reference", sim_args.reference, "paper-like | setpoint");
  simulate_cmd->add_option("--setpoint", sim_args.setpoint, "setpoint coordinates (comma list)");
  simulate_cmd->add_option("--q0", sim_args.q0, "initial q (comma list; default: on reference)");
  simulate_cmd->add_option("--qdot0", sim_args.qdot0, "initial qdot (comma list)");
  simulate_cmd->add_option("--out", sim_args.out_dir, "output directory (default $IP_OUTPUT_DIR)");

  std::string dump_q, dump_qdot;
  bool dump_json = false;
  int dump_precision = 6;
  auto* dump = app.add_subcommand("dump", "print dynamics matrices at a state");
  dump->add_option("--model", model_path, "model config JSON");
  dump->add_option("--builtin", builtin, "builtin model name");
  dump->add_option("--q", dump_q, "coordinates (comma list)");
  dump->add_option("--qdot", dump_qdot, "coordinate rates (comma list)");
  dump->add_flag("--json", dump_json, "emit JSON instead of text");
  dump->add_option("--precision", dump_precision, "significant digits for text output");

  std::string rmse_csv;
  bool rmse_as_json = false;
  auto* rmse = app.add_subcommand("rmse", "recompute tracking metrics from a trajectory CSV");
  rmse->add_option("csv", rmse_csv, "trajectory CSV path")->required();
  rmse->add_flag("--json", rmse_as_json, "emit JSON instead of key=value text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  }

  try {
    if (validate->parsed()) {
      return cmd_validate(resolve_model(model_path, builtin), validate_states, validate_seed);
    }
    if (simulate_cmd->parsed()) {
      return cmd_simulate(sim_args);
    }
    if (dump->parsed()) {
      return cmd_dump(resolve_model(model_path, builtin), dump_q, dump_qdot, dump_json,
                      dump_precision);
    }
    if (rmse->parsed()) {
      return cmd_rmse(rmse_csv, rmse_as_json);
    }
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const CouplingSingularityError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
