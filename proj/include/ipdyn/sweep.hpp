#pragma once

#include <cstdint>
#include <vector>

#include "ipdyn/dynamics.hpp"

namespace ipdyn::sweep {

/// Defect metrics of one sampled state. Every field is a plain number so a
/// batch of states reduces to elementwise max/min.
struct StateChecks {
  double inertia_min_eig = 0.0;    // min eigenvalue of the generalized inertia
  double kinetic_energy = 0.0;
  double energy_defect = 0.0;      // |1/2 qd^T G qd - sum of body energies|
  double frame_invariance = 0.0;   // max entry diff of per-body inertia across frames
  double skew_defect = 0.0;        // ||sym(Gdot - 2C)||inf
  double gdot_norm = 0.0;          // ||Gdot||inf
  double coriolis_identity = 0.0;  // ||C qd - (Gdot qd - 1/2 grad)||inf
  double coriolis_scale = 0.0;     // ||Gdot qd||inf
  double gravity_defect = 0.0;     // rel diff of gravity force vs -grad(potential)
  double twist_defect = 0.0;       // rel diff of J qd vs finite-difference twists
  double partial_fd_defect = 0.0;  // rel diff of analytic vs difference-based inertia partials
};

/// Deterministic feasible state sample: coupled coordinates uniform inside
/// a margin-shrunk feasible interval, free coordinates uniform in
/// [-pi, pi] (rad) or [-1, 1] (m), velocities uniform in
/// [-qdot_scale, qdot_scale]. Same seed, same states, on every platform.
std::vector<KinematicState> sample_states(const ModelGraph& m, int count, std::uint64_t seed,
                                          double qdot_scale = 1.0);

/// All checks for a single state.
StateChecks evaluate_state(const ModelGraph& m, const KinematicState& s);

/// Batch evaluation, OpenMP-parallel over states. Results are bit-identical
/// to run_checks_serial: every slot is computed independently.
std::vector<StateChecks> run_checks(const ModelGraph& m,
                                    const std::vector<KinematicState>& states);

/// Serial reference implementation of run_checks, kept for testing and
/// benchmarking.
std::vector<StateChecks> run_checks_serial(const ModelGraph& m,
                                           const std::vector<KinematicState>& states);

/// Light kernel: only the minimum eigenvalue of the generalized inertia per
/// state. Parallel and serial variants.
std::vector<double> run_inertia_spectrum(const ModelGraph& m,
                                         const std::vector<KinematicState>& states);
std::vector<double> run_inertia_spectrum_serial(const ModelGraph& m,
                                                const std::vector<KinematicState>& states);

/// Worst case over a batch (elementwise max of defects, min of min-eigs).
StateChecks worst_case(const std::vector<StateChecks>& checks);

}  // namespace ipdyn::sweep
