#pragma once

#include <cstdint>
#include <string>

#include "ipdyn/kinematics.hpp"

namespace test_support {

using namespace ipdyn;

/// splitmix64, same sequence everywhere.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo = -1.0, double hi = 1.0) {
    return lo + (hi - lo) * (static_cast<double>(next_u64() >> 11) * 0x1.0p-53);
  }
  Vec3 vec3(double scale = 1.0) {
    return Vec3(uniform(), uniform(), uniform()) * scale;
  }
  Mat3 rotation() {
    return rot_z(uniform(-M_PI, M_PI)) * rot_y(uniform(-M_PI, M_PI)) *
           rot_x(uniform(-M_PI, M_PI));
  }
  Transform transform(double translation_scale = 1.0) {
    return {rotation(), vec3(translation_scale)};
  }
};

/// Feasible random state of the builtin manipulator, margin-shrunk in delta.
inline KinematicState random_manipulator_state(const ModelGraph& m, Rng& rng,
                                               double qdot_scale = 1.0) {
  KinematicState s = KinematicState::zero(m.coordinate_count());
  for (int j = 0; j < m.coordinate_count(); ++j) {
    const auto [lo, hi] = m.coordinate_interval(j);
    if (std::isfinite(lo) && std::isfinite(hi)) {
      const double margin = 0.1 * (hi - lo);
      s.q(j) = rng.uniform(lo + margin, hi - margin);
    } else {
      s.q(j) = rng.uniform(-M_PI, M_PI);
    }
    s.qdot(j) = rng.uniform(-qdot_scale, qdot_scale);
  }
  return s;
}

/// A single pendulum: revolute joint about a horizontal axis, COM at
/// distance `length` along the link, angle measured from horizontal so the
/// textbook gravity torque is -m g l cos(theta).
inline ModelGraph pendulum_model(double mass, double length) {
  ModelGraph m;
  m.coordinates = {{"theta", "rad"}};
  m.gravity = Vec3(0.0, 0.0, -9.81);
  // Same pitch-frame convention as the builtin arm: x along the link,
  // y up, z the horizontal rotation axis.
  Mat3 rx90;
  rx90 << 1, 0, 0,
          0, 0, -1,
          0, 1, 0;
  BodyModule link;
  link.name = "link";
  link.parent = -1;
  link.attachment = Transform{rx90, Vec3::Zero()};
  link.joint = {JointKind::Revolute, Vec3::UnitZ(), 0, std::nullopt};
  link.inertia.mass = mass;
  link.inertia.com_offset = Vec3(length, 0.0, 0.0);
  link.inertia.inertia_about_com = Mat3::Zero();
  link.frames["tip"] = Transform{Mat3::Identity(), Vec3(length, 0.0, 0.0)};
  m.bodies = {link};
  validate_model(m);
  return m;
}

/// Single prismatic slider along x: constant Jacobian everywhere.
inline ModelGraph slider_model() {
  ModelGraph m;
  m.coordinates = {{"s", "m"}};
  m.gravity = Vec3::Zero();
  BodyModule slider;
  slider.name = "slider";
  slider.parent = -1;
  slider.attachment = Transform::identity();
  slider.joint = {JointKind::Prismatic, Vec3::UnitX(), 0, std::nullopt};
  slider.inertia.mass = 2.0;
  slider.inertia.com_offset = Vec3::Zero();
  slider.inertia.inertia_about_com = Mat3::Identity() * 0.1;
  m.bodies = {slider};
  validate_model(m);
  return m;
}

}  // namespace test_support
