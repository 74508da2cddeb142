#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ipdyn/liegroup.hpp"

namespace ipdyn {

/// Mass, center-of-mass offset and rotational inertia of one rigid body,
/// all expressed in the body frame. mass == 0 marks a massless body and
/// requires a zero inertia tensor.
struct SpatialInertiaParams {
  double mass = 0.0;                       // kg
  Vec3 com_offset = Vec3::Zero();          // body frame -> center of mass, m
  Mat3 inertia_about_com = Mat3::Zero();   // about the COM, body axes, kg m^2
};

enum class JointKind { Revolute, Prismatic, CoupledRevolute };

/// Scalar coupling between a driving coordinate and a dependent joint angle.
/// The only kind is the triangle law-of-cosines of a piston of free length l0
/// closing a loop across two links of length L0 each: the dependent angle is
///   zeta(delta) = -acos((delta + l0)^2 / (2 L0^2) - 1),  zeta in (-pi, 0).
struct CouplingFunction {
  enum class Kind { TriangleLawOfCosines };
  Kind kind = Kind::TriangleLawOfCosines;
  double l0 = 0.0;  // m, piston length at delta = 0
  double L0 = 0.0;  // m, the two equal triangle sides

  /// Open feasible interval for delta.
  double feasible_lo() const { return -l0; }
  double feasible_hi() const { return 2.0 * L0 - l0; }
};

struct CouplingValue {
  double angle = 0.0;              // zeta, rad
  double dangle_ddelta = 0.0;      // dzeta/ddelta, rad/m
  double d2angle_ddelta2 = 0.0;    // rad/m^2
};

/// Evaluate the coupling angle and its exact derivative at delta.
/// Throws CouplingSingularityError outside the feasible interval
/// (law-of-cosines argument within eps of +-1).
CouplingValue coupling_eval(const CouplingFunction& c, double delta, double eps = 1e-9);

/// One joint: the screw axis is a unit vector in the child body frame.
/// CoupledRevolute rotates by coupling(delta) where delta is the driving
/// coordinate's value.
struct JointSpec {
  JointKind kind = JointKind::Revolute;
  Vec3 axis = Vec3::UnitZ();
  int coordinate = 0;  // index into q
  std::optional<CouplingFunction> coupling;
};

/// One rigid body: its joint attaches at `attachment` expressed in the parent
/// body frame (the inertial frame for the root). Auxiliary frames are fixed
/// transforms from this body's frame.
struct BodyModule {
  std::string name;
  int parent = -1;  // index into ModelGraph::bodies, -1 for the inertial root
  Transform attachment;
  JointSpec joint;
  SpatialInertiaParams inertia;
  std::map<std::string, Transform> frames;
};

struct CoordinateInfo {
  std::string name;
  std::string unit;  // "rad" or "m"; metadata only
};

/// Immutable description of the multibody system. Bodies are stored in
/// topological order (parents precede children); closed chains appear only
/// through coupling functions, never as constraint objects.
struct ModelGraph {
  std::vector<CoordinateInfo> coordinates;
  std::vector<BodyModule> bodies;
  Vec3 gravity = Vec3::Zero();  // m/s^2, in the inertial frame

  int coordinate_count() const { return static_cast<int>(coordinates.size()); }
  int body_count() const { return static_cast<int>(bodies.size()); }

  /// Index of the named coordinate; throws ValidationError if absent.
  int coordinate_index(const std::string& name) const;

  /// Feasible open interval of coordinate j (the coupling interval for
  /// coordinates driving a coupled joint, unbounded otherwise).
  std::pair<double, double> coordinate_interval(int j) const;
};

/// Validate all model invariants; throws ValidationError naming the field.
void validate_model(const ModelGraph& m);

/// Parse and validate a model from its JSON config document.
/// Throws ParseError on malformed JSON, ValidationError with a path on
/// schema or invariant violations.
ModelGraph load_model(const std::string& json_text);

/// Serialize a model to the same JSON schema accepted by load_model.
/// Round-trips all parameters bit-identically.
std::string save_model(const ModelGraph& m);

/// The builtin 3-DoF series-parallel manipulator: a yaw base, a pitched
/// link, and a second link driven through a triangular closed chain by a
/// prismatic coordinate. Coordinates (phi, theta, delta).
///
/// The config tables give only frame positions; orientations follow the
/// z-axis joint convention: the base yaw axis is the inertial z, pitch
/// frames are rotated +90 deg about x so their z is the horizontal pitch
/// axis, and the elbow attachment flips 180 deg about x so the negative
/// coupling angle raises the second link. kinematics tests pin this
/// reconstruction against the closed-form end-effector map.
ModelGraph builtin_manipulator3dof();

/// Default feedback gain of the builtin tracking experiment (kp = kv = 20).
inline constexpr double kManipulator3dofGain = 20.0;

}  // namespace ipdyn
