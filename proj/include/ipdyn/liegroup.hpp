#pragma once

#include "ipdyn/errors.hpp"
#include "ipdyn/types.hpp"

namespace ipdyn {

/// Rigid pose on SE(3): rotation plus translation. Embeds as the 4x4
/// homogeneous matrix [R p; 0 1]. Value type, cheap to copy.
struct Transform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Transform identity() { return {}; }

  Mat4 embed() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }
};

/// Body twist: angular block stacked over linear block.
struct Twist {
  Vec3 angular = Vec3::Zero();
  Vec3 linear = Vec3::Zero();

  Vec6 vec() const {
    Vec6 v;
    v << angular, linear;
    return v;
  }
  static Twist from_vec(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }
};

/// Wrench dual to Twist (moment over force), so twist.vec().dot(wrench.vec())
/// is mechanical power.
struct Wrench {
  Vec3 moment = Vec3::Zero();
  Vec3 force = Vec3::Zero();

  Vec6 vec() const {
    Vec6 v;
    v << moment, force;
    return v;
  }
  static Wrench from_vec(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }
};

/// Skew-symmetric matrix of v: skew(v) * w == v.cross(w).
Mat3 skew(const Vec3& v);

Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);

/// Rodrigues rotation about a unit axis.
Mat3 rot_axis(const Vec3& unit_axis, double angle);

/// True if R is orthonormal with determinant +1 within tol.
bool is_rotation(const Mat3& r, double tol = 1e-10);

/// Nearest rotation matrix (polar decomposition via SVD). Throws
/// ValidationError if the input is further than tol from a rotation.
Mat3 orthonormalized(const Mat3& r, double tol = 1e-8);

Transform compose(const Transform& a, const Transform& b);
Transform inverse(const Transform& t);

/// 6x6 adjoint [R 0; [p]R R] mapping twists from the child frame of t
/// to its parent frame.
Mat6 adjoint(const Transform& t);

/// Extract the body twist from T and its elementwise time derivative via
/// T^-1 * Tdot. The 3x3 block is symmetrized; a skew defect above tol
/// throws InconsistentDerivativeError.
Twist body_twist_from_derivative(const Transform& t, const Mat4& t_dot,
                                 double tol = 1e-8);

}  // namespace ipdyn
