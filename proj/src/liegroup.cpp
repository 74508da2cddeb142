#include "ipdyn/liegroup.hpp"

#include <cmath>

namespace ipdyn {

Mat3 skew(const Vec3& v) {
  Mat3 s;
  // clang-format off
  s <<     0, -v.z(),  v.y(),
       v.z(),      0, -v.x(),
      -v.y(),  v.x(),      0;
  // clang-format on
  return s;
}

Mat3 rot_x(double a) {
  Mat3 r;
  r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return r;
}

Mat3 rot_y(double a) {
  Mat3 r;
  r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return r;
}

Mat3 rot_z(double a) {
  Mat3 r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

Mat3 rot_axis(const Vec3& axis, double angle) {
  const Mat3 k = skew(axis);
  return Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

bool is_rotation(const Mat3& r, double tol) {
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

Mat3 orthonormalized(const Mat3& r, double tol) {
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 q = svd.matrixU() * svd.matrixV().transpose();
  if (q.determinant() < 0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1;
    q = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  if ((q - r).cwiseAbs().maxCoeff() > tol) {
    throw ValidationError("rotation", "matrix is not orthonormal within tolerance");
  }
  return q;
}

Transform compose(const Transform& a, const Transform& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

Transform inverse(const Transform& t) {
  Mat3 rt = t.rotation.transpose();
  return {rt, -(rt * t.translation)};
}

Mat6 adjoint(const Transform& t) {
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = t.rotation;
  ad.bottomLeftCorner<3, 3>() = skew(t.translation) * t.rotation;
  ad.bottomRightCorner<3, 3>() = t.rotation;
  return ad;
}

Twist body_twist_from_derivative(const Transform& t, const Mat4& t_dot, double tol) {
  const Mat4 e = t.embed().inverse() * t_dot;
  const Mat3 s = e.topLeftCorner<3, 3>();
  const double defect = (s + s.transpose()).cwiseAbs().maxCoeff();
  if (defect > tol) {
    throw InconsistentDerivativeError(defect);
  }
  const Mat3 w = 0.5 * (s - s.transpose());
  Twist v;
  v.angular = Vec3(w(2, 1), w(0, 2), w(1, 0));
  v.linear = e.topRightCorner<3, 1>();
  return v;
}

}  // namespace ipdyn
