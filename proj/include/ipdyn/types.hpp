#pragma once

#include <Eigen/Dense>

namespace ipdyn {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// 6xn spatial Jacobian, rows 0-2 angular, rows 3-5 linear.
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

}  // namespace ipdyn
