#include "rslam/lie/se23.hpp"

#include <stdexcept>

namespace rslam {

Matrix5d se23Hat(const Vector9d& u) {
  Matrix5d U = Matrix5d::Zero();
  U.topLeftCorner<3, 3>() = hat(u.segment<3>(0));
  U.block<3, 1>(0, 3) = u.segment<3>(3);
  U.block<3, 1>(0, 4) = u.segment<3>(6);
  return U;
}

Vector9d se23Vee(const Matrix5d& U) {
  Vector9d u;
  u.segment<3>(0) = vee(U.topLeftCorner<3, 3>());
  u.segment<3>(3) = U.block<3, 1>(0, 3);
  u.segment<3>(6) = U.block<3, 1>(0, 4);
  return u;
}

ExtendedPose ExtendedPose::exp(const Vector9d& u) {
  const Eigen::Vector3d w = u.segment<3>(0);
  const Eigen::Matrix3d J = so3LeftJacobian(w);
  return ExtendedPose(Rot3::exp(w), J * u.segment<3>(3), J * u.segment<3>(6));
}

Vector9d ExtendedPose::log() const {
  Vector9d u;
  const Eigen::Vector3d w = rot_.log();
  const Eigen::Matrix3d Jinv = so3LeftJacobianInv(w);
  u.segment<3>(0) = w;
  u.segment<3>(3) = Jinv * vel_;
  u.segment<3>(6) = Jinv * pos_;
  return u;
}

ExtendedPose ExtendedPose::operator*(const ExtendedPose& other) const {
  return ExtendedPose(rot_ * other.rot_, vel_ + rot_ * other.vel_,
                      pos_ + rot_ * other.pos_);
}

ExtendedPose ExtendedPose::inverse() const {
  const Rot3 rinv = rot_.inverse();
  return ExtendedPose(rinv, -(rinv * vel_), -(rinv * pos_));
}

Matrix5d ExtendedPose::matrix() const {
  Matrix5d M = Matrix5d::Identity();
  M.topLeftCorner<3, 3>() = rot_.matrix();
  M.block<3, 1>(0, 3) = vel_;
  M.block<3, 1>(0, 4) = pos_;
  return M;
}

ExtendedPose ExtendedPose::fromMatrix(const Matrix5d& M, double tol) {
  if ((M.bottomLeftCorner<2, 3>().norm() > tol) ||
      (M.bottomRightCorner<2, 2>() - Eigen::Matrix2d::Identity()).norm() >
          tol) {
    throw std::invalid_argument(
        "ExtendedPose::fromMatrix: bottom rows are not (0 I)");
  }
  return ExtendedPose(Rot3::fromMatrix(M.topLeftCorner<3, 3>(), tol),
                      M.block<3, 1>(0, 3), M.block<3, 1>(0, 4));
}

Matrix9d ExtendedPose::adjoint() const {
  Matrix9d Ad = Matrix9d::Zero();
  const Eigen::Matrix3d& R = rot_.matrix();
  Ad.block<3, 3>(0, 0) = R;
  Ad.block<3, 3>(3, 3) = R;
  Ad.block<3, 3>(6, 6) = R;
  Ad.block<3, 3>(3, 0) = hat(vel_) * R;
  Ad.block<3, 3>(6, 0) = hat(pos_) * R;
  return Ad;
}

}  // namespace rslam
