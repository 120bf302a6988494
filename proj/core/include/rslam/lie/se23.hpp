#pragma once

#include <Eigen/Dense>

#include "rslam/lie/so3.hpp"

namespace rslam {

using Vector9d = Eigen::Matrix<double, 9, 1>;
using Matrix9d = Eigen::Matrix<double, 9, 9>;
using Matrix5d = Eigen::Matrix<double, 5, 5>;

// Extended pose (R, v, x): a rotation with two translation slots, embedded
// as the 5x5 matrix [R v x; 0 1 0; 0 0 1]. In navigation use v is the
// velocity and x the position. Tangent vectors are ordered
// (rotation, velocity slot, position slot).
class ExtendedPose {
 public:
  ExtendedPose()
      : vel_(Eigen::Vector3d::Zero()), pos_(Eigen::Vector3d::Zero()) {}
  ExtendedPose(const Rot3& rot, const Eigen::Vector3d& vel,
               const Eigen::Vector3d& pos)
      : rot_(rot), vel_(vel), pos_(pos) {}

  static ExtendedPose exp(const Vector9d& u);
  Vector9d log() const;

  ExtendedPose operator*(const ExtendedPose& other) const;
  ExtendedPose inverse() const;

  Matrix5d matrix() const;
  static ExtendedPose fromMatrix(const Matrix5d& M, double tol = 1e-9);

  Matrix9d adjoint() const;

  const Rot3& rotation() const { return rot_; }
  const Eigen::Vector3d& velocity() const { return vel_; }
  const Eigen::Vector3d& position() const { return pos_; }

 private:
  Rot3 rot_;
  Eigen::Vector3d vel_;
  Eigen::Vector3d pos_;
};

// 5x5 algebra representation of a tangent vector.
Matrix5d se23Hat(const Vector9d& u);
Vector9d se23Vee(const Matrix5d& U);

}  // namespace rslam
