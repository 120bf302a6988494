#pragma once

#include <Eigen/Dense>

#include "rslam/lie/so3.hpp"

namespace rslam {

// Scaled rotation Q = c R with c > 0, acting on R^3 as the matrix c R.
// Embedded as the 4x4 matrix blkdiag(R, c). Tangent vectors are ordered
// (rotation, log scale).
class ScaledRot {
 public:
  ScaledRot() : scale_(1.0) {}
  ScaledRot(const Rot3& rot, double scale);

  static ScaledRot exp(const Eigen::Vector4d& u);
  Eigen::Vector4d log() const;

  ScaledRot operator*(const ScaledRot& other) const;
  ScaledRot inverse() const;
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const {
    return scale_ * (rot_ * p);
  }

  Eigen::Matrix3d matrix() const { return scale_ * rot_.matrix(); }
  Eigen::Matrix4d matrix4() const;
  Eigen::Matrix4d adjoint() const;

  const Rot3& rotation() const { return rot_; }
  double scale() const { return scale_; }

 private:
  Rot3 rot_;
  double scale_;
};

Eigen::Matrix4d sot3Hat(const Eigen::Vector4d& u);
Eigen::Vector4d sot3Vee(const Eigen::Matrix4d& U);

}  // namespace rslam
