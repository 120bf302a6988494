#include "rslam/lie/sot3.hpp"

#include <cmath>
#include <stdexcept>

namespace rslam {

ScaledRot::ScaledRot(const Rot3& rot, double scale)
    : rot_(rot), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("ScaledRot: scale must be positive");
  }
}

Eigen::Matrix4d sot3Hat(const Eigen::Vector4d& u) {
  Eigen::Matrix4d U = Eigen::Matrix4d::Zero();
  U.topLeftCorner<3, 3>() = hat(u.head<3>());
  U(3, 3) = u(3);
  return U;
}

Eigen::Vector4d sot3Vee(const Eigen::Matrix4d& U) {
  Eigen::Vector4d u;
  u.head<3>() = vee(U.topLeftCorner<3, 3>());
  u(3) = U(3, 3);
  return u;
}

ScaledRot ScaledRot::exp(const Eigen::Vector4d& u) {
  return ScaledRot(Rot3::exp(u.head<3>()), std::exp(u(3)));
}

Eigen::Vector4d ScaledRot::log() const {
  Eigen::Vector4d u;
  u.head<3>() = rot_.log();
  u(3) = std::log(scale_);
  return u;
}

ScaledRot ScaledRot::operator*(const ScaledRot& other) const {
  return ScaledRot(rot_ * other.rot_, scale_ * other.scale_);
}

ScaledRot ScaledRot::inverse() const {
  return ScaledRot(rot_.inverse(), 1.0 / scale_);
}

Eigen::Matrix4d ScaledRot::matrix4() const {
  Eigen::Matrix4d M = Eigen::Matrix4d::Identity();
  M.topLeftCorner<3, 3>() = rot_.matrix();
  M(3, 3) = scale_;
  return M;
}

Eigen::Matrix4d ScaledRot::adjoint() const {
  // The scale factor commutes with everything, so only the rotation acts.
  Eigen::Matrix4d Ad = Eigen::Matrix4d::Identity();
  Ad.topLeftCorner<3, 3>() = rot_.matrix();
  return Ad;
}

}  // namespace rslam
