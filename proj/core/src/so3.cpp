#include "rslam/lie/so3.hpp"

#include <cmath>
#include <stdexcept>

namespace rslam {

namespace {
// Below this angle the closed-form Rodrigues coefficients lose precision
// and the Taylor expansions are exact to double precision.
constexpr double kSmallAngle = 1e-6;
constexpr unsigned kRenormalizeEvery = 1000;
}  // namespace

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d W;
  // clang-format off
  W <<     0, -w(2),  w(1),
        w(2),     0, -w(0),
       -w(1),  w(0),     0;
  // clang-format on
  return W;
}

Eigen::Vector3d vee(const Eigen::Matrix3d& W) {
  return Eigen::Vector3d(W(2, 1), W(0, 2), W(1, 0));
}

Eigen::Matrix3d so3LeftJacobian(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const Eigen::Matrix3d W = hat(w);
  double c1, c2;  // J = I + c1 W + c2 W^2
  if (theta < kSmallAngle) {
    c1 = 0.5 - theta * theta / 24.0;
    c2 = 1.0 / 6.0 - theta * theta / 120.0;
  } else {
    c1 = (1.0 - std::cos(theta)) / (theta * theta);
    c2 = (theta - std::sin(theta)) / (theta * theta * theta);
  }
  return Eigen::Matrix3d::Identity() + c1 * W + c2 * W * W;
}

Eigen::Matrix3d so3LeftJacobianInv(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const Eigen::Matrix3d W = hat(w);
  double c;  // Jinv = I - W/2 + c W^2
  if (theta < kSmallAngle) {
    c = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    c = 1.0 / (theta * theta) -
        (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  }
  return Eigen::Matrix3d::Identity() - 0.5 * W + c * W * W;
}

Eigen::Matrix3d projectToSO3(const Eigen::Matrix3d& M) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1;
    R = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return R;
}

Rot3 Rot3::fromMatrix(const Eigen::Matrix3d& R, double tol) {
  const double orthoErr =
      (R.transpose() * R - Eigen::Matrix3d::Identity()).norm();
  if (orthoErr > tol || R.determinant() < 0) {
    throw std::invalid_argument("Rot3::fromMatrix: input is not a rotation");
  }
  return Rot3(R);
}

Rot3 Rot3::fromQuaternion(double qw, double qx, double qy, double qz,
                          double tol) {
  Eigen::Quaterniond q(qw, qx, qy, qz);
  if (std::abs(q.norm() - 1.0) > tol) {
    throw std::invalid_argument("Rot3::fromQuaternion: quaternion not unit");
  }
  q.normalize();
  return Rot3(q.toRotationMatrix());
}

Rot3 Rot3::exp(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const Eigen::Matrix3d W = hat(w);
  double c1, c2;  // R = I + c1 W + c2 W^2
  if (theta < kSmallAngle) {
    c1 = 1.0 - theta * theta / 6.0;
    c2 = 0.5 - theta * theta / 24.0;
  } else {
    c1 = std::sin(theta) / theta;
    c2 = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Rot3(Eigen::Matrix3d::Identity() + c1 * W + c2 * W * W);
}

Eigen::Vector3d Rot3::log() const {
  // The quaternion route stays well conditioned near angle pi, where the
  // trace formula loses half the significant digits.
  Eigen::Quaterniond q(mat_);
  if (q.w() < 0.0) {
    q.coeffs() = -q.coeffs();
  }
  const double s = q.vec().norm();  // sin(theta / 2)
  const double c = q.w();           // cos(theta / 2), >= 0
  if (s < kSmallAngle) {
    // 2 * atan(s / c) / s ~ (2 / c) * (1 - s^2 / (3 c^2))
    return (2.0 / c) * (1.0 - s * s / (3.0 * c * c)) * q.vec();
  }
  return (2.0 * std::atan2(s, c) / s) * q.vec();
}

Rot3 Rot3::rotationBetween(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d u = a.normalized();
  const Eigen::Vector3d v = b.normalized();
  const double c = u.dot(v);
  if (c < -1.0 + 1e-12) {
    throw std::domain_error("Rot3::rotationBetween: directions antiparallel");
  }
  const Eigen::Vector3d axisSin = u.cross(v);
  const double s = axisSin.norm();
  if (s < kSmallAngle) {
    return Rot3::exp(axisSin);  // angle ~ sin(angle) here
  }
  const double angle = std::atan2(s, c);
  return Rot3::exp(axisSin * (angle / s));
}

Rot3 Rot3::operator*(const Rot3& other) const {
  Rot3 out(mat_ * other.mat_);
  out.compositions_ = std::max(compositions_, other.compositions_) + 1;
  if (out.compositions_ >= kRenormalizeEvery) {
    out.mat_ = projectToSO3(out.mat_);
    out.compositions_ = 0;
  }
  return out;
}

Rot3 Rot3::inverse() const {
  Rot3 out(mat_.transpose().eval());
  out.compositions_ = compositions_;
  return out;
}

}  // namespace rslam
